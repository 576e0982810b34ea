#include "dxd/tree_typing.hpp"

#include <algorithm>
#include <functional>

#include "dxd/bottom_up.hpp"
#include "dxd/validate.hpp"

namespace dxd {

namespace {

WordDesign as_word_design(const BoxDesign& b) {
    WordDesign w;
    w.target = b.target;
    for (auto& seg : b.kernel.segments) {
        Word word;
        for (auto& cell : seg.cells) word.push_back(*cell.begin());
        w.kernel.segments.push_back(std::move(word));
    }
    w.kernel.functions = b.kernel.functions;
    return w;
}

Nfa content_union(const TreeGrammar& g, const std::set<Symbol>& names) {
    std::vector<Nfa> parts;
    for (auto& n : names) parts.push_back(g.content(n));
    return unite_all(parts);
}

struct KernelNodes {
    std::vector<const UTree*> pre;
    std::map<const UTree*, std::size_t> index;
    explicit KernelNodes(const KernelDoc& k) : pre(preorder(k.tree)) {
        for (std::size_t i = 0; i < pre.size(); ++i) index[pre[i]] = i;
    }
};

// Root content of a grammar as an automaton.
const Nfa& root_content(const TreeGrammar& g) { return g.content(g.root()); }

}  // namespace

Symbol fresh_root_name(const TreeGrammar& target, std::size_t function_number) {
    Symbol s = "s" + std::to_string(function_number);
    auto labels = target.labels();
    while (labels.count(s)) s += "_";
    return s;
}

TreeTyping lift_typing(const TreeGrammar& target, std::size_t function_count, const Typing& slots) {
    TreeTyping out;
    for (std::size_t i = 0; i < function_count; ++i) {
        TreeGrammar g;
        g.cls = target.cls;
        g.mech = Mechanism::Nfa;
        g.rules = target.rules;
        for (auto& [n, cm] : g.rules) cm.regex.reset();
        Symbol root = fresh_root_name(target, i + 1);
        g.set_content(root, minimal_trim(slots.at(i)));
        g.roots = {root};
        try {
            g = reduce(g);
        } catch (const EmptyLanguageError&) {
            // An empty slot language cannot occur in a local typing; keep the
            // grammar unreduced so callers can still inspect it.
        }
        if (target.mech != Mechanism::Nfa) {
            try {
                g = with_mechanism(g, target.mech);
            } catch (const NotRepresentable&) {
                // Content not expressible in the target mechanism; the typing
                // stays in nfa form.
            } catch (const ResourceCap&) {
            }
        }
        out.push_back(std::move(g));
    }
    return out;
}

// ---------------------------------------------------------------- string designs

std::optional<std::vector<InducedDesign>> induce_string_designs(const TreeDesign& d) {
    const TreeGrammar& g = d.target;
    const KernelDoc& k = d.kernel;
    KernelNodes nodes(k);
    std::vector<InducedDesign> out;
    std::optional<Symbol> root;
    for (auto& r : g.roots)
        if (TreeGrammar::base(r) == k.tree.label) root = r;
    if (!root) return std::nullopt;
    bool ok = true;
    std::function<void(const UTree&, const Symbol&)> walk = [&](const UTree& x, const Symbol& name) {
        InducedDesign id;
        id.node = nodes.index.at(&x);
        id.names = {name};
        id.design.target = g.content(name);
        auto useful = useful_symbols(id.design.target);
        id.design.kernel.segments.emplace_back();
        std::vector<std::pair<const UTree*, Symbol>> kids;
        for (auto& c : x.children) {
            if (is_function_symbol(c.label)) {
                id.design.kernel.functions.push_back(c.label);
                id.design.kernel.segments.emplace_back();
                id.slots.push_back(k.function_index(c.label));
                continue;
            }
            std::optional<Symbol> cn;
            for (auto& s : useful)
                if (TreeGrammar::base(s) == c.label) cn = s;
            if (!cn) {
                // No name fits: keep the plain label so the design is
                // unsatisfiable, but remember that the walk failed.
                if (g.cls != GrammarClass::Dtd || !g.rules.count(c.label)) ok = false;
                cn = c.label;
            }
            id.design.kernel.segments.back().cells.push_back({*cn});
            kids.push_back({&c, *cn});
        }
        out.push_back(std::move(id));
        for (auto& [c, n] : kids)
            if (ok && g.rules.count(n)) walk(*c, n);
    };
    walk(k.tree, *root);
    if (!ok) return std::nullopt;
    std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.node < b.node; });
    return out;
}

// ---------------------------------------------------------------- box designs

std::vector<InducedDesign> induce_box_designs(const TreeGrammar& g, const KernelDoc& k, const Kappa& kappa) {
    KernelNodes nodes(k);
    std::vector<InducedDesign> out;
    for (std::size_t i = 0; i < nodes.pre.size(); ++i) {
        const UTree& x = *nodes.pre[i];
        if (is_function_symbol(x.label)) continue;
        InducedDesign id;
        id.node = i;
        id.names = kappa.at(i);
        id.design.target = content_union(g, id.names);
        id.design.kernel.segments.emplace_back();
        for (auto& c : x.children) {
            if (is_function_symbol(c.label)) {
                id.design.kernel.functions.push_back(c.label);
                id.design.kernel.segments.emplace_back();
                id.slots.push_back(k.function_index(c.label));
            } else {
                id.design.kernel.segments.back().cells.push_back(kappa.at(nodes.index.at(&c)));
            }
        }
        out.push_back(std::move(id));
    }
    return out;
}

namespace {

// Candidate sets for kappa(x): nonempty subsets of the specializations of
// the label, by increasing size then lexicographically.
std::vector<std::set<Symbol>> subsets_of(const std::set<Symbol>& s) {
    std::vector<Symbol> v(s.begin(), s.end());
    std::vector<std::set<Symbol>> out;
    for (std::size_t size = 1; size <= v.size(); ++size) {
        std::vector<std::size_t> idx(size);
        for (std::size_t j = 0; j < size; ++j) idx[j] = j;
        while (true) {
            std::set<Symbol> cur;
            for (auto j : idx) cur.insert(v[j]);
            out.push_back(std::move(cur));
            std::size_t j = size;
            while (j > 0 && idx[j - 1] == v.size() - size + j - 1) --j;
            if (j == 0) break;
            ++idx[j - 1];
            for (std::size_t r = j; r < size; ++r) idx[r] = idx[r - 1] + 1;
        }
    }
    return out;
}

// Enumerates kappa assignments over the kernel's element nodes and calls
// `visit` on each; stops early when it returns true.
class KappaEnumerator {
public:
    KappaEnumerator(const TreeGrammar& g, const KernelDoc& k, const Caps& caps) : caps_(caps) {
        KernelNodes nodes(k);
        for (std::size_t i = 0; i < nodes.pre.size(); ++i) {
            const UTree& x = *nodes.pre[i];
            if (is_function_symbol(x.label)) continue;
            std::set<Symbol> pool;
            if (i == 0) {
                for (auto& r : g.roots)
                    if (TreeGrammar::base(r) == x.label) pool.insert(r);
            } else {
                pool = g.specializations(x.label);
            }
            node_ids_.push_back(i);
            choices_.push_back(subsets_of(pool));
        }
    }

    bool empty_pool() const {
        for (auto& c : choices_)
            if (c.empty()) return true;
        return false;
    }

    bool run(const std::function<bool(const Kappa&)>& visit) {
        if (empty_pool()) return false;
        std::vector<std::size_t> pos(choices_.size(), 0);
        std::uint64_t count = 0;
        while (true) {
            if (++count > caps_.kappa) throw ResourceCap("kappa", caps_.kappa);
            Kappa kappa;
            for (std::size_t j = 0; j < pos.size(); ++j) kappa[node_ids_[j]] = choices_[j][pos[j]];
            if (visit(kappa)) return true;
            std::size_t j = pos.size();
            while (j > 0) {
                --j;
                if (++pos[j] < choices_[j].size()) break;
                pos[j] = 0;
                if (j == 0) return false;
            }
            if (pos.empty()) return false;
        }
    }

private:
    Caps caps_;
    std::vector<std::size_t> node_ids_;
    std::vector<std::vector<std::set<Symbol>>> choices_;
};

// Caches box-level answers: a node's design depends only on kappa at the node
// and at its element children.
class BoxSolver {
public:
    BoxSolver(const TreeGrammar& g, const KernelDoc& k, const Caps& caps) : g_(g), k_(k), caps_(caps) {}

    const std::vector<Typing>& ml(const InducedDesign& id) {
        auto key = key_of(id);
        auto it = ml_.find(key);
        if (it != ml_.end()) return it->second;
        return ml_[key] = enumerate_ml_box(id.design, caps_);
    }

    const std::optional<Typing>& local(const InducedDesign& id) {
        auto key = key_of(id);
        auto it = local_.find(key);
        if (it != local_.end()) return it->second;
        return local_[key] = exists_local_box(id.design, caps_);
    }

private:
    using Key = std::pair<std::size_t, std::string>;
    const TreeGrammar& g_;
    const KernelDoc& k_;
    Caps caps_;
    std::map<Key, std::vector<Typing>> ml_;
    std::map<Key, std::optional<Typing>> local_;

    static Key key_of(const InducedDesign& id) {
        std::string s;
        for (auto& n : id.names) s += n + ",";
        s += "|" + to_string(id.design.kernel);
        return {id.node, s};
    }
};

Typing slots_from_nodes(std::size_t n, const std::vector<InducedDesign>& designs, const std::vector<const Typing*>& per_node) {
    Typing slots(n, empty_language());
    for (std::size_t j = 0; j < designs.size(); ++j)
        for (std::size_t s = 0; s < designs[j].slots.size(); ++s) slots[designs[j].slots[s]] = (*per_node[j])[s];
    return slots;
}

// Per-slot inclusion is enough to compare typings that share the rules of
// one normalized grammar: same-label names have disjoint, nonempty subtree
// languages, so the hedge language determines the name language.
bool slots_leq(const Typing& a, const Typing& b) { return typing_leq(a, b); }

std::vector<Typing> maximal_only(std::vector<Typing> cands) {
    std::vector<Typing> out;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < cands.size() && !dominated; ++j) {
            if (i == j) continue;
            if (slots_leq(cands[i], cands[j])) {
                // Equal candidates: keep the first occurrence only.
                if (slots_leq(cands[j], cands[i]))
                    dominated = j < i;
                else
                    dominated = true;
            }
        }
        if (!dominated) out.push_back(cands[i]);
    }
    return out;
}

std::vector<Typing> edtd_ml_candidates(const TreeGrammar& norm, const KernelDoc& k, const Caps& caps) {
    BoxSolver solver(norm, k, caps);
    std::vector<Typing> cands;
    KappaEnumerator en(norm, k, caps);
    en.run([&](const Kappa& kappa) {
        auto designs = induce_box_designs(norm, k, kappa);
        std::vector<const std::vector<Typing>*> lists;
        for (auto& id : designs) {
            const auto& l = solver.ml(id);
            if (l.empty()) return false;
            lists.push_back(&l);
        }
        std::vector<std::size_t> pos(lists.size(), 0);
        while (true) {
            std::vector<const Typing*> pick;
            for (std::size_t j = 0; j < lists.size(); ++j) pick.push_back(&(*lists[j])[pos[j]]);
            cands.push_back(slots_from_nodes(k.functions.size(), designs, pick));
            std::size_t j = lists.size();
            bool done = true;
            while (j > 0) {
                --j;
                if (++pos[j] < lists[j]->size()) {
                    done = false;
                    break;
                }
                pos[j] = 0;
            }
            if (done) break;
        }
        return false;
    });
    return maximal_only(std::move(cands));
}

}  // namespace

// ---------------------------------------------------------------- kappa

std::optional<Kappa> perfect_kappa(const TreeGrammar& g, const KernelDoc& k) {
    KernelNodes nodes(k);
    Kappa kappa;
    std::set<Symbol> root;
    for (auto& r : g.roots)
        if (TreeGrammar::base(r) == k.tree.label) root.insert(r);
    if (root.empty()) return std::nullopt;
    kappa[0] = root;
    std::set<Symbol> all_names = g.names();
    for (std::size_t i = 0; i < nodes.pre.size(); ++i) {
        const UTree& x = *nodes.pre[i];
        if (is_function_symbol(x.label) || x.children.empty()) continue;
        const std::size_t m = x.children.size();
        auto tag = [](const Symbol& s, std::size_t j) { return s + "\x1f" + std::to_string(j); };
        // Pattern over tagged names: element child j reads one name of its
        // label tagged j, a function child loops on every name tagged j.
        Nfa pattern;
        int cur = 0;
        for (std::size_t j = 0; j < m; ++j) {
            const UTree& c = x.children[j];
            int next = pattern.add_state(j + 1 == m);
            if (is_function_symbol(c.label)) {
                for (auto& n : all_names) pattern.add_edge(cur, tag(n, j), cur);
                pattern.add_edge(cur, kEpsilon, next);
            } else {
                for (auto& n : g.specializations(c.label)) pattern.add_edge(cur, tag(n, j), next);
            }
            cur = next;
        }
        Nfa content = remove_epsilon(content_union(g, kappa.at(i)));
        Nfa tagged;
        tagged.out.clear();
        tagged.final.clear();
        tagged.label.clear();
        for (int q = 0; q < content.size(); ++q) tagged.add_state(content.final[q]);
        tagged.initial = content.initial;
        for (int q = 0; q < content.size(); ++q)
            for (auto& e : content.out[q])
                for (std::size_t j = 0; j < m; ++j) tagged.add_edge(q, tag(e.sym, j), e.to);
        Nfa l = trim(intersect(remove_epsilon(pattern), tagged));
        auto syms = useful_symbols(l);
        for (std::size_t j = 0; j < m; ++j) {
            const UTree& c = x.children[j];
            if (is_function_symbol(c.label)) continue;
            std::set<Symbol> here;
            for (auto& n : g.specializations(c.label))
                if (syms.count(tag(n, j))) here.insert(n);
            if (here.empty()) return std::nullopt;
            kappa[nodes.index.at(&c)] = here;
        }
    }
    return kappa;
}

namespace {

// L(ga at na) is a subset of L(gb at nb).
bool subtree_included(const TreeGrammar& ga, const Symbol& na, const TreeGrammar& gb, const Symbol& nb) {
    auto tt = explore_types({&ga, &gb});
    for (auto& t : tt.types)
        if (t.accept[0].count(na) && !t.accept[1].count(nb)) return false;
    return true;
}

}  // namespace

std::optional<Kappa> induced_kappa(const TreeGrammar& g, const KernelDoc& k, const TreeTyping& typing) {
    TreeGrammar t = build_t_tau(k, typing);
    KernelNodes nodes(k);
    Kappa kappa;
    for (std::size_t i = 0; i < nodes.pre.size(); ++i) {
        const UTree& x = *nodes.pre[i];
        if (is_function_symbol(x.label)) continue;
        Symbol xn = kernel_node_name(x.label, i);
        std::set<Symbol> friends;
        for (auto& n : g.specializations(x.label))
            if (t.rules.count(xn) && subtree_included(g, n, t, xn)) friends.insert(n);
        if (friends.empty()) return std::nullopt;
        kappa[i] = friends;
    }
    return kappa;
}

// ---------------------------------------------------------------- exists

namespace {

enum class Want { Local, Maximal, Perfect };

std::optional<TreeTyping> string_search(const TreeDesign& d, Want want, const Caps& caps) {
    auto designs = induce_string_designs(d);
    if (!designs) return std::nullopt;
    std::vector<Typing> per_node;
    for (auto& id : *designs) {
        WordDesign wd = as_word_design(id.design);
        std::optional<Typing> t;
        switch (want) {
            case Want::Local: t = exists_local(wd, caps); break;
            case Want::Maximal: t = exists_ml(wd, caps); break;
            case Want::Perfect: t = exists_perfect(wd); break;
        }
        if (!t) return std::nullopt;
        per_node.push_back(std::move(*t));
    }
    std::vector<const Typing*> ptrs;
    for (auto& t : per_node) ptrs.push_back(&t);
    return lift_typing(d.target, d.kernel.functions.size(), slots_from_nodes(d.kernel.functions.size(), *designs, ptrs));
}

}  // namespace

std::optional<TreeTyping> tree_exists_local(const TreeDesign& d, const Caps& caps) {
    if (d.target.cls != GrammarClass::Edtd) return string_search(d, Want::Local, caps);
    TreeGrammar norm = normalize(d.target);
    BoxSolver solver(norm, d.kernel, caps);
    std::optional<TreeTyping> found;
    KappaEnumerator(norm, d.kernel, caps).run([&](const Kappa& kappa) {
        auto designs = induce_box_designs(norm, d.kernel, kappa);
        std::vector<const Typing*> pick;
        for (auto& id : designs) {
            const auto& t = solver.local(id);
            if (!t) return false;
            pick.push_back(&*t);
        }
        found = lift_typing(norm, d.kernel.functions.size(), slots_from_nodes(d.kernel.functions.size(), designs, pick));
        return true;
    });
    return found;
}

std::vector<TreeTyping> tree_enumerate_ml(const TreeDesign& d, const Caps& caps) {
    std::vector<TreeTyping> out;
    const std::size_t n = d.kernel.functions.size();
    if (d.target.cls != GrammarClass::Edtd) {
        auto designs = induce_string_designs(d);
        if (!designs) return out;
        std::vector<std::vector<Typing>> lists;
        for (auto& id : *designs) {
            lists.push_back(enumerate_ml(as_word_design(id.design), caps));
            if (lists.back().empty()) return out;
        }
        std::vector<std::size_t> pos(lists.size(), 0);
        while (true) {
            std::vector<const Typing*> pick;
            for (std::size_t j = 0; j < lists.size(); ++j) pick.push_back(&lists[j][pos[j]]);
            out.push_back(lift_typing(d.target, n, slots_from_nodes(n, *designs, pick)));
            std::size_t j = lists.size();
            bool done = true;
            while (j > 0) {
                --j;
                if (++pos[j] < lists[j].size()) {
                    done = false;
                    break;
                }
                pos[j] = 0;
            }
            if (done) break;
        }
        return out;
    }
    TreeGrammar norm = normalize(d.target);
    for (auto& slots : edtd_ml_candidates(norm, d.kernel, caps)) out.push_back(lift_typing(norm, n, slots));
    return out;
}

std::optional<TreeTyping> tree_exists_ml(const TreeDesign& d, const Caps& caps) {
    if (d.target.cls != GrammarClass::Edtd) return string_search(d, Want::Maximal, caps);
    auto all = tree_enumerate_ml(d, caps);
    if (all.empty()) return std::nullopt;
    return all.front();
}

std::optional<TreeTyping> tree_exists_perfect(const TreeDesign& d, const Caps& caps) {
    if (d.target.cls != GrammarClass::Edtd) return string_search(d, Want::Perfect, caps);
    TreeGrammar norm = normalize(d.target);
    auto kappa = perfect_kappa(norm, d.kernel);
    if (!kappa) return std::nullopt;
    auto designs = induce_box_designs(norm, d.kernel, *kappa);
    std::vector<Typing> per_node;
    for (auto& id : designs) {
        auto r = exists_perfect_box(id.design);
        if (!r.typing) return std::nullopt;
        per_node.push_back(std::move(*r.typing));
    }
    std::vector<const Typing*> ptrs;
    for (auto& t : per_node) ptrs.push_back(&t);
    TreeTyping typing = lift_typing(norm, d.kernel.functions.size(), slots_from_nodes(d.kernel.functions.size(), designs, ptrs));
    // The assembled typing must be local; anything else means the kappa
    // built for a perfect typing does not exist.
    if (!equivalent_grammar(build_t_tau(d.kernel, typing), d.target)) return std::nullopt;
    (void)caps;
    return typing;
}

// ---------------------------------------------------------------- checks

namespace {

TreeGrammar as_edtd(TreeGrammar g) {
    g.cls = GrammarClass::Edtd;
    return g;
}

TreeGrammar relabel_root(const TreeGrammar& g, const Symbol& label) {
    TreeGrammar r = g;
    Symbol old = g.root();
    Symbol fresh = label + "#root";
    r.rules[fresh] = g.rules.at(old);
    bool referenced = false;
    for (auto& [n, cm] : g.rules)
        if (useful_symbols(cm.nfa).count(old)) referenced = true;
    if (!referenced) r.rules.erase(old);
    r.roots = {fresh};
    r.cls = GrammarClass::Edtd;
    return r;
}

void precheck(const TreeDesign& d, const TreeTyping& typing) {
    if (typing.size() != d.kernel.functions.size())
        throw InputError("kernel has " + std::to_string(d.kernel.functions.size()) + " functions but " +
                         std::to_string(typing.size()) + " types were given");
    BottomUpDesign b{d.kernel, typing, d.target.cls, Mechanism::Nfa};
    auto r = cons_and_synthesize(b);
    if (!r.consistent) throw InconsistentTyping("typing is not " + to_string(d.target.cls) + "-consistent: " + r.reason);
}

}  // namespace

bool tree_typing_leq(const TreeTyping& a, const TreeTyping& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!includes_grammar(relabel_root(a[i], "top"), relabel_root(b[i], "top"))) return false;
    return true;
}

bool tree_typing_equivalent(const TreeTyping& a, const TreeTyping& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!equivalent_grammar(relabel_root(a[i], "top"), relabel_root(b[i], "top"))) return false;
    return true;
}

Typing extract_slot_typing(const TreeDesign& d, const TreeTyping& typing) {
    if (d.target.cls == GrammarClass::Edtd) throw std::logic_error("slot extraction is defined for DTD and SDTD targets");
    auto designs = induce_string_designs(d);
    Typing out(d.kernel.functions.size(), empty_language());
    if (!designs) return out;
    for (auto& id : *designs) {
        auto useful = useful_symbols(id.design.target);
        for (auto slot : id.slots) {
            const Nfa& rc = root_content(typing.at(slot));
            std::map<Symbol, Symbol> m;
            for (auto& s : rc.alphabet) {
                Symbol label = TreeGrammar::base(s);
                Symbol to = "?" + label;  // no counterpart: such words are never sound
                for (auto& u : useful)
                    if (TreeGrammar::base(u) == label) to = u;
                m[s] = to;
            }
            out[slot] = rename_symbols(rc, m);
        }
    }
    return out;
}

bool tree_check_local(const TreeDesign& d, const TreeTyping& typing) {
    precheck(d, typing);
    return equivalent_grammar(build_t_tau(d.kernel, typing), as_edtd(d.target));
}

bool tree_check_ml(const TreeDesign& d, const TreeTyping& typing, const Caps& caps) {
    if (!tree_check_local(d, typing)) return false;
    if (d.target.cls != GrammarClass::Edtd) {
        Typing slots = extract_slot_typing(d, typing);
        auto designs = induce_string_designs(d);
        if (!designs) return false;
        for (auto& id : *designs) {
            Typing t;
            for (auto s : id.slots) t.push_back(slots[s]);
            if (!check_maximal_local(as_word_design(id.design), t, caps)) return false;
        }
        return true;
    }
    for (auto& cand : tree_enumerate_ml(d, caps))
        if (tree_typing_leq(typing, cand) && !tree_typing_leq(cand, typing)) return false;
    return true;
}

bool tree_check_perfect(const TreeDesign& d, const TreeTyping& typing, const Caps& caps) {
    if (!tree_check_local(d, typing)) return false;
    if (d.target.cls != GrammarClass::Edtd) {
        Typing slots = extract_slot_typing(d, typing);
        auto designs = induce_string_designs(d);
        if (!designs) return false;
        for (auto& id : *designs) {
            Typing t;
            for (auto s : id.slots) t.push_back(slots[s]);
            if (!check_perfect(as_word_design(id.design), t)) return false;
        }
        return true;
    }
    auto p = tree_exists_perfect(d, caps);
    return p && tree_typing_equivalent(*p, typing);
}

}  // namespace dxd
