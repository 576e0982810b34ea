#include "dxd/bottom_up.hpp"

#include <algorithm>

#include "dxd/errors.hpp"

namespace dxd {

Symbol kernel_node_name(const Symbol& label, std::size_t preorder_index) {
    return label + "#x" + std::to_string(preorder_index);
}

Symbol typing_name(const Symbol& name, std::size_t function_number) {
    auto p = name.find('#');
    Symbol out = TreeGrammar::base(name) + "#f" + std::to_string(function_number);
    if (p != Symbol::npos) out += "." + name.substr(p + 1);
    return out;
}

namespace {

struct Builder {
    const KernelDoc& k;
    const std::vector<TreeGrammar>& typing;
    bool use_regex;
    TreeGrammar out;
    std::size_t next_index = 0;
    std::vector<std::map<Symbol, Symbol>> renames;

    Builder(const KernelDoc& kd, const std::vector<TreeGrammar>& ty, bool rx) : k(kd), typing(ty), use_regex(rx) {
        renames.resize(ty.size());
        for (std::size_t i = 0; i < ty.size(); ++i)
            for (auto& n : ty[i].names()) renames[i][n] = typing_name(n, i + 1);
    }

    // Returns the name given to node `t` and fills in its rule.
    Symbol visit(const UTree& t) {
        Symbol me = kernel_node_name(t.label, next_index++);
        std::vector<Nfa> parts;
        std::vector<RegexPtr> rparts;
        bool rx = use_regex;
        for (auto& c : t.children) {
            if (is_function_symbol(c.label)) {
                std::size_t i = k.function_index(c.label);
                ++next_index;
                const TreeGrammar& g = typing[i];
                const ContentModel& root = g.rules.at(g.root());
                parts.push_back(rename_symbols(root.nfa, renames[i]));
                if (rx && root.regex)
                    rparts.push_back(rename_regex(*root.regex, renames[i]));
                else
                    rx = false;
            } else {
                Symbol cn = visit(c);
                parts.push_back(symbol_language(cn));
                rparts.push_back(Regex::symbol(cn));
            }
        }
        if (rx) {
            RegexPtr r = Regex::eps();
            for (auto& p : rparts) r = r->kind == Regex::Kind::Epsilon ? p : Regex::concat(r, p);
            out.set_content(me, r);
        } else {
            out.set_content(me, parts.empty() ? epsilon_language() : concat_all(parts));
        }
        return me;
    }
};

}  // namespace

TreeGrammar build_t_tau(const KernelDoc& k, const std::vector<TreeGrammar>& typing, Mechanism mech) {
    if (typing.size() != k.functions.size())
        throw InputError("kernel has " + std::to_string(k.functions.size()) + " functions but " +
                         std::to_string(typing.size()) + " types were given");
    bool rx = mech == Mechanism::Nre || mech == Mechanism::Dre;
    Builder b(k, typing, rx);
    b.out.cls = GrammarClass::Edtd;
    b.out.mech = rx ? Mechanism::Nre : Mechanism::Nfa;
    b.out.roots = {b.visit(k.tree)};
    for (std::size_t i = 0; i < typing.size(); ++i) {
        Symbol root = typing[i].root();
        for (auto& [name, cm] : typing[i].rules) {
            if (name == root) continue;  // the root only labels the returned tree
            ContentModel c{rename_symbols(cm.nfa, b.renames[i]), std::nullopt};
            if (cm.regex) c.regex = rename_regex(*cm.regex, b.renames[i]);
            b.out.rules[b.renames[i].at(name)] = std::move(c);
        }
    }
    // Names referenced but never given a rule are leaves.
    std::set<Symbol> used;
    for (auto& [n, cm] : b.out.rules)
        for (auto& s : cm.nfa.alphabet) used.insert(s);
    for (auto& s : used)
        if (!b.out.rules.count(s)) b.out.set_content(s, Regex::eps());
    if (!rx) b.out.mech = mech;
    return reduce(b.out);
}

namespace {

// Replaces name `from` by `to` in every content model.
void merge_names(TreeGrammar& g, const Symbol& from, const Symbol& to) {
    std::map<Symbol, Symbol> m{{from, to}};
    for (auto& [n, cm] : g.rules) {
        if (!cm.nfa.alphabet.count(from)) continue;
        cm.nfa = rename_symbols(cm.nfa, m);
        if (cm.regex) cm.regex = rename_regex(*cm.regex, m);
    }
    g.rules.erase(from);
}

// Names in the content of a kernel node, in order of first appearance.
std::vector<Symbol> ordered_symbols(const ContentModel& cm) {
    std::vector<Symbol> order;
    if (cm.regex) {
        // Walk the expression left to right.
        std::vector<RegexPtr> stack{*cm.regex};
        while (!stack.empty()) {
            RegexPtr r = stack.back();
            stack.pop_back();
            if (!r) continue;
            if (r->kind == Regex::Kind::Sym) {
                if (std::find(order.begin(), order.end(), r->sym) == order.end()) order.push_back(r->sym);
                continue;
            }
            stack.push_back(r->right);
            stack.push_back(r->left);
        }
    }
    for (auto& s : useful_symbols(cm.nfa))
        if (std::find(order.begin(), order.end(), s) == order.end()) order.push_back(s);
    auto useful = useful_symbols(cm.nfa);
    order.erase(std::remove_if(order.begin(), order.end(), [&](const Symbol& s) { return !useful.count(s); }),
                order.end());
    return order;
}

Nfa mu_projection(const Nfa& a) {
    std::map<Symbol, Symbol> mu;
    for (auto& s : a.alphabet) mu[s] = TreeGrammar::base(s);
    return rename_symbols(a, mu);
}

TreeGrammar project_to_dtd(const TreeGrammar& g) {
    TreeGrammar d;
    d.cls = GrammarClass::Dtd;
    d.mech = g.mech;
    for (auto& r : g.roots) d.roots.insert(TreeGrammar::base(r));
    for (auto& [n, cm] : g.rules) {
        Symbol label = TreeGrammar::base(n);
        if (d.rules.count(label)) continue;
        ContentModel c{mu_projection(cm.nfa), std::nullopt};
        if (cm.regex) {
            std::map<Symbol, Symbol> mu;
            for (auto& s : regex_symbols(*cm.regex)) mu[s] = TreeGrammar::base(s);
            c.regex = rename_regex(*cm.regex, mu);
        }
        d.rules[label] = std::move(c);
    }
    return d;
}

}  // namespace

ConsResult cons_and_synthesize(const BottomUpDesign& d) {
    ConsResult res;
    TreeGrammar t = build_t_tau(d.kernel, d.typing, d.mech);
    if (d.cls == GrammarClass::Edtd) {
        res.consistent = true;
        res.type = t.mech == d.mech ? t : with_mechanism(t, d.mech);
        res.type->cls = GrammarClass::Edtd;
        return res;
    }
    // Post-order over kernel element nodes.
    std::vector<std::pair<const UTree*, std::size_t>> nodes;
    {
        auto pre = preorder(d.kernel.tree);
        for (std::size_t i = 0; i < pre.size(); ++i)
            if (!is_function_symbol(pre[i]->label)) nodes.push_back({pre[i], i});
        std::reverse(nodes.begin(), nodes.end());  // children come after parents in pre-order
    }
    for (auto& [node, idx] : nodes) {
        Symbol me = kernel_node_name(node->label, idx);
        if (!t.rules.count(me)) continue;
        std::map<Symbol, std::vector<Symbol>> groups;
        for (auto& s : ordered_symbols(t.rules.at(me))) groups[TreeGrammar::base(s)].push_back(s);
        for (auto& [label, names] : groups) {
            for (std::size_t j = 1; j < names.size(); ++j) {
                if (!same_subtree_language(t, names[0], t, names[j])) {
                    res.reason = "under " + node->label + " (kernel node " + std::to_string(idx) + "), " + names[0] +
                                 " and " + names[j] + " share label " + label + " but define different subtrees";
                    return res;
                }
            }
            for (std::size_t j = 1; j < names.size(); ++j) merge_names(t, names[j], names[0]);
        }
    }
    t = reduce(t);
    if (!is_single_type(t)) {
        res.reason = "a local type is not single-type";
        return res;
    }
    if (d.cls == GrammarClass::Dtd) {
        std::map<Symbol, Symbol> first;
        for (auto& n : t.names()) {
            Symbol label = TreeGrammar::base(n);
            auto it = first.find(label);
            if (it == first.end()) {
                first[label] = n;
                continue;
            }
            if (!equivalent(mu_projection(t.content(it->second)), mu_projection(t.content(n)))) {
                res.reason = "names " + it->second + " and " + n + " of element " + label +
                             " have different content models";
                return res;
            }
        }
        t = project_to_dtd(t);
    } else {
        t.cls = GrammarClass::Sdtd;
    }
    if (d.mech == Mechanism::Dre) {
        for (auto& [n, cm] : t.rules) {
            if (cm.regex && is_dre(*cm.regex)) continue;
            if (!is_one_unambiguous(cm.nfa)) {
                res.reason = "content model of " + n + " is not one-unambiguous";
                return res;
            }
        }
    }
    try {
        t = with_mechanism(t, d.mech);
    } catch (const NotRepresentable& e) {
        res.reason = e.what();
        return res;
    }
    res.consistent = true;
    res.type = std::move(t);
    return res;
}

bool cons(const BottomUpDesign& d) { return cons_and_synthesize(d).consistent; }

std::optional<TreeGrammar> synthesize_type(const BottomUpDesign& d) { return cons_and_synthesize(d).type; }

bool definable_in_class(const TreeGrammar& g, GrammarClass cls) {
    switch (cls) {
        case GrammarClass::Edtd: return true;
        case GrammarClass::Sdtd: return equivalent_grammar(single_type_closure(g), g);
        case GrammarClass::Dtd: return equivalent_grammar(dtd_closure(g), g);
    }
    return false;
}

}  // namespace dxd
