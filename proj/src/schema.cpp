#include "dxd/schema.hpp"

#include <algorithm>
#include <sstream>

#include "dxd/errors.hpp"

namespace dxd {

std::string to_string(GrammarClass c) {
    switch (c) {
        case GrammarClass::Dtd: return "dtd";
        case GrammarClass::Sdtd: return "sdtd";
        case GrammarClass::Edtd: return "edtd";
    }
    return "?";
}

std::string to_string(Mechanism m) {
    switch (m) {
        case Mechanism::Nfa: return "nfa";
        case Mechanism::Dfa: return "dfa";
        case Mechanism::Nre: return "nre";
        case Mechanism::Dre: return "dre";
    }
    return "?";
}

GrammarClass parse_class(const std::string& s) {
    if (s == "dtd") return GrammarClass::Dtd;
    if (s == "sdtd") return GrammarClass::Sdtd;
    if (s == "edtd") return GrammarClass::Edtd;
    throw InputError("unknown grammar class '" + s + "' (expected dtd, sdtd or edtd)");
}

Mechanism parse_mechanism(const std::string& s) {
    if (s == "nfa") return Mechanism::Nfa;
    if (s == "dfa") return Mechanism::Dfa;
    if (s == "nre") return Mechanism::Nre;
    if (s == "dre") return Mechanism::Dre;
    throw InputError("unknown mechanism '" + s + "' (expected nfa, dfa, nre or dre)");
}

// ------------------------------------------------------------- TreeGrammar

Symbol TreeGrammar::base(const Symbol& name) {
    auto p = name.find('#');
    return p == Symbol::npos ? name : name.substr(0, p);
}

std::set<Symbol> TreeGrammar::names() const {
    std::set<Symbol> s;
    for (auto& [n, _] : rules) s.insert(n);
    return s;
}

std::set<Symbol> TreeGrammar::labels() const {
    std::set<Symbol> s;
    for (auto& [n, _] : rules) s.insert(base(n));
    return s;
}

std::set<Symbol> TreeGrammar::specializations(const Symbol& label) const {
    std::set<Symbol> s;
    for (auto& [n, _] : rules)
        if (base(n) == label) s.insert(n);
    return s;
}

const Nfa& TreeGrammar::content(const Symbol& name) const {
    auto it = rules.find(name);
    if (it == rules.end()) throw InputError("no rule for name " + name);
    return it->second.nfa;
}

void TreeGrammar::set_content(const Symbol& name, Nfa a) { rules[name] = ContentModel{std::move(a), std::nullopt}; }

void TreeGrammar::set_content(const Symbol& name, const RegexPtr& r) { rules[name] = ContentModel{to_nfa(r), r}; }

Symbol TreeGrammar::root() const {
    if (roots.size() != 1) throw InputError("grammar has " + std::to_string(roots.size()) + " start names");
    return *roots.begin();
}

namespace {

// Every symbol used in a content model gets a rule (an epsilon leaf when
// none was written).
void close_rules(TreeGrammar& g) {
    std::set<Symbol> used;
    for (auto& [n, cm] : g.rules)
        for (auto& s : cm.nfa.alphabet) used.insert(s);
    for (auto& r : g.roots) used.insert(r);
    for (auto& s : used)
        if (!g.rules.count(s)) g.rules[s] = ContentModel{epsilon_language(), Regex::eps()};
}

void check_class(const TreeGrammar& g) {
    if (g.cls == GrammarClass::Dtd)
        for (auto& n : g.names())
            if (n.find('#') != Symbol::npos) throw InputError("a DTD cannot use specialized name " + n);
    for (auto& n : g.names())
        if (is_function_symbol(n)) throw InputError("function symbol " + n + " cannot be an element name");
}

}  // namespace

TreeGrammar make_grammar(GrammarClass cls, Mechanism mech, const Symbol& root,
                         const std::vector<std::pair<Symbol, std::string>>& rules) {
    TreeGrammar g;
    g.cls = cls;
    g.mech = mech;
    g.roots = {root};
    for (auto& [name, text] : rules) {
        RegexPtr r = parse_regex(text);
        if (mech == Mechanism::Dre && !is_dre(r))
            throw InputError("content model of " + name + " is not a deterministic expression: " + text);
        if (mech == Mechanism::Dfa || mech == Mechanism::Nfa) {
            Nfa a = to_nfa(r);
            if (mech == Mechanism::Dfa) a = minimal_trim(a);
            g.set_content(name, std::move(a));
            if (mech == Mechanism::Nfa) g.rules[name].regex = r;
        } else {
            g.set_content(name, r);
        }
    }
    close_rules(g);
    check_class(g);
    return g;
}

TreeGrammar parse_grammar(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    std::optional<GrammarClass> cls;
    std::optional<Mechanism> mech;
    std::optional<Symbol> root;
    std::vector<std::pair<Symbol, std::string>> rules;
    std::set<Symbol> seen;
    auto trim_ws = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::string l = trim_ws(line);
        if (l.empty() || l.rfind("//", 0) == 0 || l.rfind("%%", 0) == 0) continue;
        auto arrow = l.find("->");
        if (arrow != std::string::npos) {
            Symbol name = trim_ws(l.substr(0, arrow));
            std::string body = trim_ws(l.substr(arrow + 2));
            if (name.empty()) throw InputError("line " + std::to_string(lineno) + ": rule without a name", lineno);
            if (!seen.insert(name).second)
                throw InputError("line " + std::to_string(lineno) + ": second rule for " + name, lineno);
            if (body.empty()) body = "ε";
            rules.emplace_back(name, body);
            continue;
        }
        auto colon = l.find(':');
        if (colon == std::string::npos)
            throw InputError("line " + std::to_string(lineno) + ": expected 'key: value' or 'name -> expression'", lineno);
        std::string key = trim_ws(l.substr(0, colon));
        std::string value = trim_ws(l.substr(colon + 1));
        try {
            if (key == "class")
                cls = parse_class(value);
            else if (key == "mechanism")
                mech = parse_mechanism(value);
            else if (key == "root")
                root = value;
            else
                throw InputError("unknown header '" + key + "'");
        } catch (const InputError& e) {
            throw InputError("line " + std::to_string(lineno) + ": " + e.what(), lineno);
        }
    }
    if (!root) throw InputError("grammar has no 'root:' line");
    TreeGrammar g;
    try {
        g = make_grammar(cls.value_or(GrammarClass::Dtd), mech.value_or(Mechanism::Nre), *root, rules);
    } catch (const InputError& e) {
        // Find the line of the offending rule for a better message.
        throw InputError(std::string("grammar: ") + e.what());
    }
    bool already = is_reduced(g);
    g = reduce(g);
    g.was_reduced = already;
    if (g.cls == GrammarClass::Sdtd && !is_single_type(g)) throw InputError("grammar declared sdtd is not single-type");
    return g;
}

std::string to_text(const TreeGrammar& g) {
    std::ostringstream out;
    out << "class: " << to_string(g.cls) << "\n";
    out << "mechanism: " << to_string(g.mech) << "\n";
    out << "root:";
    for (auto& r : g.roots) out << ' ' << r;
    out << "\n";
    for (auto& [name, cm] : g.rules) {
        RegexPtr r = cm.regex ? *cm.regex : to_regex(cm.nfa);
        out << name << " -> " << to_string(r) << "\n";
    }
    return out.str();
}

// ------------------------------------------------------------- dual, reduce

std::vector<Symbol> dual_state_names(const TreeGrammar& g) {
    std::vector<Symbol> v{""};
    for (auto& n : g.names()) v.push_back(n);
    return v;
}

Dfa dual(const TreeGrammar& g) {
    auto names = dual_state_names(g);
    std::map<Symbol, int> idx;
    Nfa d;
    d.label[0] = -1;
    for (std::size_t i = 1; i < names.size(); ++i) {
        idx[names[i]] = d.add_state(accepts(g.content(names[i]), {}), static_cast<int>(i - 1));
    }
    for (auto& r : g.roots)
        if (idx.count(r)) d.add_edge(0, TreeGrammar::base(r), idx[r]);
    for (std::size_t i = 1; i < names.size(); ++i)
        for (auto& b : useful_symbols(g.content(names[i])))
            if (idx.count(b)) d.add_edge(static_cast<int>(i), TreeGrammar::base(b), idx[b]);
    return d;
}

std::set<Symbol> mark_bound(const TreeGrammar& g) {
    std::set<Symbol> bound;
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [name, cm] : g.rules) {
            if (bound.count(name)) continue;
            std::set<Symbol> drop;
            for (auto& s : cm.nfa.alphabet)
                if (!bound.count(s)) drop.insert(s);
            if (!is_empty(without_symbols(cm.nfa, drop))) {
                bound.insert(name);
                changed = true;
            }
        }
    }
    return bound;
}

namespace {

std::set<Symbol> reachable_names(const TreeGrammar& g) {
    std::set<Symbol> seen;
    std::vector<Symbol> stack;
    for (auto& r : g.roots)
        if (g.rules.count(r) && seen.insert(r).second) stack.push_back(r);
    while (!stack.empty()) {
        Symbol n = stack.back();
        stack.pop_back();
        for (auto& s : useful_symbols(g.content(n)))
            if (g.rules.count(s) && seen.insert(s).second) stack.push_back(s);
    }
    return seen;
}

}  // namespace

TreeGrammar reduce(const TreeGrammar& g) {
    auto bound = mark_bound(g);
    TreeGrammar r = g;
    r.roots.clear();
    for (auto& s : g.roots)
        if (bound.count(s)) r.roots.insert(s);
    if (r.roots.empty()) throw EmptyLanguageError("the grammar defines the empty language");
    r.rules.clear();
    for (auto& [name, cm] : g.rules) {
        if (!bound.count(name)) continue;
        std::set<Symbol> drop;
        for (auto& s : cm.nfa.alphabet)
            if (!bound.count(s)) drop.insert(s);
        ContentModel c = cm;
        if (!drop.empty()) {
            c.nfa = trim(without_symbols(cm.nfa, drop));
            if (c.regex) {
                std::map<Symbol, RegexPtr> sub;
                for (auto& s : drop) sub[s] = Regex::empty();
                c.regex = substitute_regex(*c.regex, sub);
                // Simplify by re-deriving from the automaton: the substituted
                // expression still mentions the empty set.
                if (g.mech == Mechanism::Dre) {
                    auto d = to_dre(c.nfa);
                    if (!d) throw NotRepresentable("reduced content model of " + name + " is not one-unambiguous");
                    c.regex = *d;
                } else {
                    c.regex = to_regex(c.nfa);
                }
            }
        }
        r.rules[name] = std::move(c);
    }
    auto reach = reachable_names(r);
    for (auto it = r.rules.begin(); it != r.rules.end();)
        it = reach.count(it->first) ? std::next(it) : r.rules.erase(it);
    r.was_reduced = g.was_reduced;
    return r;
}

bool is_reduced(const TreeGrammar& g) {
    auto bound = mark_bound(g);
    for (auto& n : g.names())
        if (!bound.count(n)) return false;
    bool root_ok = false;
    for (auto& r : g.roots) root_ok = root_ok || bound.count(r);
    if (!root_ok) return false;
    return reachable_names(g) == g.names();
}

bool is_single_type(const TreeGrammar& g) {
    std::set<Symbol> root_labels;
    for (auto& r : g.roots)
        if (!root_labels.insert(TreeGrammar::base(r)).second) return false;
    return is_deterministic(dual(g));
}

// ------------------------------------------------------------- tree automata

Nuta to_uta(const TreeGrammar& g) {
    Nuta u;
    for (auto& [name, cm] : g.rules) {
        u.states.insert(name);
        u.delta[name] = {TreeGrammar::base(name), cm.nfa};
    }
    u.finals = g.roots;
    return u;
}

namespace {

// Runs the horizontal automata of all candidate names of one label in
// lock-step over an alphabet of tree types.
struct Horizon {
    struct Candidate {
        std::size_t grammar;
        Symbol name;
        const Nfa* nfa;
    };
    std::vector<Candidate> cands;
    std::vector<std::vector<std::set<int>>> states;  // combined horizontal states
    std::map<std::vector<std::set<int>>, int> index;
    std::vector<std::size_t> processed;              // types already tried per state
    std::vector<std::pair<int, int>> parent;         // (state, type) that produced it
    std::vector<std::map<int, int>> delta;           // type -> state
};

std::set<int> step_states(const Nfa& a, const std::set<int>& cur, const std::set<Symbol>& syms) {
    std::set<int> next;
    for (int q : cur)
        for (auto& e : a.out[q])
            if (!e.sym.empty() && syms.count(e.sym)) next.insert(e.to);
    return epsilon_closure(a, next);
}

struct Explorer {
    std::vector<const TreeGrammar*> gs;
    TreeTypes result;
    std::map<std::pair<Symbol, std::vector<std::set<Symbol>>>, int> type_index;
    std::map<Symbol, Horizon> horizon;

    explicit Explorer(std::vector<const TreeGrammar*> g) : gs(std::move(g)) {
        std::set<Symbol> labels;
        for (auto* gr : gs)
            for (auto& l : gr->labels()) labels.insert(l);
        for (auto& l : labels) {
            Horizon& h = horizon[l];
            for (std::size_t i = 0; i < gs.size(); ++i)
                for (auto& n : gs[i]->specializations(l)) h.cands.push_back({i, n, &gs[i]->content(n)});
            std::vector<std::set<int>> start;
            for (auto& c : h.cands) start.push_back(epsilon_closure(*c.nfa, {c.nfa->initial}));
            h.index[start] = 0;
            h.states.push_back(start);
            h.processed.push_back(0);
            h.parent.push_back({-1, -1});
            h.delta.emplace_back();
        }
    }

    std::vector<std::set<Symbol>> accept_of(const Horizon& h, int s) const {
        std::vector<std::set<Symbol>> acc(gs.size());
        for (std::size_t k = 0; k < h.cands.size(); ++k)
            for (int q : h.states[s][k])
                if (h.cands[k].nfa->final[q]) {
                    acc[h.cands[k].grammar].insert(h.cands[k].name);
                    break;
                }
        return acc;
    }

    Word path(const Horizon& h, int s) const {
        std::vector<int> types;
        for (int c = s; h.parent[c].first >= 0; c = h.parent[c].first) types.push_back(h.parent[c].second);
        std::reverse(types.begin(), types.end());
        Word w;
        for (int t : types) w.push_back(std::to_string(t));
        return w;
    }

    void record(const Symbol& label, Horizon& h, int s, bool& changed) {
        auto acc = accept_of(h, s);
        bool any = false;
        for (auto& a : acc) any = any || !a.empty();
        if (!any) return;
        auto key = std::make_pair(label, acc);
        if (type_index.count(key)) return;
        UTree w{label, {}};
        for (auto& t : path(h, s)) w.children.push_back(result.types[std::stoi(t)].witness);
        type_index[key] = static_cast<int>(result.types.size());
        result.types.push_back({label, acc, std::move(w)});
        changed = true;
    }

    void run() {
        bool changed = true;
        for (auto& [label, h] : horizon) record(label, h, 0, changed);
        while (changed) {
            changed = false;
            for (auto& [label, h] : horizon) {
                for (std::size_t s = 0; s < h.states.size(); ++s) {
                    while (h.processed[s] < result.types.size()) {
                        int t = static_cast<int>(h.processed[s]++);
                        const auto& type = result.types[t];
                        std::vector<std::set<int>> next;
                        bool alive = false;
                        for (auto& c : h.cands) {
                            next.push_back(step_states(*c.nfa, h.states[s][next.size()], type.accept[c.grammar]));
                            alive = alive || !next.back().empty();
                        }
                        if (!alive) continue;
                        auto it = h.index.find(next);
                        int to;
                        if (it == h.index.end()) {
                            to = static_cast<int>(h.states.size());
                            h.index[next] = to;
                            h.states.push_back(std::move(next));
                            h.processed.push_back(0);
                            h.parent.push_back({static_cast<int>(s), t});
                            h.delta.emplace_back();
                            record(label, h, to, changed);
                        } else {
                            to = it->second;
                        }
                        h.delta[s][t] = to;
                        changed = true;
                    }
                }
            }
        }
    }
};

bool accepts_root(const TreeGrammar& g, const std::set<Symbol>& acc) {
    for (auto& r : g.roots)
        if (acc.count(r)) return true;
    return false;
}

}  // namespace

TreeTypes explore_types(const std::vector<const TreeGrammar*>& gs) {
    Explorer ex(gs);
    ex.run();
    return std::move(ex.result);
}

Duta determinize_uta(const Nuta& u) {
    TreeGrammar g;
    for (auto& [name, d] : u.delta) g.rules[name] = ContentModel{d.second, std::nullopt};
    g.roots = u.finals;
    Explorer ex({&g});
    ex.run();
    Duta out;
    for (auto& t : ex.result.types) out.states.push_back({t.label, t.accept[0]});
    for (std::size_t i = 0; i < out.states.size(); ++i)
        if (accepts_root(g, out.states[i].names)) out.finals.insert(static_cast<int>(i));
    for (auto& [label, h] : ex.horizon) {
        Dfa d;
        d.out.clear();
        d.final.clear();
        d.label.clear();
        std::vector<int> tgt;
        for (std::size_t s = 0; s < h.states.size(); ++s) {
            auto acc = ex.accept_of(h, static_cast<int>(s));
            auto it = ex.type_index.find({label, acc});
            int t = it == ex.type_index.end() ? -1 : it->second;
            d.add_state(t >= 0);
            tgt.push_back(t);
        }
        for (std::size_t s = 0; s < h.states.size(); ++s)
            for (auto& [t, to] : h.delta[s]) d.add_edge(static_cast<int>(s), std::to_string(t), to);
        out.horizontal[label] = std::move(d);
        out.target[label] = std::move(tgt);
    }
    return out;
}

TreeGrammar normalize(const TreeGrammar& g) {
    Duta d = determinize_uta(to_uta(g));
    // Name every Duta state label#k, numbering per label.
    std::vector<Symbol> names(d.states.size());
    std::map<Symbol, int> counter;
    for (std::size_t i = 0; i < d.states.size(); ++i)
        names[i] = d.states[i].label + "#" + std::to_string(++counter[d.states[i].label]);
    std::map<Symbol, Symbol> rename;
    for (std::size_t i = 0; i < names.size(); ++i) rename[std::to_string(i)] = names[i];
    TreeGrammar r;
    r.cls = GrammarClass::Edtd;
    r.mech = Mechanism::Nfa;
    for (std::size_t i = 0; i < d.states.size(); ++i) {
        const Symbol& label = d.states[i].label;
        Dfa h = d.horizontal.at(label);
        const auto& tgt = d.target.at(label);
        for (int s = 0; s < h.size(); ++s) h.final[s] = tgt[s] == static_cast<int>(i);
        r.set_content(names[i], minimal_trim(rename_symbols(h, rename)));
    }
    for (int f : d.finals) r.roots.insert(names[f]);
    r = reduce(r);
    if (g.mech != Mechanism::Nfa) r = with_mechanism(r, g.mech);
    return r;
}

// ------------------------------------------------------------- equivalence

std::optional<UTree> grammar_counterexample(const TreeGrammar& a, const TreeGrammar& b) {
    auto tt = explore_types({&a, &b});
    for (auto& t : tt.types)
        if (accepts_root(a, t.accept[0]) && !accepts_root(b, t.accept[1])) return t.witness;
    return std::nullopt;
}

bool includes_grammar(const TreeGrammar& a, const TreeGrammar& b) { return !grammar_counterexample(a, b); }

bool equivalent_grammar(const TreeGrammar& a, const TreeGrammar& b) {
    if (a.cls == GrammarClass::Dtd && b.cls == GrammarClass::Dtd) {
        // Same root, same names, equivalent content per name (both reduced).
        if (a.roots != b.roots || a.names() != b.names()) return false;
        for (auto& n : a.names())
            if (!equivalent(a.content(n), b.content(n))) return false;
        return true;
    }
    auto tt = explore_types({&a, &b});
    for (auto& t : tt.types)
        if (accepts_root(a, t.accept[0]) != accepts_root(b, t.accept[1])) return false;
    return true;
}

bool grammar_empty(const TreeGrammar& g) {
    for (auto& r : g.roots)
        if (mark_bound(g).count(r)) return false;
    return true;
}

bool same_subtree_language(const TreeGrammar& ga, const Symbol& na, const TreeGrammar& gb, const Symbol& nb) {
    if (TreeGrammar::base(na) != TreeGrammar::base(nb)) return false;
    auto tt = explore_types({&ga, &gb});
    for (auto& t : tt.types)
        if ((t.accept[0].count(na) > 0) != (t.accept[1].count(nb) > 0)) return false;
    return true;
}

// ------------------------------------------------------------- closures

TreeGrammar single_type_closure(const TreeGrammar& g0) {
    TreeGrammar g = reduce(g0);
    std::map<std::set<Symbol>, Symbol> id;
    std::vector<std::set<Symbol>> work;
    std::map<Symbol, int> counter;
    auto name_of = [&](const std::set<Symbol>& s) {
        auto it = id.find(s);
        if (it != id.end()) return it->second;
        Symbol label = TreeGrammar::base(*s.begin());
        Symbol n = label + "#" + std::to_string(++counter[label]);
        id[s] = n;
        work.push_back(s);
        return n;
    };
    TreeGrammar r;
    r.cls = GrammarClass::Sdtd;
    r.mech = Mechanism::Nfa;
    std::map<Symbol, std::set<Symbol>> roots_by_label;
    for (auto& s : g.roots) roots_by_label[TreeGrammar::base(s)].insert(s);
    for (auto& [_, s] : roots_by_label) r.roots.insert(name_of(s));
    for (std::size_t i = 0; i < work.size(); ++i) {
        std::set<Symbol> cur = work[i];
        Symbol me = id[cur];
        std::map<Symbol, std::set<Symbol>> child;
        std::vector<Nfa> parts;
        for (auto& n : cur) {
            parts.push_back(g.content(n));
            for (auto& b : useful_symbols(g.content(n))) child[TreeGrammar::base(b)].insert(b);
        }
        std::map<Symbol, Symbol> rename;
        for (auto& [label, set] : child) {
            Symbol cn = name_of(set);
            for (auto& b : set) rename[b] = cn;
        }
        r.set_content(me, rename_symbols(unite_all(parts), rename));
    }
    return r;
}

TreeGrammar dtd_closure(const TreeGrammar& g0) {
    TreeGrammar g = reduce(g0);
    TreeGrammar r;
    r.cls = GrammarClass::Dtd;
    r.mech = Mechanism::Nfa;
    std::map<Symbol, Symbol> mu;
    for (auto& n : g.names()) mu[n] = TreeGrammar::base(n);
    std::map<Symbol, std::vector<Nfa>> parts;
    for (auto& n : g.names()) parts[TreeGrammar::base(n)].push_back(rename_symbols(g.content(n), mu));
    for (auto& [label, p] : parts) r.set_content(label, unite_all(p));
    for (auto& s : g.roots) r.roots.insert(TreeGrammar::base(s));
    return r;
}

TreeGrammar with_mechanism(const TreeGrammar& g, Mechanism mech, std::size_t max_regex_nodes) {
    TreeGrammar r = g;
    r.mech = mech;
    for (auto& [name, cm] : r.rules) {
        switch (mech) {
            case Mechanism::Nfa: cm.regex.reset(); break;
            case Mechanism::Dfa:
                cm.nfa = minimal_trim(cm.nfa);
                cm.regex.reset();
                break;
            case Mechanism::Nre:
                if (!cm.regex) cm.regex = to_regex(cm.nfa);
                break;
            case Mechanism::Dre:
                if (cm.regex && is_dre(*cm.regex)) break;
                {
                    auto d = to_dre(cm.nfa, max_regex_nodes);
                    if (!d) throw NotRepresentable("content model of " + name + " is not one-unambiguous");
                    cm.regex = *d;
                    cm.nfa = to_nfa(*d);
                }
                break;
        }
    }
    return r;
}

}  // namespace dxd
