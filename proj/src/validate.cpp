#include "dxd/validate.hpp"

#include <functional>

namespace dxd {

namespace {

// Runs `a` over a sequence of symbol sets: at step i any member of sets[i]
// may be read.
bool accepts_sets(const Nfa& a, const std::vector<const std::set<Symbol>*>& sets) {
    std::set<int> cur = epsilon_closure(a, {a.initial});
    for (auto* s : sets) {
        std::set<int> next;
        for (int q : cur)
            for (auto& e : a.out[q])
                if (!e.sym.empty() && s->count(e.sym)) next.insert(e.to);
        cur = epsilon_closure(a, next);
        if (cur.empty()) return false;
    }
    for (int q : cur)
        if (a.final[q]) return true;
    return false;
}

std::set<Symbol> run(const UTree& t, const TreeGrammar& g, std::string path, std::optional<std::string>* violation) {
    std::vector<std::set<Symbol>> kids;
    kids.reserve(t.children.size());
    for (std::size_t i = 0; i < t.children.size(); ++i) {
        const UTree& c = t.children[i];
        kids.push_back(run(c, g, path + "/" + c.label + "[" + std::to_string(i) + "]", violation));
    }
    std::vector<const std::set<Symbol>*> ptrs;
    for (auto& k : kids) ptrs.push_back(&k);
    std::set<Symbol> here;
    for (auto& n : g.specializations(t.label))
        if (accepts_sets(g.content(n), ptrs)) here.insert(n);
    if (here.empty() && violation && !*violation) {
        bool kids_ok = true;
        for (auto& k : kids) kids_ok = kids_ok && !k.empty();
        if (kids_ok) *violation = path.empty() ? "/" : path;
    }
    return here;
}

}  // namespace

std::set<Symbol> root_names(const UTree& t, const TreeGrammar& g) { return run(t, g, "/" + t.label, nullptr); }

bool validate(const UTree& t, const TreeGrammar& g) {
    for (auto& n : root_names(t, g))
        if (g.roots.count(n)) return true;
    return false;
}

std::optional<std::string> first_violation(const UTree& t, const TreeGrammar& g) {
    std::optional<std::string> v;
    auto names = run(t, g, "/" + t.label, &v);
    for (auto& n : names)
        if (g.roots.count(n)) return std::nullopt;
    if (v) return v;
    return "/" + t.label + " (root label not allowed)";
}

std::optional<UTree> witness(const UTree& t, const TreeGrammar& g) {
    std::optional<Symbol> root;
    for (auto& r : g.roots)
        if (TreeGrammar::base(r) == t.label) root = r;
    if (!root) return std::nullopt;
    bool ok = true;
    std::function<UTree(const UTree&, const Symbol&)> walk = [&](const UTree& node, const Symbol& name) {
        UTree w{name, {}};
        const Nfa& a = g.content(name);
        auto syms = useful_symbols(a);
        Word spec;
        for (auto& c : node.children) {
            std::optional<Symbol> pick;
            for (auto& s : syms)
                if (TreeGrammar::base(s) == c.label) pick = s;
            if (!pick) {
                ok = false;
                return w;
            }
            spec.push_back(*pick);
            w.children.push_back(walk(c, *pick));
            if (!ok) return w;
        }
        if (!accepts(a, spec)) ok = false;
        return w;
    };
    UTree w = walk(t, *root);
    if (!ok) return std::nullopt;
    return w;
}

}  // namespace dxd
