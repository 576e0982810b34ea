#pragma once

// Reference implementations used only by the tests. They share the data
// types of the library but none of its algorithms: regex membership goes
// through derivatives, automata are simulated state set by state set, and
// tree validation tries every assignment of names.

#include <algorithm>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "dxd/automata.hpp"
#include "dxd/document.hpp"
#include "dxd/regex.hpp"
#include "dxd/schema.hpp"

namespace oracle {

using dxd::Nfa;
using dxd::Regex;
using dxd::RegexPtr;
using dxd::Symbol;
using dxd::UTree;
using dxd::Word;

inline bool accepts_empty(const RegexPtr& r) {
    switch (r->kind) {
        case Regex::Kind::Epsilon: return true;
        case Regex::Kind::Empty: return false;
        case Regex::Kind::Sym: return false;
        case Regex::Kind::Concat: return accepts_empty(r->left) && accepts_empty(r->right);
        case Regex::Kind::Alt: return accepts_empty(r->left) || accepts_empty(r->right);
        case Regex::Kind::Opt: return true;
        case Regex::Kind::Plus: return accepts_empty(r->left);
        case Regex::Kind::Star: return true;
    }
    return false;
}

inline bool is_empty_node(const RegexPtr& r) { return r->kind == Regex::Kind::Empty; }

inline RegexPtr cat(RegexPtr a, RegexPtr b) {
    if (is_empty_node(a) || is_empty_node(b)) return Regex::empty();
    if (a->kind == Regex::Kind::Epsilon) return b;
    if (b->kind == Regex::Kind::Epsilon) return a;
    return Regex::concat(a, b);
}

inline RegexPtr alt(RegexPtr a, RegexPtr b) {
    if (is_empty_node(a)) return b;
    if (is_empty_node(b)) return a;
    return Regex::alt(a, b);
}

// Brzozowski derivative by one symbol.
inline RegexPtr deriv(const RegexPtr& r, const Symbol& s) {
    switch (r->kind) {
        case Regex::Kind::Epsilon:
        case Regex::Kind::Empty: return Regex::empty();
        case Regex::Kind::Sym: return r->sym == s ? Regex::eps() : Regex::empty();
        case Regex::Kind::Concat: {
            RegexPtr d = cat(deriv(r->left, s), r->right);
            return accepts_empty(r->left) ? alt(d, deriv(r->right, s)) : d;
        }
        case Regex::Kind::Alt: return alt(deriv(r->left, s), deriv(r->right, s));
        case Regex::Kind::Opt: return deriv(r->left, s);
        case Regex::Kind::Plus:
        case Regex::Kind::Star: return cat(deriv(r->left, s), Regex::unary(Regex::Kind::Star, r->left));
    }
    return Regex::empty();
}

inline bool matches(RegexPtr r, const Word& w) {
    for (auto& s : w) {
        r = deriv(r, s);
        if (is_empty_node(r)) return false;
    }
    return accepts_empty(r);
}

// Plain subset simulation of an automaton with epsilon edges.
inline bool simulate(const Nfa& a, const Word& w) {
    auto close = [&](std::set<int> s) {
        std::vector<int> todo(s.begin(), s.end());
        while (!todo.empty()) {
            int q = todo.back();
            todo.pop_back();
            for (auto& e : a.out[q])
                if (e.sym.empty() && s.insert(e.to).second) todo.push_back(e.to);
        }
        return s;
    };
    std::set<int> cur = close({a.initial});
    for (auto& sym : w) {
        std::set<int> next;
        for (int q : cur)
            for (auto& e : a.out[q])
                if (e.sym == sym) next.insert(e.to);
        cur = close(next);
        if (cur.empty()) return false;
    }
    for (int q : cur)
        if (a.final[q]) return true;
    return false;
}

inline std::vector<Word> all_words(const std::vector<Symbol>& alphabet, std::size_t max_len) {
    std::vector<Word> out{{}};
    std::size_t from = 0;
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::size_t to = out.size();
        for (std::size_t i = from; i < to; ++i)
            for (auto& s : alphabet) {
                Word w = out[i];
                w.push_back(s);
                out.push_back(std::move(w));
            }
        from = to;
    }
    return out;
}

inline std::set<Word> language_upto(const Nfa& a, const std::vector<Symbol>& alphabet, std::size_t max_len) {
    std::set<Word> out;
    for (auto& w : all_words(alphabet, max_len))
        if (simulate(a, w)) out.insert(w);
    return out;
}

inline std::set<Word> language_upto(const RegexPtr& r, const std::vector<Symbol>& alphabet, std::size_t max_len) {
    std::set<Word> out;
    for (auto& w : all_words(alphabet, max_len))
        if (matches(r, w)) out.insert(w);
    return out;
}

// ---------------------------------------------------------------- random input

inline RegexPtr random_regex(std::mt19937& rng, const std::vector<Symbol>& alphabet, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 7);
    int c = pick(rng);
    auto leaf = [&] {
        std::uniform_int_distribution<std::size_t> s(0, alphabet.size() - 1);
        return Regex::symbol(alphabet[s(rng)]);
    };
    switch (c) {
        case 0:
        case 1: return leaf();
        case 2:
        case 3: return Regex::concat(random_regex(rng, alphabet, depth - 1), random_regex(rng, alphabet, depth - 1));
        case 4: return Regex::alt(random_regex(rng, alphabet, depth - 1), random_regex(rng, alphabet, depth - 1));
        case 5: return Regex::unary(Regex::Kind::Star, random_regex(rng, alphabet, depth - 1));
        case 6: return Regex::unary(Regex::Kind::Opt, random_regex(rng, alphabet, depth - 1));
        default: return Regex::unary(Regex::Kind::Plus, random_regex(rng, alphabet, depth - 1));
    }
}

// Random automaton with up to `states` states; may contain epsilon edges.
inline Nfa random_nfa(std::mt19937& rng, const std::vector<Symbol>& alphabet, int states, double density = 0.3) {
    Nfa a;
    std::bernoulli_distribution fin(0.35), edge(density), eps(0.05);
    a.final[0] = fin(rng);  // the constructor already made state 0
    for (int q = 1; q < states; ++q) a.add_state(fin(rng));
    a.initial = 0;
    for (int p = 0; p < states; ++p)
        for (int q = 0; q < states; ++q) {
            for (auto& s : alphabet)
                if (edge(rng)) a.add_edge(p, s, q);
            if (p != q && eps(rng)) a.add_edge(p, dxd::kEpsilon, q);
        }
    return a;
}

inline UTree random_tree(std::mt19937& rng, const std::vector<Symbol>& labels, std::size_t max_nodes) {
    std::uniform_int_distribution<std::size_t> lab(0, labels.size() - 1);
    UTree root{labels[lab(rng)], {}};
    std::size_t count = 1;
    std::vector<UTree*> nodes{&root};
    std::uniform_int_distribution<std::size_t> target(1, max_nodes);
    std::size_t want = target(rng);
    while (count < want) {
        std::uniform_int_distribution<std::size_t> which(0, nodes.size() - 1);
        UTree* p = nodes[which(rng)];
        p->children.push_back(UTree{labels[lab(rng)], {}});
        ++count;
        // Rebuild pointers: push_back may move siblings.
        nodes.clear();
        std::function<void(UTree&)> collect = [&](UTree& t) {
            nodes.push_back(&t);
            for (auto& c : t.children) collect(c);
        };
        collect(root);
    }
    return root;
}

// A random tree of L(g) rooted at `name`, built from short words of the
// content models; absent when the depth budget runs out.
inline std::optional<UTree> sample_tree(const dxd::TreeGrammar& g, const Symbol& name, std::mt19937& rng, int depth,
                                        std::size_t max_width = 3) {
    if (depth < 0) return std::nullopt;
    auto words = dxd::words_up_to(g.content(name), max_width);
    if (words.empty()) return std::nullopt;
    std::shuffle(words.begin(), words.end(), rng);
    for (auto& w : words) {
        UTree t{dxd::TreeGrammar::base(name), {}};
        bool ok = true;
        for (auto& child : w) {
            auto c = sample_tree(g, child, rng, depth - 1, max_width);
            if (!c) {
                ok = false;
                break;
            }
            t.children.push_back(std::move(*c));
        }
        if (ok) return t;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------- trees

// Names that can label `t` in g, by trying every combination of child names.
inline std::set<Symbol> brute_names(const UTree& t, const dxd::TreeGrammar& g) {
    std::vector<std::vector<Symbol>> options;
    for (auto& c : t.children) {
        auto s = brute_names(c, g);
        if (s.empty()) return {};
        options.emplace_back(s.begin(), s.end());
    }
    std::set<Symbol> out;
    for (auto& [name, cm] : g.rules) {
        if (dxd::TreeGrammar::base(name) != t.label) continue;
        std::vector<std::size_t> pos(options.size(), 0);
        while (true) {
            Word w;
            for (std::size_t i = 0; i < options.size(); ++i) w.push_back(options[i][pos[i]]);
            if (simulate(cm.nfa, w)) {
                out.insert(name);
                break;
            }
            std::size_t i = options.size();
            bool done = true;
            while (i > 0) {
                --i;
                if (++pos[i] < options[i].size()) {
                    done = false;
                    break;
                }
                pos[i] = 0;
            }
            if (done) break;
        }
    }
    return out;
}

inline bool brute_validate(const UTree& t, const dxd::TreeGrammar& g) {
    for (auto& n : brute_names(t, g))
        if (g.roots.count(n)) return true;
    return false;
}

// All trees over `labels` with at most `max_nodes` nodes.
inline std::vector<UTree> all_trees(const std::vector<Symbol>& labels, std::size_t max_nodes) {
    // forests[n] = all ordered forests with exactly n nodes.
    std::vector<std::vector<std::vector<UTree>>> forests(max_nodes + 1);
    forests[0] = {{}};
    std::vector<std::vector<UTree>> trees(max_nodes + 1);
    for (std::size_t n = 1; n <= max_nodes; ++n) {
        for (auto& l : labels)
            for (auto& f : forests[n - 1]) trees[n].push_back(UTree{l, f});
        for (std::size_t first = 1; first <= n; ++first)
            for (auto& t : trees[first])
                for (auto& rest : forests[n - first]) {
                    std::vector<UTree> f{t};
                    f.insert(f.end(), rest.begin(), rest.end());
                    forests[n].push_back(std::move(f));
                }
    }
    std::vector<UTree> out;
    for (std::size_t n = 1; n <= max_nodes; ++n) out.insert(out.end(), trees[n].begin(), trees[n].end());
    return out;
}

}  // namespace oracle
