#include "dxd/automata.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace dxd {

int Nfa::add_state(bool is_final, int lab) {
    out.emplace_back();
    final.push_back(is_final);
    label.push_back(lab);
    return size() - 1;
}

void Nfa::add_edge(int from, const Symbol& sym, int to) {
    Edge e{sym, to};
    auto& v = out[from];
    if (std::find(v.begin(), v.end(), e) == v.end()) v.push_back(std::move(e));
    if (!sym.empty()) alphabet.insert(sym);
}

std::set<int> Nfa::finals() const {
    std::set<int> f;
    for (int q = 0; q < size(); ++q)
        if (final[q]) f.insert(q);
    return f;
}

std::size_t Nfa::edge_count() const {
    std::size_t n = 0;
    for (auto& v : out) n += v.size();
    return n;
}

BoxLang BoxLang::of_word(const Word& w) {
    BoxLang b;
    for (auto& s : w) b.cells.push_back({s});
    return b;
}

Nfa empty_language() { return Nfa{}; }

Nfa epsilon_language() {
    Nfa a;
    a.final[0] = true;
    return a;
}

Nfa symbol_language(const Symbol& s) { return word_language({s}); }

Nfa word_language(const Word& w) {
    Nfa a;
    int cur = 0;
    for (auto& s : w) {
        int nxt = a.add_state();
        a.add_edge(cur, s, nxt);
        cur = nxt;
    }
    a.final[cur] = true;
    return a;
}

Nfa box_language(const BoxLang& b) {
    Nfa a;
    int cur = 0;
    for (auto& cell : b.cells) {
        int nxt = a.add_state();
        for (auto& s : cell) a.add_edge(cur, s, nxt);
        cur = nxt;
    }
    a.final[cur] = true;
    return a;
}

Nfa universal_language(const std::set<Symbol>& over) {
    Nfa a;
    a.final[0] = true;
    for (auto& s : over) a.add_edge(0, s, 0);
    a.alphabet = over;
    return a;
}

std::set<int> epsilon_closure(const Nfa& a, const std::set<int>& states) {
    std::set<int> seen = states;
    std::vector<int> stack(states.begin(), states.end());
    while (!stack.empty()) {
        int q = stack.back();
        stack.pop_back();
        for (auto& e : a.out[q])
            if (e.sym.empty() && seen.insert(e.to).second) stack.push_back(e.to);
    }
    return seen;
}

namespace {

std::set<int> step(const Nfa& a, const std::set<int>& states, const Symbol& s) {
    std::set<int> next;
    for (int q : states)
        for (auto& e : a.out[q])
            if (e.sym == s) next.insert(e.to);
    return epsilon_closure(a, next);
}

bool any_final(const Nfa& a, const std::set<int>& states) {
    for (int q : states)
        if (a.final[q]) return true;
    return false;
}

// Copies the states of `src` into `dst`, returning the index offset.
int embed(Nfa& dst, const Nfa& src, bool keep_finals) {
    int off = dst.size();
    for (int q = 0; q < src.size(); ++q) dst.add_state(keep_finals && src.final[q], src.label[q]);
    for (int q = 0; q < src.size(); ++q)
        for (auto& e : src.out[q]) dst.add_edge(q + off, e.sym, e.to + off);
    dst.alphabet.insert(src.alphabet.begin(), src.alphabet.end());
    return off;
}

}  // namespace

bool accepts(const Nfa& a, const Word& w) {
    std::set<int> cur = epsilon_closure(a, {a.initial});
    for (auto& s : w) {
        if (s.empty()) return false;
        cur = step(a, cur, s);
        if (cur.empty()) return false;
    }
    return any_final(a, cur);
}

bool has_epsilon(const Nfa& a) {
    for (auto& v : a.out)
        for (auto& e : v)
            if (e.sym.empty()) return true;
    return false;
}

bool is_deterministic(const Nfa& a) {
    for (auto& v : a.out) {
        std::set<Symbol> seen;
        for (auto& e : v)
            if (e.sym.empty() || !seen.insert(e.sym).second) return false;
    }
    return true;
}

Nfa remove_epsilon(const Nfa& a) {
    if (!has_epsilon(a)) return a;
    Nfa r;
    r.out.clear();
    r.final.clear();
    r.label.clear();
    for (int q = 0; q < a.size(); ++q) r.add_state(false, a.label[q]);
    r.initial = a.initial;
    for (int q = 0; q < a.size(); ++q) {
        auto cl = epsilon_closure(a, {q});
        r.final[q] = any_final(a, cl);
        for (int p : cl)
            for (auto& e : a.out[p])
                if (!e.sym.empty()) r.add_edge(q, e.sym, e.to);
    }
    r.alphabet = a.alphabet;
    return r;
}

std::vector<bool> reachable_states(const Nfa& a) {
    std::vector<bool> seen(a.size(), false);
    std::vector<int> stack{a.initial};
    seen[a.initial] = true;
    while (!stack.empty()) {
        int q = stack.back();
        stack.pop_back();
        for (auto& e : a.out[q])
            if (!seen[e.to]) {
                seen[e.to] = true;
                stack.push_back(e.to);
            }
    }
    return seen;
}

std::vector<bool> coreachable_states(const Nfa& a) {
    std::vector<std::vector<int>> rev(a.size());
    for (int q = 0; q < a.size(); ++q)
        for (auto& e : a.out[q]) rev[e.to].push_back(q);
    std::vector<bool> seen(a.size(), false);
    std::vector<int> stack;
    for (int q = 0; q < a.size(); ++q)
        if (a.final[q]) {
            seen[q] = true;
            stack.push_back(q);
        }
    while (!stack.empty()) {
        int q = stack.back();
        stack.pop_back();
        for (int p : rev[q])
            if (!seen[p]) {
                seen[p] = true;
                stack.push_back(p);
            }
    }
    return seen;
}

Nfa trim(const Nfa& a) {
    auto fw = reachable_states(a);
    auto bw = coreachable_states(a);
    if (!(fw[a.initial] && bw[a.initial])) {
        Nfa e;
        e.alphabet = a.alphabet;
        return e;
    }
    std::vector<int> idx(a.size(), -1);
    Nfa r;
    r.out.clear();
    r.final.clear();
    r.label.clear();
    // Keep the initial state first so that state 0 is always initial.
    std::vector<int> order{a.initial};
    for (int q = 0; q < a.size(); ++q)
        if (q != a.initial) order.push_back(q);
    for (int q : order)
        if (fw[q] && bw[q]) idx[q] = r.add_state(a.final[q], a.label[q]);
    r.initial = 0;
    for (int q = 0; q < a.size(); ++q) {
        if (idx[q] < 0) continue;
        for (auto& e : a.out[q])
            if (idx[e.to] >= 0) r.add_edge(idx[q], e.sym, idx[e.to]);
    }
    r.alphabet = a.alphabet;
    return r;
}

std::optional<Word> shortest_word(const Nfa& a) {
    // BFS over single states is enough: any accepting path witnesses a word.
    std::vector<int> parent(a.size(), -2);
    std::vector<const Symbol*> via(a.size(), nullptr);
    std::deque<int> queue{a.initial};
    parent[a.initial] = -1;
    // Epsilon edges are explored with priority (0-1 BFS) so the word is shortest.
    while (!queue.empty()) {
        int q = queue.front();
        queue.pop_front();
        if (a.final[q]) {
            Word w;
            for (int c = q; parent[c] != -1; c = parent[c])
                if (!via[c]->empty()) w.push_back(*via[c]);
            std::reverse(w.begin(), w.end());
            return w;
        }
        for (auto& e : a.out[q]) {
            if (parent[e.to] != -2) continue;
            parent[e.to] = q;
            via[e.to] = &e.sym;
            if (e.sym.empty())
                queue.push_front(e.to);
            else
                queue.push_back(e.to);
        }
    }
    return std::nullopt;
}

bool is_empty(const Nfa& a) { return !shortest_word(a).has_value(); }

std::vector<Word> words_up_to(const Nfa& a, std::size_t max_len) {
    std::set<std::pair<std::size_t, Word>> found;
    std::vector<std::pair<Word, std::set<int>>> layer{{Word{}, epsilon_closure(a, {a.initial})}};
    for (std::size_t len = 0;; ++len) {
        std::vector<std::pair<Word, std::set<int>>> next;
        for (auto& [w, st] : layer) {
            if (any_final(a, st)) found.insert({w.size(), w});
            if (len == max_len) continue;
            std::set<Symbol> syms;
            for (int q : st)
                for (auto& e : a.out[q])
                    if (!e.sym.empty()) syms.insert(e.sym);
            for (auto& s : syms) {
                auto n = step(a, st, s);
                if (n.empty()) continue;
                Word w2 = w;
                w2.push_back(s);
                next.push_back({std::move(w2), std::move(n)});
            }
        }
        if (len == max_len || next.empty()) break;
        layer = std::move(next);
    }
    std::vector<Word> res;
    for (auto& [_, w] : found) res.push_back(w);
    return res;
}

std::set<Symbol> useful_symbols(const Nfa& a) {
    Nfa t = trim(a);
    std::set<Symbol> s;
    for (auto& v : t.out)
        for (auto& e : v)
            if (!e.sym.empty()) s.insert(e.sym);
    return s;
}

Nfa concat(const Nfa& a, const Nfa& b) {
    Nfa r = a;
    int off = embed(r, b, true);
    for (int q = 0; q < a.size(); ++q)
        if (a.final[q]) {
            r.final[q] = false;
            r.add_edge(q, kEpsilon, b.initial + off);
        }
    return r;
}

Nfa unite(const Nfa& a, const Nfa& b) {
    Nfa r;  // fresh initial state 0
    int oa = embed(r, a, true);
    int ob = embed(r, b, true);
    r.add_edge(0, kEpsilon, a.initial + oa);
    r.add_edge(0, kEpsilon, b.initial + ob);
    return r;
}

Nfa intersect(const Nfa& a0, const Nfa& b0) {
    Nfa a = remove_epsilon(a0), b = remove_epsilon(b0);
    Nfa r;
    std::map<std::pair<int, int>, int> id;
    std::vector<std::pair<int, int>> work{{a.initial, b.initial}};
    id[{a.initial, b.initial}] = 0;
    r.final[0] = a.final[a.initial] && b.final[b.initial];
    while (!work.empty()) {
        auto [p, q] = work.back();
        work.pop_back();
        int from = id[{p, q}];
        for (auto& ea : a.out[p])
            for (auto& eb : b.out[q]) {
                if (ea.sym != eb.sym) continue;
                auto key = std::make_pair(ea.to, eb.to);
                auto it = id.find(key);
                int to;
                if (it == id.end()) {
                    to = r.add_state(a.final[ea.to] && b.final[eb.to]);
                    id[key] = to;
                    work.push_back(key);
                } else {
                    to = it->second;
                }
                r.add_edge(from, ea.sym, to);
            }
    }
    r.alphabet = a.alphabet;
    r.alphabet.insert(b.alphabet.begin(), b.alphabet.end());
    return r;
}

Nfa complement(const Nfa& a, const std::set<Symbol>& over) {
    std::set<Symbol> universe = over;
    universe.insert(a.alphabet.begin(), a.alphabet.end());
    Dfa d = determinize(a, &universe);
    for (int q = 0; q < d.size(); ++q) d.final[q] = !d.final[q];
    d.alphabet = universe;
    return d;
}

Nfa difference(const Nfa& a, const Nfa& b) {
    std::set<Symbol> universe = a.alphabet;
    universe.insert(b.alphabet.begin(), b.alphabet.end());
    return intersect(a, complement(b, universe));
}

Nfa compose(ComposeOp op, const Nfa& a, const Nfa& b) {
    switch (op) {
        case ComposeOp::Concat: return concat(a, b);
        case ComposeOp::Union: return unite(a, b);
        case ComposeOp::Intersect: return intersect(a, b);
        case ComposeOp::Difference: return difference(a, b);
    }
    return a;
}

Nfa star(const Nfa& a) {
    Nfa r;
    r.final[0] = true;
    int off = embed(r, a, true);
    r.add_edge(0, kEpsilon, a.initial + off);
    for (int q = 0; q < a.size(); ++q)
        if (a.final[q]) r.add_edge(q + off, kEpsilon, 0);
    return r;
}

Nfa concat_all(const std::vector<Nfa>& parts) {
    Nfa r = epsilon_language();
    for (auto& p : parts) r = concat(r, p);
    return r;
}

Nfa unite_all(const std::vector<Nfa>& parts) {
    Nfa r;
    for (auto& p : parts) {
        int off = embed(r, p, true);
        r.add_edge(0, kEpsilon, p.initial + off);
    }
    return r;
}

Nfa rename_symbols(const Nfa& a, const std::map<Symbol, Symbol>& map) {
    Nfa r = a;
    r.alphabet.clear();
    for (auto& v : r.out) {
        std::vector<Edge> nv;
        for (auto& e : v) {
            Edge n = e;
            if (!e.sym.empty()) {
                auto it = map.find(e.sym);
                if (it != map.end()) n.sym = it->second;
            }
            if (std::find(nv.begin(), nv.end(), n) == nv.end()) nv.push_back(n);
        }
        v = std::move(nv);
    }
    for (auto& s : a.alphabet) {
        auto it = map.find(s);
        r.alphabet.insert(it == map.end() ? s : it->second);
    }
    return r;
}

Nfa substitute(const Nfa& a, const std::map<Symbol, Nfa>& map) {
    Nfa r;
    r.out.clear();
    r.final.clear();
    r.label.clear();
    for (int q = 0; q < a.size(); ++q) r.add_state(a.final[q], a.label[q]);
    r.initial = a.initial;
    for (int q = 0; q < a.size(); ++q)
        for (auto& e : a.out[q]) {
            auto it = e.sym.empty() ? map.end() : map.find(e.sym);
            if (it == map.end()) {
                r.add_edge(q, e.sym, e.to);
                continue;
            }
            const Nfa& sub = it->second;
            int off = embed(r, sub, false);
            r.add_edge(q, kEpsilon, sub.initial + off);
            for (int p = 0; p < sub.size(); ++p)
                if (sub.final[p]) r.add_edge(p + off, kEpsilon, e.to);
        }
    for (auto& s : a.alphabet)
        if (!map.count(s)) r.alphabet.insert(s);
    return r;
}

Nfa without_symbols(const Nfa& a, const std::set<Symbol>& drop) {
    Nfa r = a;
    for (auto& v : r.out)
        v.erase(std::remove_if(v.begin(), v.end(), [&](const Edge& e) { return drop.count(e.sym) > 0; }), v.end());
    for (auto& s : drop) r.alphabet.erase(s);
    return r;
}

Dfa determinize(const Nfa& a, const std::set<Symbol>* complete_over) {
    std::set<Symbol> sigma = a.alphabet;
    if (complete_over) sigma.insert(complete_over->begin(), complete_over->end());
    Dfa d;
    std::map<std::set<int>, int> id;
    std::vector<std::set<int>> subsets;
    auto start = epsilon_closure(a, {a.initial});
    id[start] = 0;
    subsets.push_back(start);
    d.final[0] = any_final(a, start);
    int sink = -1;
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        std::map<Symbol, std::set<int>> moves;
        for (int q : subsets[i])
            for (auto& e : a.out[q])
                if (!e.sym.empty()) moves[e.sym].insert(e.to);
        for (auto& s : sigma) {
            auto it = moves.find(s);
            if (it == moves.end()) {
                if (!complete_over) continue;
                if (sink < 0) {
                    sink = d.add_state(false);
                    subsets.push_back({});  // keeps indices aligned
                    for (auto& t : sigma) d.add_edge(sink, t, sink);
                }
                d.add_edge(static_cast<int>(i), s, sink);
                continue;
            }
            auto cl = epsilon_closure(a, it->second);
            auto f = id.find(cl);
            int to;
            if (f == id.end()) {
                to = d.add_state(any_final(a, cl));
                id[cl] = to;
                subsets.push_back(cl);
            } else {
                to = f->second;
            }
            d.add_edge(static_cast<int>(i), s, to);
        }
    }
    d.alphabet = sigma;
    return d;
}

Dfa minimize(const Nfa& a) {
    std::set<Symbol> sigma = a.alphabet;
    Dfa d = determinize(a, &sigma);
    std::vector<Symbol> syms(sigma.begin(), sigma.end());
    int n = d.size();
    // Transition table.
    std::vector<std::vector<int>> delta(n, std::vector<int>(syms.size(), -1));
    for (int q = 0; q < n; ++q)
        for (auto& e : d.out[q]) {
            auto k = std::lower_bound(syms.begin(), syms.end(), e.sym) - syms.begin();
            delta[q][k] = e.to;
        }
    // Moore refinement.
    std::vector<int> cls(n);
    for (int q = 0; q < n; ++q) cls[q] = d.final[q] ? 1 : 0;
    int classes = 0;
    while (true) {
        std::map<std::vector<int>, int> sig;
        std::vector<int> next(n);
        for (int q = 0; q < n; ++q) {
            std::vector<int> key{cls[q]};
            for (std::size_t k = 0; k < syms.size(); ++k) key.push_back(cls[delta[q][k]]);
            auto it = sig.find(key);
            if (it == sig.end()) it = sig.emplace(key, static_cast<int>(sig.size())).first;
            next[q] = it->second;
        }
        int count = static_cast<int>(sig.size());
        cls = std::move(next);
        if (count == classes) break;
        classes = count;
    }
    // Renumber so that the initial class is state 0.
    std::vector<int> remap(classes, -1);
    Dfa m;
    m.out.clear();
    m.final.clear();
    m.label.clear();
    std::vector<int> order{d.initial};
    for (int q = 0; q < n; ++q)
        if (q != d.initial) order.push_back(q);
    for (int q : order)
        if (remap[cls[q]] < 0) remap[cls[q]] = m.add_state(d.final[q]);
    m.initial = 0;
    for (int q = 0; q < n; ++q)
        for (std::size_t k = 0; k < syms.size(); ++k) m.add_edge(remap[cls[q]], syms[k], remap[cls[delta[q][k]]]);
    m.alphabet = sigma;
    return m;
}

Dfa minimal_trim(const Nfa& a) { return trim(minimize(a)); }

std::optional<Word> inclusion_counterexample(const Nfa& a0, const Nfa& b0) {
    Nfa a = remove_epsilon(a0);
    const Nfa& b = b0;
    using Key = std::pair<int, std::set<int>>;
    std::map<Key, int> id;
    std::vector<Key> nodes;
    std::vector<std::pair<int, const Symbol*>> parent;
    Key start{a.initial, epsilon_closure(b, {b.initial})};
    id[start] = 0;
    nodes.push_back(start);
    parent.push_back({-1, nullptr});
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto [p, sb] = nodes[i];
        if (a.final[p] && !any_final(b, sb)) {
            Word w;
            for (int c = static_cast<int>(i); parent[c].first >= 0; c = parent[c].first) w.push_back(*parent[c].second);
            std::reverse(w.begin(), w.end());
            return w;
        }
        std::map<Symbol, std::set<int>> cache;
        for (auto& e : a.out[p]) {
            auto it = cache.find(e.sym);
            if (it == cache.end()) it = cache.emplace(e.sym, step(b, sb, e.sym)).first;
            Key k{e.to, it->second};
            if (id.count(k)) continue;
            id[k] = static_cast<int>(nodes.size());
            nodes.push_back(k);
            parent.push_back({static_cast<int>(i), &e.sym});
        }
    }
    return std::nullopt;
}

bool includes(const Nfa& a, const Nfa& b) { return !inclusion_counterexample(a, b).has_value(); }

bool equivalent(const Nfa& a, const Nfa& b) { return includes(a, b) && includes(b, a); }

bool intersects(const Nfa& a, const Nfa& b) { return !is_empty(intersect(a, b)); }

std::set<std::pair<int, int>> box_relation(const Nfa& a0, const BoxLang& b) {
    Nfa a = remove_epsilon(a0);
    std::set<std::pair<int, int>> rel;
    for (int q = 0; q < a.size(); ++q) rel.insert({q, q});
    for (auto& cell : b.cells) {
        std::set<std::pair<int, int>> next;
        for (auto [p, q] : rel)
            for (auto& e : a.out[q])
                if (cell.count(e.sym)) next.insert({p, e.to});
        rel = std::move(next);
    }
    return rel;
}

Delimiters box_delimiters(const Nfa& a, const BoxLang& b) {
    Delimiters d;
    for (auto [p, q] : box_relation(a, b)) {
        d.ini.insert(p);
        d.fin.insert(q);
    }
    return d;
}

Delimiters delimiter_states(const Nfa& a, const Word& w) { return box_delimiters(a, BoxLang::of_word(w)); }

std::vector<std::vector<bool>> reachability(const Nfa& a) {
    int n = a.size();
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
    for (int q = 0; q < n; ++q) {
        std::vector<int> stack{q};
        r[q][q] = true;
        while (!stack.empty()) {
            int p = stack.back();
            stack.pop_back();
            for (auto& e : a.out[p])
                if (!r[q][e.to]) {
                    r[q][e.to] = true;
                    stack.push_back(e.to);
                }
        }
    }
    return r;
}

Nfa local_automaton(const Nfa& a, int qi, int qf) {
    // Forward from qi, backward from qf; keep edges between states in both.
    Nfa fw_probe = a;
    fw_probe.initial = qi;
    auto fw = reachable_states(fw_probe);
    Nfa bw_probe = a;
    std::fill(bw_probe.final.begin(), bw_probe.final.end(), false);
    bw_probe.final[qf] = true;
    auto bw = coreachable_states(bw_probe);
    Nfa r;
    r.out.clear();
    r.final.clear();
    r.label.clear();
    std::vector<int> idx(a.size(), -1);
    idx[qi] = r.add_state(false, qi);
    r.initial = idx[qi];
    for (int q = 0; q < a.size(); ++q)
        if (q != qi && fw[q] && bw[q]) idx[q] = r.add_state(false, q);
    if (idx[qf] >= 0) r.final[idx[qf]] = true;
    for (int q = 0; q < a.size(); ++q) {
        if (idx[q] < 0 || !(fw[q] && bw[q])) continue;
        for (auto& e : a.out[q])
            if (idx[e.to] >= 0 && fw[e.to] && bw[e.to]) r.add_edge(idx[q], e.sym, idx[e.to]);
    }
    r.alphabet = a.alphabet;
    return r;
}

std::string to_string(const Word& w) {
    if (w.empty()) return "ε";
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) s += ' ';
        s += w[i];
    }
    return s;
}

Word parse_word(const std::string& text) {
    std::istringstream in(text);
    Word w;
    std::string tok;
    while (in >> tok)
        if (tok != "ε" && tok != "%e") w.push_back(tok);
    return w;
}

}  // namespace dxd
