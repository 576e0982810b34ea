#include "dxd/regex.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "dxd/errors.hpp"

namespace dxd {

using K = Regex::Kind;

RegexPtr Regex::eps() {
    static const RegexPtr e = std::make_shared<Regex>(Regex{K::Epsilon, {}, nullptr, nullptr});
    return e;
}

RegexPtr Regex::empty() {
    static const RegexPtr e = std::make_shared<Regex>(Regex{K::Empty, {}, nullptr, nullptr});
    return e;
}

RegexPtr Regex::symbol(Symbol s) { return std::make_shared<Regex>(Regex{K::Sym, std::move(s), nullptr, nullptr}); }

RegexPtr Regex::concat(RegexPtr l, RegexPtr r) {
    return std::make_shared<Regex>(Regex{K::Concat, {}, std::move(l), std::move(r)});
}

RegexPtr Regex::alt(RegexPtr l, RegexPtr r) {
    return std::make_shared<Regex>(Regex{K::Alt, {}, std::move(l), std::move(r)});
}

RegexPtr Regex::unary(Kind k, RegexPtr r) { return std::make_shared<Regex>(Regex{k, {}, std::move(r), nullptr}); }

// ---------------------------------------------------------------- parsing

namespace {

bool symbol_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#' || c == '.' || c == ':' || c == '@' ||
           c == '-';
}

class Parser {
public:
    explicit Parser(const std::string& t) : text_(t) {}

    RegexPtr run() {
        skip_ws();
        if (pos_ >= text_.size()) throw InputError("empty regular expression", pos_);
        RegexPtr r = alternation();
        skip_ws();
        if (pos_ < text_.size()) throw InputError("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
        return r;
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool at(const char* lit) const { return text_.compare(pos_, std::char_traits<char>::length(lit), lit) == 0; }

    bool operand_start(std::size_t p) const {
        if (p >= text_.size()) return false;
        char c = text_[p];
        if (c == '(' || c == '%') return true;
        if (symbol_char(c) && c != '#') return true;
        return text_.compare(p, 2, "ε") == 0;
    }

    RegexPtr alternation() {
        RegexPtr r = concatenation();
        while (true) {
            skip_ws();
            if (pos_ < text_.size() && (text_[pos_] == '|' || text_[pos_] == '+')) {
                ++pos_;
                skip_ws();
                r = Regex::alt(r, concatenation());
            } else {
                return r;
            }
        }
    }

    RegexPtr concatenation() {
        RegexPtr r = postfix();
        while (true) {
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == ',') {
                ++pos_;
                skip_ws();
                r = Regex::concat(r, postfix());
            } else if (at("·")) {
                pos_ += std::string("·").size();
                skip_ws();
                r = Regex::concat(r, postfix());
            } else if (operand_start(pos_)) {
                r = Regex::concat(r, postfix());
            } else {
                return r;
            }
        }
    }

    RegexPtr postfix() {
        RegexPtr r = atom();
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '*') {
                r = Regex::unary(K::Star, r);
            } else if (c == '?') {
                r = Regex::unary(K::Opt, r);
            } else if (c == '+' && !operand_start(pos_ + 1)) {
                r = Regex::unary(K::Plus, r);
            } else {
                break;
            }
            ++pos_;
        }
        return r;
    }

    RegexPtr atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw InputError("expression expected at end of input", pos_);
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == ')') {
                ++pos_;
                return Regex::eps();
            }
            RegexPtr r = alternation();
            skip_ws();
            if (pos_ >= text_.size() || text_[pos_] != ')') throw InputError("missing ')'", pos_);
            ++pos_;
            return r;
        }
        if (at("%e")) {
            pos_ += 2;
            return Regex::eps();
        }
        if (at("%0")) {
            pos_ += 2;
            return Regex::empty();
        }
        if (at("ε")) {
            pos_ += std::string("ε").size();
            return Regex::eps();
        }
        if (symbol_char(c) && c != '#') {
            std::size_t start = pos_;
            while (pos_ < text_.size() && symbol_char(text_[pos_])) ++pos_;
            return Regex::symbol(text_.substr(start, pos_ - start));
        }
        throw InputError("unexpected '" + std::string(1, c) + "'", pos_);
    }
};

int precedence(const RegexPtr& r) {
    switch (r->kind) {
        case K::Alt: return 0;
        case K::Concat: return 1;
        case K::Opt:
        case K::Plus:
        case K::Star: return 2;
        default: return 3;
    }
}

void print(const RegexPtr& r, std::string& out) {
    auto child = [&](const RegexPtr& c, int min_prec) {
        if (precedence(c) < min_prec) {
            out += '(';
            print(c, out);
            out += ')';
        } else {
            print(c, out);
        }
    };
    switch (r->kind) {
        case K::Epsilon: out += "ε"; break;
        case K::Empty: out += "%0"; break;
        case K::Sym: out += r->sym; break;
        case K::Concat:
            child(r->left, 1);
            out += ' ';
            child(r->right, 2);
            break;
        case K::Alt:
            child(r->left, 0);
            out += " | ";
            child(r->right, 1);
            break;
        case K::Opt:
        case K::Plus:
        case K::Star:
            // A postfix operator applied to a postfix node needs brackets to
            // survive a reparse unambiguously ("a+?" reads fine, but "a++"
            // would not).
            child(r->left, 3);
            out += r->kind == K::Opt ? '?' : r->kind == K::Plus ? '+' : '*';
            break;
    }
}

}  // namespace

RegexPtr parse_regex(const std::string& text) { return Parser(text).run(); }

std::string to_string(const RegexPtr& r) {
    std::string s;
    print(r, s);
    return s;
}

std::size_t regex_size(const RegexPtr& r) {
    std::unordered_map<const Regex*, std::size_t> memo;
    std::function<std::size_t(const Regex*)> go = [&](const Regex* n) -> std::size_t {
        auto it = memo.find(n);
        if (it != memo.end()) return it->second;
        std::size_t s = 1;
        if (n->left) s += go(n->left.get());
        if (n->right) s += go(n->right.get());
        memo[n] = s;
        return s;
    };
    return go(r.get());
}

bool structurally_equal(const RegexPtr& a, const RegexPtr& b) {
    if (a->kind != b->kind || a->sym != b->sym) return false;
    if (!!a->left != !!b->left || !!a->right != !!b->right) return false;
    if (a->left && !structurally_equal(a->left, b->left)) return false;
    if (a->right && !structurally_equal(a->right, b->right)) return false;
    return true;
}

std::set<Symbol> regex_symbols(const RegexPtr& r) {
    std::set<Symbol> s;
    std::function<void(const RegexPtr&)> go = [&](const RegexPtr& n) {
        if (n->kind == K::Sym) s.insert(n->sym);
        if (n->left) go(n->left);
        if (n->right) go(n->right);
    };
    go(r);
    return s;
}

bool nullable(const RegexPtr& r) {
    switch (r->kind) {
        case K::Epsilon: return true;
        case K::Empty: return false;
        case K::Sym: return false;
        case K::Concat: return nullable(r->left) && nullable(r->right);
        case K::Alt: return nullable(r->left) || nullable(r->right);
        case K::Opt:
        case K::Star: return true;
        case K::Plus: return nullable(r->left);
    }
    return false;
}

RegexPtr rename_regex(const RegexPtr& r, const std::map<Symbol, Symbol>& map) {
    std::map<Symbol, RegexPtr> sub;
    for (auto& [k, v] : map) sub[k] = Regex::symbol(v);
    return substitute_regex(r, sub);
}

RegexPtr substitute_regex(const RegexPtr& r, const std::map<Symbol, RegexPtr>& map) {
    switch (r->kind) {
        case K::Sym: {
            auto it = map.find(r->sym);
            return it == map.end() ? r : it->second;
        }
        case K::Epsilon:
        case K::Empty: return r;
        case K::Concat: return Regex::concat(substitute_regex(r->left, map), substitute_regex(r->right, map));
        case K::Alt: return Regex::alt(substitute_regex(r->left, map), substitute_regex(r->right, map));
        default: return Regex::unary(r->kind, substitute_regex(r->left, map));
    }
}

// ---------------------------------------------------------------- Glushkov

namespace {

struct Positions {
    std::vector<Symbol> sym;                 // sym[i-1] for position i
    std::vector<std::set<int>> follow;       // follow[i-1]
};

struct GInfo {
    bool null;
    std::set<int> first, last;
};

GInfo glushkov(const RegexPtr& r, Positions& ps) {
    switch (r->kind) {
        case K::Epsilon: return {true, {}, {}};
        case K::Empty: return {false, {}, {}};
        case K::Sym: {
            ps.sym.push_back(r->sym);
            ps.follow.emplace_back();
            int p = static_cast<int>(ps.sym.size());
            return {false, {p}, {p}};
        }
        case K::Concat: {
            GInfo a = glushkov(r->left, ps);
            GInfo b = glushkov(r->right, ps);
            for (int p : a.last) ps.follow[p - 1].insert(b.first.begin(), b.first.end());
            GInfo g{a.null && b.null, a.first, b.last};
            if (a.null) g.first.insert(b.first.begin(), b.first.end());
            if (b.null) g.last.insert(a.last.begin(), a.last.end());
            return g;
        }
        case K::Alt: {
            GInfo a = glushkov(r->left, ps);
            GInfo b = glushkov(r->right, ps);
            a.null = a.null || b.null;
            a.first.insert(b.first.begin(), b.first.end());
            a.last.insert(b.last.begin(), b.last.end());
            return a;
        }
        case K::Opt: {
            GInfo a = glushkov(r->left, ps);
            a.null = true;
            return a;
        }
        case K::Plus:
        case K::Star: {
            GInfo a = glushkov(r->left, ps);
            for (int p : a.last) ps.follow[p - 1].insert(a.first.begin(), a.first.end());
            if (r->kind == K::Star) a.null = true;
            return a;
        }
    }
    return {false, {}, {}};
}

}  // namespace

Nfa to_nfa(const RegexPtr& r) {
    Positions ps;
    GInfo g = glushkov(r, ps);
    Nfa a;
    for (std::size_t i = 0; i < ps.sym.size(); ++i) a.add_state(false, static_cast<int>(i + 1));
    a.final[0] = g.null;
    for (int p : g.last) a.final[p] = true;
    for (int p : g.first) a.add_edge(0, ps.sym[p - 1], p);
    for (std::size_t i = 0; i < ps.follow.size(); ++i)
        for (int q : ps.follow[i]) a.add_edge(static_cast<int>(i + 1), ps.sym[q - 1], q);
    for (auto& s : regex_symbols(r)) a.alphabet.insert(s);
    return a;
}

bool is_dre(const RegexPtr& r) { return is_deterministic(to_nfa(r)); }

// ---------------------------------------------------------------- BKW

namespace {

struct Dtab {
    std::vector<std::map<Symbol, int>> delta;
    std::vector<bool> fin;
    int init = 0;
    int size() const { return static_cast<int>(delta.size()); }
};

Dtab to_tab(const Nfa& d) {
    Dtab t;
    t.delta.resize(d.size());
    t.fin = d.final;
    t.init = d.initial;
    for (int q = 0; q < d.size(); ++q)
        for (auto& e : d.out[q]) t.delta[q][e.sym] = e.to;
    return t;
}

Nfa to_nfa_tab(const Dtab& t) {
    Nfa a;
    a.out.clear();
    a.final.clear();
    a.label.clear();
    for (int q = 0; q < t.size(); ++q) a.add_state(t.fin[q]);
    a.initial = t.init;
    for (int q = 0; q < t.size(); ++q)
        for (auto& [s, p] : t.delta[q]) a.add_edge(q, s, p);
    return a;
}

// Strongly connected components (Tarjan). comp[q] is the component id.
std::vector<int> orbits(const Dtab& t) {
    int n = t.size(), counter = 0, ncomp = 0;
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
    std::vector<bool> on(n, false);
    std::function<void(int)> dfs = [&](int v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on[v] = true;
        for (auto& [s, w] : t.delta[v]) {
            if (index[w] < 0) {
                dfs(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            while (true) {
                int w = stack.back();
                stack.pop_back();
                on[w] = false;
                comp[w] = ncomp;
                if (w == v) break;
            }
            ++ncomp;
        }
    };
    for (int v = 0; v < n; ++v)
        if (index[v] < 0) dfs(v);
    return comp;
}

bool trivial_orbit(const Dtab& t, const std::vector<int>& comp, int q) {
    for (int p = 0; p < t.size(); ++p)
        if (p != q && comp[p] == comp[q]) return false;
    for (auto& [s, p] : t.delta[q])
        if (p == q) return false;
    return true;
}

std::vector<int> gates(const Dtab& t, const std::vector<int>& comp, int c) {
    std::vector<int> g;
    for (int q = 0; q < t.size(); ++q) {
        if (comp[q] != c) continue;
        bool gate = t.fin[q];
        for (auto& [s, p] : t.delta[q])
            if (comp[p] != c) gate = true;
        if (gate) g.push_back(q);
    }
    return g;
}

bool orbit_property(const Dtab& t, const std::vector<int>& comp) {
    std::set<int> cs(comp.begin(), comp.end());
    for (int c : cs) {
        auto g = gates(t, comp, c);
        for (std::size_t i = 1; i < g.size(); ++i) {
            if (t.fin[g[i]] != t.fin[g[0]]) return false;
            // Same exits (symbol, target outside the orbit) from every gate.
            auto exits = [&](int q) {
                std::map<Symbol, int> e;
                for (auto& [s, p] : t.delta[q])
                    if (comp[p] != c) e[s] = p;
                return e;
            };
            if (exits(g[i]) != exits(g[0])) return false;
        }
    }
    return true;
}

class Synth {
public:
    explicit Synth(std::size_t cap) : cap_(cap) {}

    std::optional<RegexPtr> language(const Nfa& lang) {
        Nfa m = minimal_trim(lang);
        Dtab t = to_tab(m);
        bool any_final = false;
        for (bool f : t.fin) any_final = any_final || f;
        if (!any_final) return Regex::empty();

        // Consistent symbols: every final state moves on a to the same state.
        std::map<Symbol, int> follow_of;
        std::set<Symbol> candidates;
        bool first = true;
        for (int q = 0; q < t.size(); ++q) {
            if (!t.fin[q]) continue;
            if (first) {
                for (auto& [s, p] : t.delta[q]) {
                    candidates.insert(s);
                    follow_of[s] = p;
                }
                first = false;
            } else {
                for (auto it = candidates.begin(); it != candidates.end();) {
                    auto f = t.delta[q].find(*it);
                    if (f == t.delta[q].end() || f->second != follow_of[*it])
                        it = candidates.erase(it);
                    else
                        ++it;
                }
            }
        }
        auto comp = orbits(t);
        bool single_orbit = std::all_of(comp.begin(), comp.end(), [&](int c) { return c == comp[0]; });
        if (single_orbit && candidates.empty() && !trivial_orbit(t, comp, t.init)) return std::nullopt;

        Dtab cut = t;
        for (int q = 0; q < cut.size(); ++q)
            if (cut.fin[q])
                for (auto& s : candidates) cut.delta[q].erase(s);
        auto cut_comp = orbits(cut);
        if (!orbit_property(cut, cut_comp)) return std::nullopt;

        std::map<int, RegexPtr> memo;
        auto base = orbit_expr(cut, cut_comp, cut.init, memo);
        if (!base) return std::nullopt;
        if (candidates.empty()) return base;
        RegexPtr loop;
        for (auto& s : candidates) {
            auto rest = orbit_expr(cut, cut_comp, follow_of[s], memo);
            if (!rest) return std::nullopt;
            RegexPtr part = seq(Regex::symbol(s), *rest);
            loop = loop ? Regex::alt(loop, part) : part;
        }
        return check(seq(*base, Regex::unary(K::Star, loop)));
    }

private:
    std::size_t cap_;

    RegexPtr check(RegexPtr r) {
        if (regex_size(r) > cap_) throw ResourceCap("regex", cap_);
        return r;
    }

    static RegexPtr seq(const RegexPtr& a, const RegexPtr& b) {
        if (a->kind == K::Epsilon) return b;
        if (b->kind == K::Epsilon) return a;
        return Regex::concat(a, b);
    }

    std::optional<RegexPtr> orbit_expr(const Dtab& t, const std::vector<int>& comp, int q, std::map<int, RegexPtr>& memo) {
        auto m = memo.find(q);
        if (m != memo.end()) return m->second;
        int c = comp[q];
        RegexPtr inner = Regex::eps();
        auto g = gates(t, comp, c);
        if (!trivial_orbit(t, comp, q)) {
            Dtab orbit;
            std::map<int, int> idx;
            for (int p = 0; p < t.size(); ++p)
                if (comp[p] == c) idx[p] = static_cast<int>(idx.size());
            orbit.delta.resize(idx.size());
            orbit.fin.assign(idx.size(), false);
            for (auto [p, i] : idx)
                for (auto& [s, r] : t.delta[p])
                    if (comp[r] == c) orbit.delta[i][s] = idx[r];
            for (int p : g) orbit.fin[idx[p]] = true;
            orbit.init = idx[q];
            auto sub = language(to_nfa_tab(orbit));
            if (!sub) return std::nullopt;
            inner = *sub;
        }
        // Exits are identical from every gate (orbit property).
        RegexPtr exits;
        for (auto& [s, p] : t.delta[g.front()]) {
            if (comp[p] == c) continue;
            auto rest = orbit_expr(t, comp, p, memo);
            if (!rest) return std::nullopt;
            RegexPtr part = seq(Regex::symbol(s), *rest);
            exits = exits ? Regex::alt(exits, part) : part;
        }
        RegexPtr result = inner;
        if (exits) result = seq(inner, t.fin[g.front()] ? Regex::unary(K::Opt, exits) : exits);
        result = check(result);
        memo[q] = result;
        return result;
    }
};

}  // namespace

std::optional<RegexPtr> to_dre(const Nfa& a, std::size_t max_nodes) {
    auto r = Synth(max_nodes).language(a);
    if (!r) return std::nullopt;
    if (!is_dre(*r) || !equivalent(to_nfa(*r), a))
        throw std::logic_error("deterministic expression synthesis produced a wrong result: " + to_string(*r));
    return r;
}

bool is_one_unambiguous(const Nfa& a) {
    return Synth(static_cast<std::size_t>(-1)).language(a).has_value();
}

// ---------------------------------------------------------------- state elimination

namespace {

RegexPtr mk_alt(const RegexPtr& a, const RegexPtr& b) {
    if (!a || a->kind == K::Empty) return b;
    if (!b || b->kind == K::Empty) return a;
    if (structurally_equal(a, b)) return a;
    return Regex::alt(a, b);
}

RegexPtr mk_cat(const RegexPtr& a, const RegexPtr& b) {
    if (a->kind == K::Empty || b->kind == K::Empty) return Regex::empty();
    if (a->kind == K::Epsilon) return b;
    if (b->kind == K::Epsilon) return a;
    return Regex::concat(a, b);
}

RegexPtr mk_star(const RegexPtr& a) {
    if (a->kind == K::Empty || a->kind == K::Epsilon) return Regex::eps();
    if (a->kind == K::Star) return a;
    return Regex::unary(K::Star, a);
}

}  // namespace

RegexPtr to_regex(const Nfa& input) {
    Nfa a = trim(remove_epsilon(input));
    if (is_empty(a)) return Regex::empty();
    int n = a.size();
    int S = n, F = n + 1;  // fresh source and sink
    std::vector<std::map<int, RegexPtr>> g(n + 2);
    auto add = [&](int p, int q, const RegexPtr& r) { g[p][q] = mk_alt(g[p].count(q) ? g[p][q] : nullptr, r); };
    add(S, a.initial, Regex::eps());
    for (int q = 0; q < n; ++q) {
        if (a.final[q]) add(q, F, Regex::eps());
        for (auto& e : a.out[q]) add(q, e.to, Regex::symbol(e.sym));
    }
    for (int k = 0; k < n; ++k) {
        RegexPtr loop = g[k].count(k) ? mk_star(g[k][k]) : Regex::eps();
        g[k].erase(k);
        for (int p = 0; p < n + 2; ++p) {
            if (p == k || !g[p].count(k)) continue;
            RegexPtr pk = g[p][k];
            g[p].erase(k);
            for (auto& [q, kq] : g[k]) add(p, q, mk_cat(mk_cat(pk, loop), kq));
        }
        g[k].clear();
    }
    return g[S].count(F) ? g[S][F] : Regex::empty();
}

}  // namespace dxd
