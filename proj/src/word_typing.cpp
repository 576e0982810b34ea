#include "dxd/word_typing.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>

namespace dxd {

// ---------------------------------------------------------------- kernels

KernelBox KernelBox::of_word(const KernelWord& w) {
    KernelBox b;
    for (auto& s : w.segments) b.segments.push_back(BoxLang::of_word(s));
    b.functions = w.functions;
    return b;
}

namespace {

template <class Seg>
void push_function(std::vector<Seg>& segments, std::vector<Symbol>& functions, const Symbol& f) {
    if (f.size() < 2) throw InputError("function name missing after '@'");
    if (std::find(functions.begin(), functions.end(), f) != functions.end())
        throw InputError("function " + f + " occurs more than once");
    functions.push_back(f);
    segments.emplace_back();
}

}  // namespace

KernelWord parse_kernel_word(const std::string& text) {
    KernelWord k;
    k.segments.emplace_back();
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) {
        if (tok == "ε" || tok == "%e") continue;
        if (is_function_symbol(tok))
            push_function(k.segments, k.functions, tok);
        else
            k.segments.back().push_back(tok);
    }
    return k;
}

KernelBox parse_kernel_box(const std::string& text) {
    KernelBox k;
    k.segments.emplace_back();
    std::size_t i = 0;
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
    while (i < text.size()) {
        if (is_space(text[i])) {
            ++i;
            continue;
        }
        if (text[i] == '{') {
            auto close = text.find('}', i);
            if (close == std::string::npos) throw InputError("missing '}' in box", i);
            std::set<Symbol> cell;
            std::string body = text.substr(i + 1, close - i - 1);
            std::string cur;
            for (char c : body + ",") {
                if (c == ',' || is_space(c)) {
                    if (!cur.empty()) cell.insert(cur);
                    cur.clear();
                } else {
                    cur += c;
                }
            }
            if (cell.empty()) throw InputError("empty box cell", i);
            for (auto& s : cell)
                if (is_function_symbol(s)) throw InputError("function " + s + " inside a box cell", i);
            k.segments.back().cells.push_back(std::move(cell));
            i = close + 1;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && !is_space(text[j]) && text[j] != '{') ++j;
        std::string tok = text.substr(i, j - i);
        i = j;
        if (tok == "ε" || tok == "%e") continue;
        if (is_function_symbol(tok))
            push_function(k.segments, k.functions, tok);
        else
            k.segments.back().cells.push_back({tok});
    }
    return k;
}

std::string to_string(const KernelWord& k) {
    std::string out;
    auto add = [&](const std::string& s) {
        if (!out.empty()) out += ' ';
        out += s;
    };
    for (std::size_t i = 0; i < k.segments.size(); ++i) {
        for (auto& s : k.segments[i]) add(s);
        if (i < k.functions.size()) add(k.functions[i]);
    }
    return out.empty() ? "ε" : out;
}

std::string to_string(const KernelBox& k) {
    std::string out;
    auto add = [&](const std::string& s) {
        if (!out.empty()) out += ' ';
        out += s;
    };
    for (std::size_t i = 0; i < k.segments.size(); ++i) {
        for (auto& cell : k.segments[i].cells) {
            std::string c = "{";
            bool first = true;
            for (auto& s : cell) {
                if (!first) c += ',';
                c += s;
                first = false;
            }
            add(c + "}");
        }
        if (i < k.functions.size()) add(k.functions[i]);
    }
    return out.empty() ? "ε" : out;
}

Nfa w_tau(const KernelBox& k, const Typing& t) {
    if (t.size() != k.functions.size())
        throw InputError("typing has " + std::to_string(t.size()) + " types for " + std::to_string(k.functions.size()) +
                         " functions");
    std::vector<Nfa> parts;
    for (std::size_t i = 0; i < k.segments.size(); ++i) {
        parts.push_back(box_language(k.segments[i]));
        if (i < t.size()) parts.push_back(t[i]);
    }
    return concat_all(parts);
}

Nfa w_tau(const KernelWord& k, const Typing& t) { return w_tau(KernelBox::of_word(k), t); }

// ---------------------------------------------------------------- Omega

namespace {

// Paths of `a` from q to p that read a string of the box.
Nfa segment_automaton(const Nfa& a, const BoxLang& b, int q, int p) {
    Nfa r;
    std::map<std::pair<int, std::size_t>, int> id;
    id[{q, 0}] = 0;
    r.label[0] = q;
    std::vector<std::pair<int, std::size_t>> frontier{{q, 0}};
    for (std::size_t j = 0; j < b.width(); ++j) {
        std::vector<std::pair<int, std::size_t>> next;
        for (auto& st : frontier)
            for (auto& e : a.out[st.first]) {
                if (!b.cells[j].count(e.sym)) continue;
                auto key = std::make_pair(e.to, j + 1);
                auto it = id.find(key);
                int to;
                if (it == id.end()) {
                    to = r.add_state(false, e.to);
                    id[key] = to;
                    next.push_back(key);
                } else {
                    to = it->second;
                }
                r.add_edge(id[st], e.sym, to);
            }
        frontier = std::move(next);
    }
    auto it = id.find({p, b.width()});
    if (it != id.end()) r.final[it->second] = true;
    return r;
}

std::set<int> image(const std::set<std::pair<int, int>>& rel, const std::set<int>& from) {
    std::set<int> out;
    for (auto [x, y] : rel)
        if (from.count(x)) out.insert(y);
    return out;
}

std::set<int> preimage(const std::set<std::pair<int, int>>& rel, const std::set<int>& to) {
    std::set<int> out;
    for (auto [x, y] : rel)
        if (to.count(y)) out.insert(x);
    return out;
}

int embed_copy(Nfa& dst, const Nfa& src) {
    int off = dst.size();
    for (int q = 0; q < src.size(); ++q) dst.add_state(false, q < static_cast<int>(src.label.size()) ? src.label[q] : -1);
    for (int q = 0; q < src.size(); ++q)
        for (auto& e : src.out[q]) dst.add_edge(off + q, e.sym, off + e.to);
    return off;
}

int only_final(const Nfa& a) {
    for (int q = 0; q < a.size(); ++q)
        if (a.final[q]) return q;
    return -1;
}

}  // namespace

PerfectAutomaton build_perfect(const Nfa& a0, const KernelBox& k) {
    PerfectAutomaton p;
    p.target = remove_epsilon(a0);
    const Nfa& a = p.target;
    const std::size_t n = k.functions.size();
    const int nq = a.size();
    auto reach = reachability(a);
    auto coreach_set = [&](const std::set<int>& to) {
        std::set<int> out;
        for (int x = 0; x < nq; ++x)
            for (int y : to)
                if (reach[x][y]) {
                    out.insert(x);
                    break;
                }
        return out;
    };

    std::vector<std::set<std::pair<int, int>>> rel;
    for (auto& seg : k.segments) rel.push_back(box_relation(a, seg));
    const std::set<int> finals = a.finals();

    // ends[i]: where slot i (1-based) may end so that B_i and the rest of
    // the kernel can still reach a final state.
    std::vector<std::set<int>> ends(n + 1);
    if (n > 0) {
        ends[n] = preimage(rel[n], finals);
        for (std::size_t i = n; i-- > 1;) ends[i] = preimage(rel[i], coreach_set(ends[i + 1]));
    }

    p.slot_pairs.assign(n, {});
    std::vector<std::set<std::pair<int, int>>> seg_pairs(n + 1);
    if (n == 0) {
        for (auto [x, y] : rel[0])
            if (x == a.initial && finals.count(y)) seg_pairs[0].insert({x, y});
    } else {
        std::set<int> starts = image(rel[0], {a.initial});
        for (std::size_t i = 1; i <= n; ++i) {
            std::set<int> legal_end;
            for (int x : starts)
                for (int y : ends[i])
                    if (reach[x][y]) {
                        p.slot_pairs[i - 1].push_back({x, y});
                        legal_end.insert(y);
                    }
            if (legal_end.empty()) break;
            std::set<int> target_set = i < n ? coreach_set(ends[i + 1]) : finals;
            std::set<int> next;
            for (auto [x, y] : rel[i])
                if (legal_end.count(x) && target_set.count(y)) next.insert(y);
            starts = std::move(next);
        }
        // Drop pairs that do not lie on a full chain: walk back from the
        // last slot keeping only starts that some kept end feeds.
        for (std::size_t i = n; i-- > 0;) {
            std::set<int> kept_starts;
            for (auto& pr : p.slot_pairs[i]) kept_starts.insert(pr.first);
            if (i == 0) break;
            auto& prev = p.slot_pairs[i - 1];
            std::vector<std::pair<int, int>> keep;
            for (auto& pr : prev) {
                bool feeds = false;
                for (auto [x, y] : rel[i])
                    if (x == pr.second && kept_starts.count(y)) feeds = true;
                if (feeds) keep.push_back(pr);
            }
            prev = std::move(keep);
        }
        // And forward: keep only starts fed by a kept end of the slot before.
        for (std::size_t i = 1; i < n; ++i) {
            std::set<int> fed;
            for (auto& pr : p.slot_pairs[i - 1])
                for (auto [x, y] : rel[i])
                    if (x == pr.second) fed.insert(y);
            auto& cur = p.slot_pairs[i];
            cur.erase(std::remove_if(cur.begin(), cur.end(), [&](auto& pr) { return !fed.count(pr.first); }), cur.end());
        }
        bool all = true;
        for (auto& v : p.slot_pairs) all = all && !v.empty();
        if (!all)
            for (auto& v : p.slot_pairs) v.clear();
        if (all) {
            for (auto& pr : p.slot_pairs[0])
                if (rel[0].count({a.initial, pr.first})) seg_pairs[0].insert({a.initial, pr.first});
            for (std::size_t i = 1; i < n; ++i)
                for (auto& e : p.slot_pairs[i - 1])
                    for (auto& s : p.slot_pairs[i])
                        if (rel[i].count({e.second, s.first})) seg_pairs[i].insert({e.second, s.first});
            for (auto& e : p.slot_pairs[n - 1])
                for (int f : finals)
                    if (rel[n].count({e.second, f})) seg_pairs[n].insert({e.second, f});
        }
    }
    p.compatible = !seg_pairs[0].empty();

    // Distinct slot languages and their unions.
    p.aut.assign(n, {});
    p.omega.assign(n, empty_language());
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& [x, y] : p.slot_pairs[i]) {
            Nfa l = minimal_trim(local_automaton(a, x, y));
            bool dup = false;
            for (auto& o : p.aut[i]) dup = dup || equivalent(o, l);
            if (!dup) p.aut[i].push_back(std::move(l));
        }
        if (!p.aut[i].empty()) p.omega[i] = minimal_trim(unite_all(p.aut[i]));
    }

    // Composite: fresh initial state 0, segment and slot copies linked by
    // epsilon edges whenever an end label matches a start label.
    Nfa& c = p.composite;
    c.label[0] = -1;
    struct Copy {
        int from, to, entry, exit;
    };
    std::vector<std::vector<Copy>> segs(n + 1), slots(n);
    for (std::size_t i = 0; i <= n; ++i)
        for (auto [x, y] : seg_pairs[i]) {
            Nfa s = segment_automaton(a, k.segments[i], x, y);
            int off = embed_copy(c, s);
            segs[i].push_back({x, y, off + s.initial, off + only_final(s)});
        }
    for (std::size_t i = 0; i < n; ++i)
        for (auto [x, y] : p.slot_pairs[i]) {
            Nfa l = local_automaton(a, x, y);
            int off = embed_copy(c, l);
            slots[i].push_back({x, y, off + l.initial, off + only_final(l)});
        }
    for (auto& s : segs[0]) c.add_edge(0, kEpsilon, s.entry);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& s : segs[i])
            for (auto& x : slots[i])
                if (s.to == x.from) c.add_edge(s.exit, kEpsilon, x.entry);
        for (auto& x : slots[i])
            for (auto& s : segs[i + 1])
                if (x.to == s.from) c.add_edge(x.exit, kEpsilon, s.entry);
    }
    for (auto& s : segs[n]) c.final[s.exit] = true;
    c.alphabet = a.alphabet;
    return p;
}

PerfectAutomaton build_perfect(const Nfa& a, const KernelWord& w) { return build_perfect(a, KernelBox::of_word(w)); }

namespace {

void check_target(const Nfa& t) {
    for (auto& s : t.alphabet)
        if (is_function_symbol(s)) throw InputError("target alphabet contains function symbol " + s);
}

Nfa normal_target(const Nfa& t) {
    check_target(t);
    return minimal_trim(t);
}

}  // namespace

PerfectAutomaton build_perfect(const WordDesign& d) { return build_perfect(normal_target(d.target), d.kernel); }
PerfectAutomaton build_perfect(const BoxDesign& d) { return build_perfect(normal_target(d.target), d.kernel); }

bool compatible(const WordDesign& d) { return build_perfect(d).compatible; }

Typing omega_typing(const PerfectAutomaton& p) {
    if (!p.compatible) throw InputError("the design is not compatible: no sound typing exists");
    return p.omega;
}

// ---------------------------------------------------------------- Dec

std::vector<Nfa> decompose(const PerfectAutomaton& p, std::size_t slot, const Caps& caps) {
    const auto& auts = p.aut.at(slot);
    if (auts.size() > caps.slot_automata) throw ResourceCap("aut", caps.slot_automata);
    if (auts.empty()) return {};
    std::vector<Dfa> ds;
    std::set<Symbol> sigma;
    for (auto& x : auts) {
        ds.push_back(determinize(x));
        sigma.insert(x.alphabet.begin(), x.alphabet.end());
    }
    using Vec = std::vector<int>;
    std::map<Vec, int> id;
    std::vector<Vec> states;
    std::vector<std::uint32_t> mask;
    Nfa prod;
    Vec start;
    for (auto& d : ds) start.push_back(d.initial);
    id[start] = 0;
    states.push_back(start);
    for (std::size_t s = 0; s < states.size(); ++s) {
        Vec cur = states[s];
        std::uint32_t m = 0;
        for (std::size_t j = 0; j < ds.size(); ++j)
            if (cur[j] >= 0 && ds[j].final[cur[j]]) m |= 1u << j;
        mask.push_back(m);
        for (auto& sym : sigma) {
            Vec next(ds.size(), -1);
            bool alive = false;
            for (std::size_t j = 0; j < ds.size(); ++j) {
                if (cur[j] < 0) continue;
                for (auto& e : ds[j].out[cur[j]])
                    if (e.sym == sym) {
                        next[j] = e.to;
                        alive = true;
                        break;
                    }
            }
            if (!alive) continue;
            auto it = id.find(next);
            int to;
            if (it == id.end()) {
                to = prod.add_state(false);
                id[next] = to;
                states.push_back(next);
            } else {
                to = it->second;
            }
            prod.add_edge(static_cast<int>(s), sym, to);
        }
    }
    std::set<std::uint32_t> masks(mask.begin(), mask.end());
    std::vector<Nfa> cells;
    for (auto m : masks) {
        if (m == 0) continue;
        Nfa cell = prod;
        for (int q = 0; q < cell.size(); ++q) cell.final[q] = mask[q] == m;
        cells.push_back(minimal_trim(cell));
    }
    return cells;
}

// ---------------------------------------------------------------- checks

bool typing_equivalent(const Typing& a, const Typing& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!equivalent(a[i], b[i])) return false;
    return true;
}

bool typing_leq(const Typing& a, const Typing& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!includes(a[i], b[i])) return false;
    return true;
}

bool check_sound(const BoxDesign& d, const Typing& t) { return includes(w_tau(d.kernel, t), d.target); }
bool check_local(const BoxDesign& d, const Typing& t) { return equivalent(w_tau(d.kernel, t), d.target); }
bool check_sound(const WordDesign& d, const Typing& t) { return includes(w_tau(d.kernel, t), d.target); }
bool check_local(const WordDesign& d, const Typing& t) { return equivalent(w_tau(d.kernel, t), d.target); }

bool check_maximal_local(const BoxDesign& d, const Typing& t, const Caps& caps) {
    if (!check_local(d, t)) return false;
    PerfectAutomaton p = build_perfect(d);
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (auto& cell : decompose(p, i, caps)) {
            if (includes(cell, t[i])) continue;
            if (intersects(cell, t[i])) return false;  // the rest of the cell can be added
            Typing bigger = t;
            bigger[i] = unite(t[i], cell);
            if (check_sound(d, bigger)) return false;
        }
    }
    return true;
}

bool check_maximal_local(const WordDesign& d, const Typing& t, const Caps& caps) {
    return check_maximal_local(BoxDesign{d.target, KernelBox::of_word(d.kernel)}, t, caps);
}

// ---------------------------------------------------------------- searches

namespace {

enum class Goal { FirstLocal, AllMaximal };

// Every vector of cells is a union of per-slot unions, and concatenation
// distributes over union, so a vector is sound iff each choice of one cell
// per slot is sound. Completeness only grows with the vector. Local vectors
// are therefore the complete ones among the maximal sound vectors, which the
// search enumerates by backtracking over the unsound cell tuples.
class VectorSearch {
public:
    VectorSearch(const BoxDesign& d, const Caps& caps) : d_(d), caps_(caps) {
        p_ = build_perfect(d);
        n_ = d.kernel.functions.size();
        if (!p_.compatible || n_ == 0) return;
        for (std::size_t i = 0; i < n_; ++i) {
            auto cells = decompose(p_, i, caps);
            for (auto& c : cells) {
                cells_.push_back(std::move(c));
                slot_of_.push_back(i);
            }
        }
    }

    std::vector<Typing> run(Goal goal) {
        std::vector<Typing> out;
        if (n_ == 0) {
            if (check_local(d_, {})) out.push_back({});
            return out;
        }
        if (!p_.compatible) return out;
        const std::size_t m = cells_.size();
        if (m > 62) throw ResourceCap("vectors", caps_.vectors);
        collect_unsound_tuples();
        std::vector<std::uint64_t> maximal;
        std::uint64_t steps = 0;
        backtrack(0, 0, maximal, steps);
        // Larger vectors first, then lexicographic on the cell indices.
        auto key = [](std::uint64_t v) {
            std::vector<int> idx;
            for (int j = 0; j < 64; ++j)
                if (v >> j & 1) idx.push_back(j);
            return idx;
        };
        std::sort(maximal.begin(), maximal.end(), [&](std::uint64_t a, std::uint64_t b) {
            int pa = std::popcount(a), pb = std::popcount(b);
            if (pa != pb) return pa > pb;
            return key(a) < key(b);
        });
        for (auto v : maximal) {
            if (!covers_all_slots(v)) continue;
            if (!includes(d_.target, w_tau(d_.kernel, typing_of(v)))) continue;
            out.push_back(typing_of(v));
            if (goal == Goal::FirstLocal) return out;
        }
        return out;
    }

    const PerfectAutomaton& perfect() const { return p_; }

private:
    const BoxDesign& d_;
    Caps caps_;
    PerfectAutomaton p_;
    std::size_t n_ = 0;
    std::vector<Nfa> cells_;
    std::vector<std::size_t> slot_of_;
    std::vector<std::vector<std::uint64_t>> unsound_with_;  // per cell: unsound tuples using it

    bool covers_all_slots(std::uint64_t v) const {
        std::vector<bool> seen(n_, false);
        for (std::size_t j = 0; j < cells_.size(); ++j)
            if (v >> j & 1) seen[slot_of_[j]] = true;
        for (bool b : seen)
            if (!b) return false;
        return true;
    }

    Typing typing_of(std::uint64_t v) const {
        std::vector<std::vector<Nfa>> parts(n_);
        for (std::size_t j = 0; j < cells_.size(); ++j)
            if (v >> j & 1) parts[slot_of_[j]].push_back(cells_[j]);
        Typing t;
        for (auto& p : parts) t.push_back(minimal_trim(unite_all(p)));
        return t;
    }

    void collect_unsound_tuples() {
        std::vector<std::vector<std::size_t>> by_slot(n_);
        for (std::size_t j = 0; j < cells_.size(); ++j) by_slot[slot_of_[j]].push_back(j);
        unsound_with_.assign(cells_.size(), {});
        std::vector<std::size_t> pos(n_, 0);
        std::uint64_t count = 0;
        while (true) {
            if (++count > caps_.vectors) throw ResourceCap("vectors", caps_.vectors);
            Typing t;
            std::uint64_t mask = 0;
            for (std::size_t i = 0; i < n_; ++i) {
                std::size_t c = by_slot[i][pos[i]];
                t.push_back(cells_[c]);
                mask |= std::uint64_t{1} << c;
            }
            if (!includes(w_tau(d_.kernel, t), d_.target))
                for (std::size_t j = 0; j < cells_.size(); ++j)
                    if (mask >> j & 1) unsound_with_[j].push_back(mask);
            std::size_t i = n_;
            bool done = true;
            while (i > 0) {
                --i;
                if (++pos[i] < by_slot[i].size()) {
                    done = false;
                    break;
                }
                pos[i] = 0;
            }
            if (done) break;
        }
    }

    bool can_add(std::uint64_t v, std::size_t j) const {
        std::uint64_t w = v | std::uint64_t{1} << j;
        for (auto t : unsound_with_[j])
            if ((t & w) == t) return false;
        return true;
    }

    void backtrack(std::size_t j, std::uint64_t v, std::vector<std::uint64_t>& out, std::uint64_t& steps) {
        if (++steps > caps_.vectors) throw ResourceCap("vectors", caps_.vectors);
        if (j == cells_.size()) {
            for (std::size_t k = 0; k < cells_.size(); ++k)
                if (!(v >> k & 1) && can_add(v, k)) return;
            out.push_back(v);
            return;
        }
        if (can_add(v, j)) backtrack(j + 1, v | std::uint64_t{1} << j, out, steps);
        // Leaving j out only makes sense if some unsound tuple could still
        // block it; an always-addable cell belongs to every maximal vector.
        if (!unsound_with_[j].empty()) backtrack(j + 1, v, out, steps);
    }
};

BoxDesign normal_design(const BoxDesign& d) { return BoxDesign{normal_target(d.target), d.kernel}; }
BoxDesign normal_design(const WordDesign& d) { return BoxDesign{normal_target(d.target), KernelBox::of_word(d.kernel)}; }

std::optional<Typing> first(std::vector<Typing> v) {
    if (v.empty()) return std::nullopt;
    return std::move(v.front());
}

std::optional<Typing> perfect_of(const BoxDesign& d) {
    PerfectAutomaton p = build_perfect(d);
    if (d.kernel.functions.empty()) {
        if (check_local(d, {})) return Typing{};
        return std::nullopt;
    }
    if (!p.compatible) return std::nullopt;
    if (!check_local(d, p.omega)) return std::nullopt;
    return p.omega;
}

}  // namespace

std::optional<Typing> exists_perfect(const WordDesign& d) { return perfect_of(normal_design(d)); }

bool check_perfect(const WordDesign& d, const Typing& t) {
    auto p = exists_perfect(d);
    return p && typing_equivalent(*p, t);
}

std::optional<Typing> exists_local(const WordDesign& d, const Caps& caps) {
    BoxDesign b = normal_design(d);
    return first(VectorSearch(b, caps).run(Goal::FirstLocal));
}

std::optional<Typing> exists_ml(const WordDesign& d, const Caps& caps) { return exists_local(d, caps); }

std::vector<Typing> enumerate_ml(const WordDesign& d, const Caps& caps) {
    BoxDesign b = normal_design(d);
    return VectorSearch(b, caps).run(Goal::AllMaximal);
}

BoxPerfectResult exists_perfect_box(const BoxDesign& d) {
    BoxPerfectResult r;
    r.typing = perfect_of(normal_design(d));
    return r;
}

std::optional<Typing> exists_local_box(const BoxDesign& d, const Caps& caps) {
    BoxDesign b = normal_design(d);
    return first(VectorSearch(b, caps).run(Goal::FirstLocal));
}

std::optional<Typing> exists_ml_box(const BoxDesign& d, const Caps& caps) { return exists_local_box(d, caps); }

std::vector<Typing> enumerate_ml_box(const BoxDesign& d, const Caps& caps) {
    BoxDesign b = normal_design(d);
    return VectorSearch(b, caps).run(Goal::AllMaximal);
}

}  // namespace dxd
