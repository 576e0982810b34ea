#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace dxd {

using Symbol = std::string;
using Word = std::vector<Symbol>;

// Function symbols ("docking points") carry this prefix everywhere, so they
// can never collide with element names.
inline constexpr char kFunctionPrefix = '@';
inline bool is_function_symbol(const Symbol& s) { return !s.empty() && s[0] == kFunctionPrefix; }

// The empty symbol marks an epsilon transition.
inline const Symbol kEpsilon{};

struct Edge {
    Symbol sym;
    int to;
    bool operator<(const Edge& o) const { return sym != o.sym ? sym < o.sym : to < o.to; }
    bool operator==(const Edge& o) const { return sym == o.sym && to == o.to; }
};

// Finite automaton over string symbols. States are 0..size()-1. The
// optional `label` vector records where a state came from (the source state
// of a local automaton, a product pair, ...). Labels are diagnostic, except in
// the perfect automaton where they drive the linking of local automata.
struct Nfa {
    std::vector<std::vector<Edge>> out;
    std::vector<bool> final;
    std::vector<int> label;
    std::set<Symbol> alphabet;
    int initial = 0;

    Nfa() { add_state(false); }

    int size() const { return static_cast<int>(out.size()); }
    int add_state(bool is_final = false, int lab = -1);
    void add_edge(int from, const Symbol& sym, int to);
    std::set<int> finals() const;
    std::size_t edge_count() const;
};

// A DFA is an Nfa without epsilon edges and with at most one edge per
// (state, symbol). Kept as an alias: every algorithm accepts both.
using Dfa = Nfa;

// Fixed-width box language S1 S2 ... Sn.
struct BoxLang {
    std::vector<std::set<Symbol>> cells;
    std::size_t width() const { return cells.size(); }
    static BoxLang of_word(const Word& w);
};

// ---- basic languages
Nfa empty_language();
Nfa epsilon_language();
Nfa symbol_language(const Symbol& s);
Nfa word_language(const Word& w);
Nfa box_language(const BoxLang& b);
Nfa universal_language(const std::set<Symbol>& over);

// ---- membership and structure
bool accepts(const Nfa& a, const Word& w);
std::set<int> epsilon_closure(const Nfa& a, const std::set<int>& states);
bool has_epsilon(const Nfa& a);
bool is_deterministic(const Nfa& a);
Nfa remove_epsilon(const Nfa& a);
std::vector<bool> reachable_states(const Nfa& a);
std::vector<bool> coreachable_states(const Nfa& a);
// Keeps only useful states; the empty language becomes one non-final state.
Nfa trim(const Nfa& a);
bool is_empty(const Nfa& a);
std::optional<Word> shortest_word(const Nfa& a);
// All accepted words of length <= max_len, sorted by (length, lexicographic).
std::vector<Word> words_up_to(const Nfa& a, std::size_t max_len);
// Symbols that label an edge on some accepting path.
std::set<Symbol> useful_symbols(const Nfa& a);

// ---- boolean and regular operations
enum class ComposeOp { Concat, Union, Intersect, Difference };
Nfa compose(ComposeOp op, const Nfa& a, const Nfa& b);
Nfa concat(const Nfa& a, const Nfa& b);
Nfa unite(const Nfa& a, const Nfa& b);
Nfa intersect(const Nfa& a, const Nfa& b);
Nfa difference(const Nfa& a, const Nfa& b);
Nfa star(const Nfa& a);
Nfa complement(const Nfa& a, const std::set<Symbol>& over);
Nfa concat_all(const std::vector<Nfa>& parts);
Nfa unite_all(const std::vector<Nfa>& parts);
// Replaces every symbol s by map(s); symbols missing from the map are kept.
Nfa rename_symbols(const Nfa& a, const std::map<Symbol, Symbol>& map);
// Replaces each symbol by the language of the mapped automaton (symbols
// missing from the map are kept as single-symbol languages).
Nfa substitute(const Nfa& a, const std::map<Symbol, Nfa>& map);
// Drops every edge whose symbol is in `drop`.
Nfa without_symbols(const Nfa& a, const std::set<Symbol>& drop);

// ---- determinization and minimization
// Subset construction; if `complete_over` is given the result is completed
// with a sink over that alphabet.
Dfa determinize(const Nfa& a, const std::set<Symbol>* complete_over = nullptr);
// Minimal complete DFA over a.alphabet (includes a sink when needed).
Dfa minimize(const Nfa& a);
// Minimal DFA without the sink state (trimmed).
Dfa minimal_trim(const Nfa& a);

// ---- decision procedures
std::optional<Word> inclusion_counterexample(const Nfa& a, const Nfa& b);  // word in L(a) - L(b)
bool includes(const Nfa& a, const Nfa& b);   // L(a) subset of L(b)
bool equivalent(const Nfa& a, const Nfa& b);
bool intersects(const Nfa& a, const Nfa& b);

// ---- delimited strings and local automata (epsilon-free input expected)
struct Delimiters {
    std::set<int> ini;
    std::set<int> fin;
};
Delimiters delimiter_states(const Nfa& a, const Word& w);
Delimiters box_delimiters(const Nfa& a, const BoxLang& b);
// Pairs (p, q) such that q is reached from p by reading some string of L(b).
std::set<std::pair<int, int>> box_relation(const Nfa& a, const BoxLang& b);
// Pairs (p, q) such that q is reachable from p (reflexive).
std::vector<std::vector<bool>> reachability(const Nfa& a);
// The sub-automaton of transitions lying on qi -> qf paths; states keep
// their indices from `a` in `label`.
Nfa local_automaton(const Nfa& a, int qi, int qf);

std::string to_string(const Word& w);
Word parse_word(const std::string& text);  // whitespace separated symbols

}  // namespace dxd
