#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dxd/automata.hpp"

namespace dxd {

// Regular expression AST: eps | empty | a | r r | r + r | r? | r+ | r*.
struct Regex {
    enum class Kind { Epsilon, Empty, Sym, Concat, Alt, Opt, Plus, Star };
    Kind kind = Kind::Epsilon;
    Symbol sym;                               // Sym only
    std::shared_ptr<const Regex> left, right; // right unused by unary nodes

    static std::shared_ptr<const Regex> eps();
    static std::shared_ptr<const Regex> empty();
    static std::shared_ptr<const Regex> symbol(Symbol s);
    static std::shared_ptr<const Regex> concat(std::shared_ptr<const Regex> l, std::shared_ptr<const Regex> r);
    static std::shared_ptr<const Regex> alt(std::shared_ptr<const Regex> l, std::shared_ptr<const Regex> r);
    static std::shared_ptr<const Regex> unary(Kind k, std::shared_ptr<const Regex> r);
};
using RegexPtr = std::shared_ptr<const Regex>;

// Parser for the textual syntax: symbols are maximal runs of
// [A-Za-z0-9_#.:@-] (a symbol may not start with '#'), '(' ')' group, infix
// '+' and '|' alternate, postfix '?', '+', '*', juxtaposition, ',' or '·'
// concatenate, 'ε' / '%e' is epsilon and '%0' is the empty set. A '+' is
// postfix when it directly follows an operand and is not followed by the
// start of an operand; otherwise it is alternation.
RegexPtr parse_regex(const std::string& text);

// Prints with minimal parentheses; parse_regex(to_string(r)) has the same AST
// modulo associativity of concatenation and alternation.
std::string to_string(const RegexPtr& r);
std::size_t regex_size(const RegexPtr& r);
bool structurally_equal(const RegexPtr& a, const RegexPtr& b);
std::set<Symbol> regex_symbols(const RegexPtr& r);
bool nullable(const RegexPtr& r);
RegexPtr rename_regex(const RegexPtr& r, const std::map<Symbol, Symbol>& map);
RegexPtr substitute_regex(const RegexPtr& r, const std::map<Symbol, RegexPtr>& map);

// Glushkov position automaton: state 0 is initial, state i is position i.
Nfa to_nfa(const RegexPtr& r);
// The Glushkov automaton is deterministic.
bool is_dre(const RegexPtr& r);
// Brueggemann-Klein/Wood test on the minimal DFA of L(a).
bool is_one_unambiguous(const Nfa& a);
// A deterministic expression for L(a), or nothing when L(a) is not
// one-unambiguous. Throws ResourceCap when the expression would exceed
// `max_nodes`.
std::optional<RegexPtr> to_dre(const Nfa& a, std::size_t max_nodes = 10000);
// Some (not necessarily deterministic) expression for L(a) by state
// elimination.
RegexPtr to_regex(const Nfa& a);

}  // namespace dxd
