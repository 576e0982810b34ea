#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dxd/automata.hpp"
#include "dxd/document.hpp"
#include "dxd/regex.hpp"

namespace dxd {

enum class GrammarClass { Dtd, Sdtd, Edtd };
enum class Mechanism { Nfa, Dfa, Nre, Dre };

std::string to_string(GrammarClass c);
std::string to_string(Mechanism m);
GrammarClass parse_class(const std::string& s);
Mechanism parse_mechanism(const std::string& s);

// Content model of one specialized name. The automaton is always present and
// is what the algorithms use; `regex` keeps the source expression for the
// expression-based mechanisms so that output stays readable.
struct ContentModel {
    Nfa nfa = epsilon_language();
    std::optional<RegexPtr> regex;
};

// One representation for DTDs, single-type EDTDs and EDTDs. Specialized
// names are written base#k and mu(base#k) = base; for a DTD every name is its
// own base. `roots` is a singleton for user grammars; normalization may
// produce several start names.
struct TreeGrammar {
    GrammarClass cls = GrammarClass::Edtd;
    Mechanism mech = Mechanism::Nfa;
    std::set<Symbol> roots;
    std::map<Symbol, ContentModel> rules;
    bool was_reduced = true;  // set by the loader

    static Symbol base(const Symbol& name);
    std::set<Symbol> names() const;
    std::set<Symbol> labels() const;
    std::set<Symbol> specializations(const Symbol& label) const;
    const Nfa& content(const Symbol& name) const;
    void set_content(const Symbol& name, Nfa a);
    void set_content(const Symbol& name, const RegexPtr& r);
    Symbol root() const;  // the unique root; throws when there are several
};

class EmptyLanguageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Grammar text format (see README). Applies reduce(); the result records in
// `was_reduced` whether the input already was.
TreeGrammar parse_grammar(const std::string& text);
std::string to_text(const TreeGrammar& g);
// Builds a grammar from (name, expression) pairs without reducing it.
TreeGrammar make_grammar(GrammarClass cls, Mechanism mech, const Symbol& root,
                         const std::vector<std::pair<Symbol, std::string>>& rules);

// Dual automaton over labels: state 0 is q0, state i+1 is the i-th name of
// g.names() (its index is kept in `label`).
Dfa dual(const TreeGrammar& g);
std::vector<Symbol> dual_state_names(const TreeGrammar& g);
// Names that derive at least one finite tree.
std::set<Symbol> mark_bound(const TreeGrammar& g);
bool is_reduced(const TreeGrammar& g);
TreeGrammar reduce(const TreeGrammar& g);  // throws EmptyLanguageError
bool is_single_type(const TreeGrammar& g);

// Tree automata. A Nuta has one state per specialized name; its horizontal
// languages are the content models.
struct Nuta {
    std::set<Symbol> states;
    std::map<Symbol, std::pair<Symbol, Nfa>> delta;  // state -> (label, horizontal language over states)
    std::set<Symbol> finals;
};
Nuta to_uta(const TreeGrammar& g);

// Bottom-up determinization: every state is a set of names of one label.
struct Duta {
    struct State {
        Symbol label;
        std::set<Symbol> names;
    };
    std::vector<State> states;
    std::map<Symbol, Dfa> horizontal;               // per label, over state ids "0", "1", ...
    std::map<Symbol, std::vector<int>> target;      // per label: horizontal DFA state -> Duta state or -1
    std::set<int> finals;
};
Duta determinize_uta(const Nuta& u);
// Equivalent EDTD whose same-label names have disjoint languages.
TreeGrammar normalize(const TreeGrammar& g);

// Reachable "types" of trees over several grammars at once: for every tree t
// the tuple of name sets each grammar assigns to the root of t.
struct TreeTypes {
    struct Type {
        Symbol label;
        std::vector<std::set<Symbol>> accept;
        UTree witness;
    };
    std::vector<Type> types;
};
TreeTypes explore_types(const std::vector<const TreeGrammar*>& gs);

std::optional<UTree> grammar_counterexample(const TreeGrammar& a, const TreeGrammar& b);  // tree in L(a) - L(b)
bool includes_grammar(const TreeGrammar& a, const TreeGrammar& b);
bool equivalent_grammar(const TreeGrammar& a, const TreeGrammar& b);
bool grammar_empty(const TreeGrammar& g);
// L(ga re-rooted at na) == L(gb re-rooted at nb).
bool same_subtree_language(const TreeGrammar& ga, const Symbol& na, const TreeGrammar& gb, const Symbol& nb);

// Smallest single-type grammar containing L(g), and smallest DTD containing
// L(g). L(g) is definable in the class iff it equals its closure.
TreeGrammar single_type_closure(const TreeGrammar& g);
TreeGrammar dtd_closure(const TreeGrammar& g);

// Re-expresses every content model in `mech` (nre/dre via expressions, dfa by
// determinization). Throws NotRepresentable for dre when impossible.
TreeGrammar with_mechanism(const TreeGrammar& g, Mechanism mech, std::size_t max_regex_nodes = 10000);

}  // namespace dxd
