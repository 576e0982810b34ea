#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dxd/document.hpp"
#include "dxd/schema.hpp"

namespace dxd {

// Membership of t in L(g). DTDs are checked node by node; for the classes
// with specialized names a bottom-up run computes, for every node, the set of
// names that can label it.
bool validate(const UTree& t, const TreeGrammar& g);

// The names a bottom-up run assigns to the root of t (before the start-name
// check).
std::set<Symbol> root_names(const UTree& t, const TreeGrammar& g);

// For a single-type grammar: the unique tree over specialized names whose
// projection is t, when t is valid.
std::optional<UTree> witness(const UTree& t, const TreeGrammar& g);

// Path of the first node (document order, deepest-first for bottom-up
// failures) whose children cannot be typed, written /label[i]/label[j]...
// Absent when t is valid.
std::optional<std::string> first_violation(const UTree& t, const TreeGrammar& g);

}  // namespace dxd
