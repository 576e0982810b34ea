#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dxd/document.hpp"
#include "dxd/errors.hpp"
#include "dxd/schema.hpp"
#include "dxd/word_typing.hpp"

namespace dxd {

// A global type and a kernel; the grammar class of the target decides which
// reduction is used.
struct TreeDesign {
    TreeGrammar target;
    KernelDoc kernel;
};

// One grammar per function, in function order. Each root is a fresh name
// that only labels the root of the returned tree.
using TreeTyping = std::vector<TreeGrammar>;

// The typing handed to a check problem is not consistent with the kernel in
// the target's class, so locality questions are not asked.
class InconsistentTyping : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Assignment of specialized names to the element nodes of the kernel, keyed
// by pre-order index.
using Kappa = std::map<std::size_t, std::set<Symbol>>;

// The string problem attached to one kernel element node.
struct InducedDesign {
    std::size_t node = 0;             // pre-order index in the kernel
    std::set<Symbol> names;           // witness name(s) of the node
    BoxDesign design;                 // word designs use singleton cells
    std::vector<std::size_t> slots;   // global function indices, in kernel order
};

// DTD: one design per element node over pi(label). SDTD: witnesses are
// assigned top-down through the dual automaton and the kernel strings are
// written over specialized names. Absent when some kernel node cannot get a
// name at all (then no typing can be local).
std::optional<std::vector<InducedDesign>> induce_string_designs(const TreeDesign& d);

// EDTD: box designs induced by a normalized target and kappa.
std::vector<InducedDesign> induce_box_designs(const TreeGrammar& normalized, const KernelDoc& k, const Kappa& kappa);

// Builds the tree typing from per-slot content languages over the names of
// `target`: every type keeps all rules of the target and gets a fresh root.
TreeTyping lift_typing(const TreeGrammar& target, std::size_t function_count, const Typing& slots);
Symbol fresh_root_name(const TreeGrammar& target, std::size_t function_number);

// Per-slot content languages of `typing` over the names of `target`, as
// seen from the kernel (used by the string-level checks).
Typing extract_slot_typing(const TreeDesign& d, const TreeTyping& typing);

// Problems. The exists-searches return a typing whose grammars re-verify
// with the check functions; they throw ResourceCap when a cap fires.
std::optional<TreeTyping> tree_exists_local(const TreeDesign& d, const Caps& caps = {});
std::optional<TreeTyping> tree_exists_ml(const TreeDesign& d, const Caps& caps = {});
std::optional<TreeTyping> tree_exists_perfect(const TreeDesign& d, const Caps& caps = {});
std::vector<TreeTyping> tree_enumerate_ml(const TreeDesign& d, const Caps& caps = {});

// Check problems throw InconsistentTyping when the typing fails the
// class-consistency precheck.
bool tree_check_local(const TreeDesign& d, const TreeTyping& typing);
bool tree_check_ml(const TreeDesign& d, const TreeTyping& typing, const Caps& caps = {});
bool tree_check_perfect(const TreeDesign& d, const TreeTyping& typing, const Caps& caps = {});

// EDTD internals exposed for tests.
std::optional<Kappa> perfect_kappa(const TreeGrammar& normalized, const KernelDoc& k);
std::optional<Kappa> induced_kappa(const TreeGrammar& normalized, const KernelDoc& k, const TreeTyping& typing);

// Slotwise comparison of two tree typings (roots are relabeled first).
bool tree_typing_equivalent(const TreeTyping& a, const TreeTyping& b);
bool tree_typing_leq(const TreeTyping& a, const TreeTyping& b);

}  // namespace dxd
