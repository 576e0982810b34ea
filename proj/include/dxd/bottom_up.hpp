#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dxd/document.hpp"
#include "dxd/schema.hpp"

namespace dxd {

// A kernel together with one local type per function, in function order.
struct BottomUpDesign {
    KernelDoc kernel;
    std::vector<TreeGrammar> typing;
    GrammarClass cls = GrammarClass::Edtd;
    Mechanism mech = Mechanism::Nfa;
};

// Names used by build_t_tau. Kernel node with pre-order index p and label a
// becomes "a#x<p>"; name n of the i-th typing (1-based) becomes
// base(n)#f<i> or base(n)#f<i>.<k> when n was base#k.
Symbol kernel_node_name(const Symbol& label, std::size_t preorder_index);
Symbol typing_name(const Symbol& name, std::size_t function_number);

// The EDTD whose language is the set of all extensions of the kernel by
// trees of the typing. Function slots inline the renamed root content of
// their type; the kernel's own nodes get one fresh name each.
TreeGrammar build_t_tau(const KernelDoc& k, const std::vector<TreeGrammar>& typing,
                        Mechanism mech = Mechanism::Nfa);

struct ConsResult {
    bool consistent = false;
    std::optional<TreeGrammar> type;  // type_T(typing) when consistent
    std::string reason;               // why not, when inconsistent
};

// Decides whether the extension language is definable in d.cls with d.mech
// and, if so, synthesizes the defining grammar. The SDTD and DTD cases merge
// same-label names bottom-up over the kernel; a pair with different subtree
// languages is reported as inconsistent.
ConsResult cons_and_synthesize(const BottomUpDesign& d);
bool cons(const BottomUpDesign& d);
std::optional<TreeGrammar> synthesize_type(const BottomUpDesign& d);

// Exact class-definability test through the closure of T(typing). Used as
// an oracle; see the README for the case where it differs from cons().
bool definable_in_class(const TreeGrammar& g, GrammarClass cls);

}  // namespace dxd
