#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dxd/automata.hpp"

namespace dxd {

// Ordered unranked tree.
struct UTree {
    Symbol label;
    std::vector<UTree> children;

    bool is_leaf() const { return children.empty(); }
    std::size_t size() const;  // node count
    bool operator==(const UTree& o) const { return label == o.label && children == o.children; }
};

// Pre-order listing of the nodes of t (document order).
std::vector<const UTree*> preorder(const UTree& t);
Word child_string(const UTree& t);
std::string to_string(const UTree& t);

// Term syntax: label(child child ...), commas optional, "@name" for
// function leaves. Throws InputError on malformed text.
UTree parse_tree(const std::string& text);

// A kernel document: a tree whose function leaves are docking points.
struct KernelDoc {
    UTree tree;
    std::vector<Symbol> functions;  // "@f1", "@f2", ... in document order

    std::size_t function_index(const Symbol& f) const;  // position in `functions`
};

// Distinct failures when a term is not a valid kernel.
class KernelError : public std::runtime_error {
public:
    enum class Kind { FunctionRoot, FunctionNotLeaf, DuplicateFunction };
    KernelError(Kind k, const std::string& what) : std::runtime_error(what), kind_(k) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

KernelDoc parse_kernel(const std::string& text);
KernelDoc make_kernel(UTree t);  // checks the kernel invariants

// Maps each function symbol to the tree returned by the remote resource.
using Extension = std::map<Symbol, UTree>;

// Replaces every function leaf by the children of the root of its tree.
UTree materialize(const KernelDoc& k, const Extension& e);

// Child labels (functions included) of the node with pre-order index `node`.
Word kernel_string(const KernelDoc& k, std::size_t node);

}  // namespace dxd
