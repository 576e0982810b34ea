#include "dxd/document.hpp"

#include <cctype>
#include <set>

#include "dxd/errors.hpp"

namespace dxd {

std::size_t UTree::size() const {
    std::size_t n = 1;
    for (auto& c : children) n += c.size();
    return n;
}

std::vector<const UTree*> preorder(const UTree& t) {
    std::vector<const UTree*> out;
    std::vector<const UTree*> stack{&t};
    while (!stack.empty()) {
        const UTree* n = stack.back();
        stack.pop_back();
        out.push_back(n);
        for (auto it = n->children.rbegin(); it != n->children.rend(); ++it) stack.push_back(&*it);
    }
    return out;
}

Word child_string(const UTree& t) {
    Word w;
    for (auto& c : t.children) w.push_back(c.label);
    return w;
}

std::string to_string(const UTree& t) {
    std::string s = t.label;
    if (t.children.empty()) return s;
    s += '(';
    for (std::size_t i = 0; i < t.children.size(); ++i) {
        if (i) s += ' ';
        s += to_string(t.children[i]);
    }
    s += ')';
    return s;
}

namespace {

bool label_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#' || c == '.' || c == ':' || c == '@' ||
           c == '-';
}

class TreeParser {
public:
    explicit TreeParser(const std::string& t) : text_(t) {}

    UTree run() {
        UTree t = node();
        skip();
        if (pos_ < text_.size()) throw InputError("trailing text after tree", pos_);
        return t;
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;

    void skip() {
        while (pos_ < text_.size() && (std::isspace(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == ','))
            ++pos_;
    }

    UTree node() {
        skip();
        std::size_t start = pos_;
        while (pos_ < text_.size() && label_char(text_[pos_])) ++pos_;
        if (start == pos_) {
            if (pos_ >= text_.size()) throw InputError("tree expected at end of input", pos_);
            throw InputError("label expected, found '" + std::string(1, text_[pos_]) + "'", pos_);
        }
        UTree t{text_.substr(start, pos_ - start), {}};
        if (t.label.size() == 1 && t.label[0] == kFunctionPrefix) throw InputError("function name missing after '@'", start);
        std::size_t after = pos_;
        while (after < text_.size() && std::isspace(static_cast<unsigned char>(text_[after]))) ++after;
        if (after < text_.size() && text_[after] == '(') {
            pos_ = after + 1;
            while (true) {
                skip();
                if (pos_ >= text_.size()) throw InputError("missing ')'", pos_);
                if (text_[pos_] == ')') {
                    ++pos_;
                    break;
                }
                t.children.push_back(node());
            }
        }
        return t;
    }
};

void check_kernel(const UTree& t, bool is_root, std::set<Symbol>& seen, std::vector<Symbol>& order) {
    if (is_function_symbol(t.label)) {
        if (is_root) throw KernelError(KernelError::Kind::FunctionRoot, "kernel root must be an element, found " + t.label);
        if (!t.children.empty())
            throw KernelError(KernelError::Kind::FunctionNotLeaf, "function node " + t.label + " must be a leaf");
        if (!seen.insert(t.label).second)
            throw KernelError(KernelError::Kind::DuplicateFunction, "function " + t.label + " occurs more than once");
        order.push_back(t.label);
        return;
    }
    for (auto& c : t.children) check_kernel(c, false, seen, order);
}

void expand(const UTree& k, const Extension& e, UTree& out) {
    out.label = k.label;
    for (auto& c : k.children) {
        if (is_function_symbol(c.label)) {
            auto it = e.find(c.label);
            if (it == e.end()) throw InputError("no tree assigned to function " + c.label);
            for (auto& g : it->second.children) out.children.push_back(g);
        } else {
            out.children.emplace_back();
            expand(c, e, out.children.back());
        }
    }
}

}  // namespace

UTree parse_tree(const std::string& text) { return TreeParser(text).run(); }

KernelDoc make_kernel(UTree t) {
    KernelDoc k;
    std::set<Symbol> seen;
    check_kernel(t, true, seen, k.functions);
    k.tree = std::move(t);
    return k;
}

KernelDoc parse_kernel(const std::string& text) { return make_kernel(parse_tree(text)); }

std::size_t KernelDoc::function_index(const Symbol& f) const {
    for (std::size_t i = 0; i < functions.size(); ++i)
        if (functions[i] == f) return i;
    throw InputError("unknown function " + f);
}

UTree materialize(const KernelDoc& k, const Extension& e) {
    UTree out;
    expand(k.tree, e, out);
    return out;
}

Word kernel_string(const KernelDoc& k, std::size_t node) {
    auto nodes = preorder(k.tree);
    if (node >= nodes.size()) throw InputError("node index out of range");
    return child_string(*nodes[node]);
}

}  // namespace dxd
