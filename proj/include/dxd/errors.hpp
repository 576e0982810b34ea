#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dxd {

// Malformed user input: bad regex text, bad tree term, bad grammar file.
// `position` is a byte offset (or line number for grammar files) when known.
class InputError : public std::runtime_error {
public:
    InputError(const std::string& what, std::size_t position = npos)
        : std::runtime_error(what), position_(position) {}
    std::size_t position() const { return position_; }
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::size_t position_;
};

// A configured search or size bound was hit. Callers must surface this as
// "undecided", never as a negative answer.
class ResourceCap : public std::runtime_error {
public:
    ResourceCap(std::string cap, std::uint64_t limit)
        : std::runtime_error("resource cap '" + cap + "' exceeded (limit " + std::to_string(limit) + ")"),
          cap_(std::move(cap)), limit_(limit) {}
    const std::string& cap() const { return cap_; }
    std::uint64_t limit() const { return limit_; }

private:
    std::string cap_;
    std::uint64_t limit_;
};

// The operation is meaningless for this input (e.g. a content model that
// cannot be expressed in the requested mechanism).
class NotRepresentable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Caps {
    std::uint64_t vectors = 1u << 20;     // subset vectors tried by the word searches
    std::uint64_t slot_automata = 16;     // |Aut(Omega_i)| per slot
    std::uint64_t kappa = 1u << 16;       // kappa assignments in the EDTD searches
    std::uint64_t regex_nodes = 10000;    // size of synthesized expressions

    // Reads DXD_CAPS ("vectors=...,aut=...,kappa=...,regex=...").
    static Caps from_env();
    static Caps parse(const std::string& spec);
};

}  // namespace dxd
