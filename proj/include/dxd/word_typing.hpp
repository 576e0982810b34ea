#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dxd/automata.hpp"
#include "dxd/errors.hpp"

namespace dxd {

// w0 f1 w1 ... fn wn
struct KernelWord {
    std::vector<Word> segments;    // n + 1 entries
    std::vector<Symbol> functions; // n entries, pairwise distinct
};

// B0 f1 B1 ... fn Bn with fixed-width boxes.
struct KernelBox {
    std::vector<BoxLang> segments;
    std::vector<Symbol> functions;

    static KernelBox of_word(const KernelWord& w);
};

// "a @f1 c @f2 e"
KernelWord parse_kernel_word(const std::string& text);
// "{a,b}{c} @f1 {d}"; a bare symbol is a one-symbol cell.
KernelBox parse_kernel_box(const std::string& text);
std::string to_string(const KernelWord& k);
std::string to_string(const KernelBox& k);

using Typing = std::vector<Nfa>;

struct WordDesign {
    Nfa target;
    KernelWord kernel;
};

struct BoxDesign {
    Nfa target;
    KernelBox kernel;
};

// Extension language w0 . t1 . w1 ... tn . wn.
Nfa w_tau(const KernelWord& k, const Typing& t);
Nfa w_tau(const KernelBox& k, const Typing& t);

// The perfect automaton of a target and a kernel. Slot i (0-based here)
// collects the local automata A(p, q) of the target such that p is reached
// from the initial state by the kernel prefix, and the rest of the kernel
// leads from q to a final state.
struct PerfectAutomaton {
    Nfa target;                                          // the automaton used (epsilon-free)
    std::vector<std::vector<std::pair<int, int>>> slot_pairs;
    std::vector<std::vector<Nfa>> aut;                   // Aut(Omega_i), one per distinct language
    std::vector<Nfa> omega;                              // Omega_i, union of aut[i]
    Nfa composite;                                       // segments and slots linked by epsilon edges
    bool compatible = false;
};

// Uses `a` exactly as given. The design-level functions below first replace
// the target by its trimmed minimal DFA.
PerfectAutomaton build_perfect(const Nfa& a, const KernelWord& w);
PerfectAutomaton build_perfect(const Nfa& a, const KernelBox& b);
PerfectAutomaton build_perfect(const WordDesign& d);
PerfectAutomaton build_perfect(const BoxDesign& d);
bool compatible(const WordDesign& d);
Typing omega_typing(const PerfectAutomaton& p);  // throws InputError when incompatible

// Disjoint pieces of Omega_i by membership pattern over Aut(Omega_i).
std::vector<Nfa> decompose(const PerfectAutomaton& p, std::size_t slot, const Caps& caps = {});

bool check_sound(const WordDesign& d, const Typing& t);
bool check_local(const WordDesign& d, const Typing& t);
bool check_maximal_local(const WordDesign& d, const Typing& t, const Caps& caps = {});
bool check_perfect(const WordDesign& d, const Typing& t);

bool check_sound(const BoxDesign& d, const Typing& t);
bool check_local(const BoxDesign& d, const Typing& t);
bool check_maximal_local(const BoxDesign& d, const Typing& t, const Caps& caps = {});

// Searches over unions of Dec cells. All of them throw ResourceCap when a cap
// fires before the answer is known.
std::optional<Typing> exists_perfect(const WordDesign& d);
std::optional<Typing> exists_local(const WordDesign& d, const Caps& caps = {});
std::optional<Typing> exists_ml(const WordDesign& d, const Caps& caps = {});
std::vector<Typing> enumerate_ml(const WordDesign& d, const Caps& caps = {});

struct BoxPerfectResult {
    std::optional<Typing> typing;
    // Always set: the Omega criterion is applied to boxes as an extension of
    // the word-kernel result, and callers should say so.
    bool extended_criterion = true;
};
BoxPerfectResult exists_perfect_box(const BoxDesign& d);
std::optional<Typing> exists_local_box(const BoxDesign& d, const Caps& caps = {});
std::optional<Typing> exists_ml_box(const BoxDesign& d, const Caps& caps = {});
std::vector<Typing> enumerate_ml_box(const BoxDesign& d, const Caps& caps = {});

// Slotwise comparisons of typings.
bool typing_equivalent(const Typing& a, const Typing& b);
bool typing_leq(const Typing& a, const Typing& b);

}  // namespace dxd
