#include <doctest.h>

#include "dxd/regex.hpp"
#include "dxd/word_typing.hpp"
#include "support/oracles.hpp"

using namespace dxd;

namespace {

Nfa re(const char* s) { return to_nfa(parse_regex(s)); }
WordDesign design(const char* target, const char* kernel) { return {re(target), parse_kernel_word(kernel)}; }

bool typing_is(const Typing& t, std::vector<const char*> expected) {
    if (t.size() != expected.size()) return false;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (!equivalent(t[i], re(expected[i]))) return false;
    return true;
}

bool contains_typing(const std::vector<Typing>& all, std::vector<const char*> expected) {
    for (auto& t : all)
        if (typing_is(t, expected)) return true;
    return false;
}

}  // namespace

TEST_CASE("kernel strings") {
    auto k = parse_kernel_word("a @f1 c @f2 e");
    CHECK(k.functions == std::vector<Symbol>{"@f1", "@f2"});
    CHECK(k.segments.size() == 3);
    CHECK(k.segments[1] == Word{"c"});
    CHECK(to_string(k) == "a @f1 c @f2 e");
    CHECK_THROWS_AS(parse_kernel_word("@f1 @f1"), InputError);
    auto b = parse_kernel_box("{a,b}{c} @f1 d");
    CHECK(b.segments[0].width() == 2);
    CHECK(b.segments[0].cells[0] == std::set<Symbol>{"a", "b"});
    CHECK(b.segments[1].cells[0] == std::set<Symbol>{"d"});
}

TEST_CASE("extension language") {
    auto k = parse_kernel_word("@f1");
    CHECK(equivalent(w_tau(k, {re("a* b")}), re("a* b")));
    CHECK(equivalent(w_tau(parse_kernel_word("a @f1 b @f2"), {re("a*"), re("c*")}), re("a a* b c*")));
    CHECK(equivalent(w_tau(parse_kernel_word("a @f1 b @f2 c"), {epsilon_language(), epsilon_language()}), re("a b c")));
}

TEST_CASE("perfect automaton of a chain") {
    auto d = design("a b c c d e", "a @f1 c @f2 e");
    auto p = build_perfect(d);
    CHECK(p.compatible);
    CHECK(typing_is(omega_typing(p), {"b c?", "c? d"}));
    CHECK(equivalent(p.composite, d.target));
    // (b, cd) is local, and strictly below Omega.
    Typing small{re("b"), re("c d")};
    CHECK(check_local(d, small));
    CHECK(typing_leq(small, p.omega));
    CHECK_FALSE(typing_leq(p.omega, small));
}

TEST_CASE("perfect automaton with a loop") {
    auto d = design("a (b c)* d", "a @f1 @f2 d");
    auto p = build_perfect(d);
    REQUIRE(p.aut.size() == 2);
    auto has = [](const std::vector<Nfa>& v, const char* r) {
        for (auto& a : v)
            if (equivalent(a, re(r))) return true;
        return false;
    };
    CHECK(p.aut[0].size() == 2);
    CHECK(has(p.aut[0], "(b c)*"));
    CHECK(has(p.aut[0], "(b c)* b"));
    CHECK(p.aut[1].size() == 2);
    CHECK(has(p.aut[1], "(b c)*"));
    CHECK(has(p.aut[1], "c (b c)*"));
    CHECK(typing_is(omega_typing(p), {"(b c)* b?", "c? (b c)*"}));
    CHECK_FALSE(check_sound(d, p.omega));
    CHECK(accepts(w_tau(d.kernel, p.omega), parse_word("a b c c b c d")));
    CHECK(includes(p.composite, d.target));
    // Cells of slot 1 are the two disjoint automata themselves.
    auto cells = decompose(p, 0);
    CHECK(cells.size() == 2);
}

TEST_CASE("compatibility") {
    CHECK_FALSE(compatible(design("a b c", "a @f1 d")));
    CHECK(compatible(design("a* b c*", "@f1 @f2")));
    auto one = design("a (b | c)* | d", "@f1");
    auto p = build_perfect(one);
    CHECK(equivalent(omega_typing(p)[0], one.target));
    CHECK_THROWS_AS(omega_typing(build_perfect(design("a b c", "a @f1 d"))), InputError);
}

TEST_CASE("local and maximal local typings") {
    auto d = design("a* b c*", "@f1 @f2");
    CHECK(check_local(d, {re("a* b c*"), re("c*")}));
    CHECK(check_local(d, {re("a?"), re("a* b c*")}));
    CHECK_FALSE(check_maximal_local(d, {re("a?"), re("a* b c*")}));
    CHECK(check_maximal_local(d, {re("a*"), re("a* b c*")}));
    CHECK_FALSE(check_local(design("a b | b a", "@f1 @f2"), {re("a"), re("b")}));
    CHECK(check_sound(design("a b | b a", "@f1 @f2"), {re("a"), re("b")}));

    auto u = design("(a b)*", "@f1 @f2");
    CHECK(check_maximal_local(u, {re("(a b)*"), re("(a b)*")}));
    CHECK_FALSE(check_maximal_local(u, {re("a"), re("b")}));
    CHECK_FALSE(check_perfect(u, {re("(a b)*"), re("(a b)*")}));
}

TEST_CASE("searches on the small designs") {
    auto d = design("a* b c*", "@f1 @f2");
    auto ml = enumerate_ml(d);
    CHECK(ml.size() == 2);
    CHECK(contains_typing(ml, {"a*", "a* b c*"}));
    CHECK(contains_typing(ml, {"a* b c*", "c*"}));
    CHECK_FALSE(exists_perfect(d));
    auto one = exists_ml(d);
    REQUIRE(one);
    CHECK(check_maximal_local(d, *one));

    auto p = exists_perfect(design("a* b c*", "@f1 b @f2"));
    REQUIRE(p);
    CHECK(typing_is(*p, {"a*", "c*"}));
    CHECK(check_perfect(design("a* b c*", "@f1 b @f2"), *p));

    auto u = enumerate_ml(design("(a b)*", "@f1 @f2"));
    REQUIRE(u.size() == 1);
    CHECK(typing_is(u[0], {"(a b)*", "(a b)*"}));

    auto plus = enumerate_ml(design("(a b)+", "@f1 @f2"));
    CHECK(plus.size() == 3);
    CHECK(contains_typing(plus, {"(a b)*", "(a b)+"}));
    CHECK(contains_typing(plus, {"(a b)+", "(a b)*"}));
    CHECK(contains_typing(plus, {"a (b a)*", "b (a b)*"}));
    CHECK_FALSE(exists_perfect(design("(a b)+", "@f1 @f2")));
}

TEST_CASE("kernels without functions") {
    auto d = design("a b", "a b");
    auto t = exists_local(d);
    REQUIRE(t);
    CHECK(t->empty());
    CHECK_FALSE(exists_local(design("a b*", "a b")));
}

// The union of two words split at every point: taking one slot empty and the
// other the whole target is always local, so a local typing does exist.
TEST_CASE("two words of length two") {
    auto d = design("a b | b a", "@f1 @f2");
    CHECK(compatible(d));
    auto p = build_perfect(d);
    CHECK(equivalent(p.composite, d.target));
    CHECK(check_local(d, {epsilon_language(), d.target}));
    auto ml = enumerate_ml(d);
    CHECK(ml.size() == 2);
    CHECK(contains_typing(ml, {"ε", "a b | b a"}));
    CHECK(contains_typing(ml, {"a b | b a", "ε"}));
}

TEST_CASE("box kernels") {
    auto b = BoxDesign{re("(a | b) c*"), parse_kernel_box("{a,b} @f1")};
    auto r = exists_perfect_box(b);
    CHECK(r.extended_criterion);
    REQUIRE(r.typing);
    CHECK(equivalent((*r.typing)[0], re("c*")));
    auto none = BoxDesign{re("a c*"), parse_kernel_box("{d} @f1")};
    CHECK_FALSE(exists_local_box(none));
    CHECK_FALSE(exists_perfect_box(none).typing);
    CHECK(enumerate_ml_box(none).empty());
}

TEST_CASE("single-string boxes reduce to words") {
    std::mt19937 rng(29);
    std::vector<Symbol> sigma{"a", "b"};
    int cases = 0;
    while (cases < 20) {
        auto r = oracle::random_regex(rng, sigma, 3);
        Nfa target = to_nfa(r);
        std::uniform_int_distribution<int> coin(0, 2);
        KernelWord k;
        k.segments.push_back({});
        for (int i = 1; i <= 2; ++i) {
            if (coin(rng) == 0) k.segments.back().push_back(sigma[coin(rng) % 2]);
            k.functions.push_back("@f" + std::to_string(i));
            k.segments.push_back({});
        }
        WordDesign d{target, k};
        BoxDesign b{target, KernelBox::of_word(k)};
        auto wl = enumerate_ml(d), bl = enumerate_ml_box(b);
        REQUIRE(wl.size() == bl.size());
        for (std::size_t i = 0; i < wl.size(); ++i) CHECK(typing_equivalent(wl[i], bl[i]));
        CHECK(bool(exists_perfect(d)) == bool(exists_perfect_box(b).typing));
        ++cases;
    }
}

TEST_CASE("resource caps are reported") {
    Caps tight;
    tight.vectors = 1;
    CHECK_THROWS_AS(enumerate_ml(design("(a b)+", "@f1 @f2"), tight), ResourceCap);
    Caps one;
    one.slot_automata = 1;
    CHECK_THROWS_AS(exists_local(design("a (b c)* d", "a @f1 @f2 d"), one), ResourceCap);
}
