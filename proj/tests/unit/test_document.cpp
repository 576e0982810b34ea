#include <doctest.h>

#include "dxd/document.hpp"
#include "dxd/errors.hpp"
#include "dxd/schema.hpp"
#include "dxd/validate.hpp"
#include "support/oracles.hpp"

using namespace dxd;

namespace {

const char* kEurostatDtd = R"(class: dtd
root: eurostat
eurostat -> averages nationalIndex*
averages -> (Good index+)+
nationalIndex -> country Good (index | value year)
index -> value year
)";

const char* kEurostatEdtd = R"(class: edtd
root: eurostat
eurostat -> averages (nationalIndex#A nationalIndex#B)+
averages -> (Good index+)+
nationalIndex#A -> country Good index
nationalIndex#B -> country Good value year
index -> value year
)";

}  // namespace

TEST_CASE("kernel parsing") {
    auto k = parse_kernel("s0(a, @f1, b(@f2))");
    CHECK(k.functions == std::vector<Symbol>{"@f1", "@f2"});
    CHECK(k.function_index("@f2") == 1);
    CHECK_THROWS_AS(parse_kernel("s(@f, @f)"), KernelError);
    try {
        parse_kernel("s(@f, @f)");
    } catch (const KernelError& e) {
        CHECK(e.kind() == KernelError::Kind::DuplicateFunction);
    }
    CHECK_THROWS_AS(parse_kernel("@f"), KernelError);
    CHECK_THROWS_AS(parse_tree("a(b"), InputError);
    auto t = parse_tree("a");
    CHECK(t.is_leaf());
    CHECK(t.label == "a");
    CHECK(parse_tree(to_string(parse_tree("s(a b(c d) e)"))) == parse_tree("s(a b(c d) e)"));
}

TEST_CASE("materialize") {
    auto k = parse_kernel("s(a @f1 b(@f2))");
    Extension e{{"@f1", parse_tree("s1(c(d d))")}, {"@f2", parse_tree("s2(d(e f))")}};
    CHECK(materialize(k, e) == parse_tree("s(a c(d d) b(d(e f)))"));
    Extension none{{"@f1", parse_tree("s1")}, {"@f2", parse_tree("s2")}};
    CHECK(materialize(k, none) == parse_tree("s(a b)"));
    auto plain = parse_kernel("s(a b)");
    CHECK(materialize(plain, {}) == plain.tree);
}

TEST_CASE("kernel strings") {
    auto k = parse_kernel("s0(a @f1 c @f2)");
    CHECK(kernel_string(k, 0) == Word{"a", "@f1", "c", "@f2"});
    auto one = parse_kernel("s(a(b))");
    CHECK(kernel_string(one, 1) == Word{"b"});
    auto fns = parse_kernel("s(@f1 @f2)");
    CHECK(kernel_string(fns, 0) == Word{"@f1", "@f2"});
}

TEST_CASE("validation against the price-index DTD") {
    auto g = parse_grammar(kEurostatDtd);
    auto ok = parse_tree(
        "eurostat(averages(Good index(value year) Good index(value year) index(value year)) "
        "nationalIndex(country Good value year) nationalIndex(country Good index(value year)))");
    CHECK(validate(ok, g));
    CHECK_FALSE(first_violation(ok, g));
    auto bad = parse_tree("eurostat(averages(Good index(value)))");
    CHECK_FALSE(validate(bad, g));
    auto where = first_violation(bad, g);
    REQUIRE(where);
    CHECK(where->find("index") != std::string::npos);
    auto leaf = parse_grammar("class: dtd\nroot: s\ns -> ε\n");
    CHECK(validate(parse_tree("s"), leaf));
}

TEST_CASE("witnesses") {
    auto g = parse_grammar("class: sdtd\nroot: s\ns -> a#1 b\na#1 -> c\nb -> a#2\na#2 -> d\n");
    auto t = parse_tree("s(a(c) b(a(d)))");
    auto wt = witness(t, g);
    REQUIRE(wt);
    CHECK(wt->children[0].label == "a#1");
    CHECK(wt->children[1].children[0].label == "a#2");
    CHECK_FALSE(witness(parse_tree("s(a(d) b(a(d)))"), g));
    // Two formats of national index under one parent: the names are picked
    // by content.
    auto e = parse_grammar(kEurostatEdtd);
    CHECK(root_names(parse_tree("nationalIndex(country Good index(value year))"), e) ==
          std::set<Symbol>{"nationalIndex#A"});
}

TEST_CASE("validation agrees with the brute-force oracle") {
    std::mt19937 rng(3);
    std::vector<Symbol> labels{"s", "a", "b"};
    std::vector<TreeGrammar> grammars{
        parse_grammar("class: dtd\nroot: s\ns -> a* b?\na -> b*\nb -> ε\n"),
        parse_grammar("class: edtd\nroot: s\ns -> (a#1 a#2)+\na#1 -> b\na#2 -> ε\nb -> ε\n"),
        parse_grammar("class: edtd\nroot: s\ns -> a#1 b | a#2\na#1 -> a#2*\na#2 -> b\nb -> a#2?\n"),
        parse_grammar("class: sdtd\nroot: s\ns -> a#1 b*\na#1 -> b\nb -> a#2*\na#2 -> ε\n"),
    };
    int positives = 0;
    for (auto& g : grammars) {
        for (auto& t : oracle::all_trees(labels, 5)) {
            bool v = validate(t, g);
            CHECK(v == oracle::brute_validate(t, g));
            CHECK(bool(first_violation(t, g)) == !v);
            positives += v;
        }
        for (int i = 0; i < 40; ++i) {
            auto t = oracle::random_tree(rng, labels, 8);
            CHECK(validate(t, g) == oracle::brute_validate(t, g));
        }
    }
    CHECK(positives > 10);
}
