#include <doctest.h>

#include "dxd/automata.hpp"
#include "dxd/regex.hpp"
#include "support/oracles.hpp"

using namespace dxd;

namespace {

Nfa re(const char* s) { return to_nfa(parse_regex(s)); }
Word w(const char* s) { return parse_word(s); }

std::set<Word> lang(const Nfa& a, const std::vector<Symbol>& sigma, std::size_t n) {
    return oracle::language_upto(a, sigma, n);
}

}  // namespace

TEST_CASE("membership") {
    CHECK(accepts(re("b*"), w("b b")));
    Nfa e;
    e.final[0] = true;
    CHECK(accepts(e, {}));
    CHECK(accepts(re("a (b c)* d"), w("a b c b c d")));
    CHECK_FALSE(accepts(re("a (b c)* d"), w("a b c b d")));
}

TEST_CASE("boolean operations") {
    CHECK(accepts(concat(re("b*"), re("d*")), w("b b d")));
    CHECK(accepts(concat(re("b*"), re("d*")), {}));
    std::vector<Symbol> ab{"a", "b"};
    CHECK(lang(intersect(re("a b | b a"), re("a (a | b)")), ab, 4) == std::set<Word>{w("a b")});
    CHECK(lang(difference(re("(a b)*"), re("(a b)+")), ab, 6) == std::set<Word>{Word{}});
    CHECK(accepts(complement(empty_language(), {"a"}), w("a a a")));
    Nfa c = complement(re("a*"), {"a", "b"});
    CHECK(accepts(c, w("b")));
    CHECK_FALSE(accepts(c, {}));
    Nfa c2 = complement(re("a b c c d e"), {"a", "b", "c", "d", "e"});
    CHECK_FALSE(accepts(c2, w("a b c c d e")));
    CHECK(accepts(c2, w("a b c d e")));
}

TEST_CASE("inclusion and equivalence") {
    CHECK(equivalent(concat(re("a* b c*"), re("c*")), re("a* b c*")));
    CHECK(includes(re("(a b)+"), re("(a b)*")));
    CHECK_FALSE(includes(re("(a b)*"), re("(a b)+")));
    Nfa ab = concat(re("a"), re("b"));
    CHECK(includes(ab, re("(a b)*")));
    CHECK_FALSE(equivalent(ab, re("(a b)*")));
    auto cex = inclusion_counterexample(re("(a b)*"), ab);
    REQUIRE(cex);
    CHECK(accepts(re("(a b)*"), *cex));
    CHECK_FALSE(accepts(ab, *cex));
}

TEST_CASE("determinize and minimize") {
    Nfa b = star(re("b"));
    Dfa d = determinize(b);
    CHECK_FALSE(has_epsilon(d));
    CHECK(is_deterministic(d));
    CHECK(equivalent(b, d));
    // a+a is {aa}: a trimmed minimal DFA has a chain of three states.
    Dfa m = minimal_trim(re("a a"));
    CHECK(m.size() == 3);
    Dfa full = minimize(re("a a"));
    CHECK(full.size() <= 4);
}

TEST_CASE("random automata agree with the subset-simulation oracle") {
    std::mt19937 rng(7);
    std::vector<Symbol> sigma{"a", "b"};
    for (int round = 0; round < 60; ++round) {
        Nfa a = oracle::random_nfa(rng, sigma, 4);
        Nfa b = oracle::random_nfa(rng, sigma, 3);
        auto la = lang(a, sigma, 6), lb = lang(b, sigma, 6);
        CHECK(lang(determinize(a), sigma, 6) == la);
        CHECK(lang(minimize(a), sigma, 6) == la);
        CHECK(lang(minimal_trim(a), sigma, 6) == la);
        CHECK(lang(remove_epsilon(a), sigma, 6) == la);
        std::set<Word> inter, uni = la, diff;
        for (auto& x : la)
            if (lb.count(x)) inter.insert(x);
            else diff.insert(x);
        uni.insert(lb.begin(), lb.end());
        CHECK(lang(intersect(a, b), sigma, 6) == inter);
        CHECK(lang(unite(a, b), sigma, 6) == uni);
        CHECK(lang(difference(a, b), sigma, 6) == diff);
        auto comp = lang(complement(a, {"a", "b"}), sigma, 6);
        for (auto& x : oracle::all_words(sigma, 6)) CHECK(comp.count(x) != la.count(x));
        // Inclusion is exact; short words can only refute it.
        if (includes(a, b))
            for (auto& x : la) CHECK(lb.count(x));
        if (auto cx = inclusion_counterexample(a, b)) {
            CHECK(oracle::simulate(a, *cx));
            CHECK_FALSE(oracle::simulate(b, *cx));
        }
    }
}

TEST_CASE("delimiter states") {
    Nfa chain = minimal_trim(re("a b c c d e"));
    auto all = delimiter_states(chain, {});
    CHECK(all.ini.size() == static_cast<std::size_t>(chain.size()));
    CHECK(all.fin.size() == static_cast<std::size_t>(chain.size()));
    auto d = delimiter_states(chain, w("a"));
    CHECK(d.ini == std::set<int>{chain.initial});
    REQUIRE(d.fin.size() == 1);
    CHECK(accepts(local_automaton(chain, chain.initial, *d.fin.begin()), w("a")));
    auto none = delimiter_states(chain, w("e a"));
    CHECK(none.ini.empty());
    CHECK(none.fin.empty());
}

TEST_CASE("local automata") {
    Nfa chain = minimal_trim(re("a b c c d e"));
    auto after_a = delimiter_states(chain, w("a")).fin;
    int q = *after_a.begin();
    CHECK(equivalent(local_automaton(chain, q, q), epsilon_language()));
    // The state reached by "a b c" is the one before the second c.
    int r = *delimiter_states(chain, w("a b c")).fin.begin();
    CHECK(equivalent(local_automaton(chain, q, r), re("b c")));
    Nfa loop = minimal_trim(re("a (b c)* d"));
    int entry = *delimiter_states(loop, w("a")).fin.begin();
    CHECK(equivalent(local_automaton(loop, entry, entry), re("(b c)*")));
}

TEST_CASE("box delimiters") {
    Nfa a = minimal_trim(re("a b | a c"));
    auto eps = box_delimiters(a, BoxLang{});
    CHECK(eps.fin.size() == static_cast<std::size_t>(a.size()));
    auto d = box_delimiters(a, BoxLang{{{"a"}, {"b", "c"}}});
    for (int f : d.fin) CHECK(a.final[f]);
    CHECK_FALSE(d.fin.empty());
    auto absent = box_delimiters(a, BoxLang{{{"z"}}});
    CHECK(absent.fin.empty());
}

TEST_CASE("words and symbols") {
    CHECK(shortest_word(re("a a* b")) == w("a b"));
    CHECK_FALSE(shortest_word(empty_language()));
    CHECK(useful_symbols(trim(re("a b | a %0"))) == std::set<Symbol>{"a", "b"});
    auto ws = words_up_to(re("(a b)*"), 4);
    CHECK(std::set<Word>(ws.begin(), ws.end()) == std::set<Word>{{}, w("a b"), w("a b a b")});
    CHECK(equivalent(rename_symbols(re("a b*"), {{"b", "c"}}), re("a c*")));
    CHECK(equivalent(substitute(re("a x"), {{"x", re("b | c")}}), re("a (b | c)")));
    CHECK(to_string(w("a b c")) == "a b c");
}
