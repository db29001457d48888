#include <doctest.h>

#include "alce/oracle.hpp"

using namespace alce;

TEST_CASE("render_premise uses the Title/newline format") {
    Passage p1{"a", "T1", "A", {}};
    Passage p2{"b", "T2", "B", {}};
    CHECK(render_premise({p1}) == "Title: T1\nA");
    CHECK(render_premise({p1, p2}) == "Title: T1\nA\nTitle: T2\nB");
    CHECK_THROWS_AS(render_premise({}), std::invalid_argument);
}

TEST_CASE("NLI request string is bit-exact") {
    CHECK(build_nli_input("P", "H") == "premise: P hypothesis: H");
    CHECK(build_nli_input("Title: X\ntext", "claim") ==
          "premise: Title: X\ntext hypothesis: claim");
}

TEST_CASE("substring oracle") {
    SubstringOracle oracle;
    CHECK(oracle.entails("Title: X\nthe sky is blue today", "sky is blue") == 1);
    CHECK(oracle.entails("unrelated text", "sky is blue") == 0);
    CHECK(oracle.entails("The Sky, is Blue!", "sky is blue") == 1);  // normalized
}

TEST_CASE("substring oracle is reflexive after normalization") {
    SubstringOracle oracle;
    for (const std::string& s : {"hello world", "The A An!", "x"}) {
        if (normalize_text(s).empty()) continue;
        CHECK(oracle.entails(s, s) == 1);
    }
}

TEST_CASE("table oracle looks up and errors on miss") {
    TableOracle oracle({{{"p", "h"}, 1}});
    CHECK(oracle.entails("p", "h") == 1);
    CHECK_THROWS_AS(oracle.entails("p", "other"), ConfigError);
}

TEST_CASE("caching wrapper is transparent") {
    auto inner = std::make_shared<SubstringOracle>();
    CachingOracle cached(inner);
    for (int round = 0; round < 3; ++round) {
        CHECK(cached.entails("the cat sat", "cat sat") ==
              inner->entails("the cat sat", "cat sat"));
        CHECK(cached.entails("the cat sat", "dog") ==
              inner->entails("the cat sat", "dog"));
    }
}
