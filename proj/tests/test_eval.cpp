#include <doctest.h>

#include <random>
#include <sstream>

#include "alce/eval.hpp"
#include "alce/parser.hpp"
#include "metric_bruteforce.hpp"

using namespace alce;

namespace {

std::vector<Passage> three_passages() {
    return {
        {"p1", "T1", "first passage body", {}},
        {"p2", "T2", "second passage body", {}},
        {"p3", "T3", "third passage body", {}},
    };
}

ParsedResponse response_with(std::vector<Statement> statements) {
    ParsedResponse r;
    r.statements = std::move(statements);
    return r;
}

Statement stmt(std::string text, std::vector<int> cites) {
    Statement s;
    s.text = std::move(text);
    s.citations = std::move(cites);
    return s;
}

}  // namespace

TEST_CASE("citation recall: empty citation set scores 0") {
    SubstringOracle oracle;
    auto parsed = response_with({stmt("anything", {})});
    CHECK(citation_recall(parsed, three_passages(), oracle) == 0.0);
}

TEST_CASE("citation recall: table-stub per-statement mean") {
    auto passages = three_passages();
    TableOracle oracle({});
    oracle.set(render_premise({passages[0]}), "s1", 1);
    oracle.set(render_premise({passages[1]}), "s2", 0);
    auto parsed = response_with({stmt("s1", {1}), stmt("s2", {2})});
    CHECK(citation_recall(parsed, passages, oracle) == 0.5);
}

TEST_CASE("self-citation shortcut scores exactly 1.0 under the substring stub") {
    std::vector<Passage> passages = {
        {"p1", "Sky", "The sky is blue and the grass is green.", {}}};
    SubstringOracle oracle;
    auto parsed = parse_response("The sky is blue and the grass is green. [1]",
                                 DatasetKind::Asqa, 1);
    REQUIRE(parsed.statements.size() == 1);
    CHECK(citation_recall(parsed, passages, oracle) == 1.0);
    CHECK(citation_precision(parsed, passages, oracle) == 1.0);
}

TEST_CASE("citation precision: worked irrelevant-citation scenario") {
    std::vector<Passage> passages = {
        {"p1", "T1", "b1", {}}, {"p2", "T2", "b2", {}}, {"p3", "T3", "b3", {}},
        {"p4", "T4", "b4", {}}, {"p5", "T5", "b5", {}},
    };
    TableOracle oracle({});
    const std::string s = "s3";
    auto premise = [&](std::vector<int> idx) {
        std::vector<Passage> subset;
        for (int k : idx) subset.push_back(passages[static_cast<size_t>(k - 1)]);
        return render_premise(subset);
    };
    oracle.set(premise({2, 4, 5}), s, 1);  // full set entails: recall = 1
    oracle.set(premise({2}), s, 0);
    oracle.set(premise({4, 5}), s, 1);  // so [2] is irrelevant
    oracle.set(premise({4}), s, 1);
    oracle.set(premise({5}), s, 1);
    auto parsed = response_with({stmt(s, {2, 4, 5})});
    // [2] contributes 0; [4] and [5] contribute 1 each.
    CHECK(citation_precision(parsed, passages, oracle) == doctest::Approx(2.0 / 3.0));
    CHECK(citation_recall(parsed, passages, oracle) == 1.0);
}

TEST_CASE("single citation with recall 1 has precision 1") {
    auto passages = three_passages();
    TableOracle oracle({});
    oracle.set(render_premise({passages[0]}), "s1", 1);
    auto parsed = response_with({stmt("s1", {1})});
    CHECK(citation_precision(parsed, passages, oracle) == 1.0);
}

TEST_CASE("zero citations give precision 0") {
    SubstringOracle oracle;
    auto parsed = response_with({stmt("no cites", {})});
    CHECK(citation_precision(parsed, three_passages(), oracle) == 0.0);
}

TEST_CASE("citation metrics equal the brute-force definitions exhaustively") {
    auto result = alce_testing::run_equivalence_sweep();
    CHECK(result.cases >= 10000);
    CHECK(result.mismatches == 0);
}

TEST_CASE("em_recall_asqa") {
    AsqaGold gold;
    gold.qa_pairs = {{"July 2, 1776", "July 2 1776"}, {"September 3, 1783"}};
    std::string output =
        "The US declared independence on July 2, 1776. The Treaty of Paris was "
        "signed on September 3, 1783.";
    CHECK(em_recall_asqa(output, gold) == 1.0);
    CHECK(em_recall_asqa("", gold) == 0.0);
    CHECK(em_recall_asqa("it was JULY 2, 1776!", gold) == 0.5);  // case + punctuation
    // Monotone under appended text.
    CHECK(em_recall_asqa(output + " more words", gold) >= em_recall_asqa(output, gold));
}

TEST_CASE("qampari scoring") {
    QampariGold gold;
    for (int i = 0; i < 13; ++i) gold.answer_sets.push_back({"gold" + std::to_string(i)});

    SUBCASE("5 correct of 13 saturates recall_5") {
        std::vector<Statement> statements;
        for (int i = 0; i < 5; ++i) statements.push_back(stmt("gold" + std::to_string(i), {}));
        auto scores = qampari_scores(response_with(std::move(statements)), gold);
        CHECK(scores.recall_5 == 1.0);
        CHECK(scores.precision == 1.0);
        CHECK(scores.recall == doctest::Approx(5.0 / 13.0));
    }
    SUBCASE("all correct on a 3-answer gold") {
        QampariGold small;
        small.answer_sets = {{"Alpha"}, {"Beta"}, {"Gamma"}};
        auto scores = qampari_scores(
            response_with({stmt("Alpha", {}), stmt("Beta", {}), stmt("Gamma", {})}),
            small);
        CHECK(scores.precision == 1.0);
        CHECK(scores.recall == 1.0);
        CHECK(scores.recall_5 == 1.0);
    }
    SUBCASE("duplicates deduplicate before scoring") {
        QampariGold small;
        small.answer_sets = {{"Alpha"}, {"Beta"}};
        auto scores = qampari_scores(
            response_with({stmt("Alpha", {}), stmt("Alpha!", {}), stmt("Beta", {})}),
            small);
        CHECK(scores.precision == 1.0);
        CHECK(scores.recall == 1.0);
    }
    SUBCASE("a gold set is consumed by its first matching prediction") {
        QampariGold small;
        small.answer_sets = {{"Alpha", "first letter"}};
        auto scores = qampari_scores(
            response_with({stmt("Alpha", {}), stmt("first letter", {})}), small);
        CHECK(scores.recall == 1.0);
        CHECK(scores.precision == 0.5);  // the alias finds no unmatched set left
    }
}

TEST_CASE("claim recall for ELI5") {
    ClaimSet claims{{"claim one", "claim two", "claim three"}};
    SUBCASE("table stub mean") {
        TableOracle oracle({});
        oracle.set("output text", "claim one", 1);
        oracle.set("output text", "claim two", 1);
        oracle.set("output text", "claim three", 0);
        CHECK(claim_recall_eli5("output text", claims, oracle) ==
              doctest::Approx(2.0 / 3.0));
    }
    SUBCASE("substring containment") {
        SubstringOracle oracle;
        CHECK(claim_recall_eli5("claim one claim two claim three", claims, oracle) == 1.0);
    }
    SUBCASE("empty output scores 0 without consulting the oracle") {
        TableOracle oracle({});  // any lookup would throw
        CHECK(claim_recall_eli5("", claims, oracle) == 0.0);
    }
}

TEST_CASE("rouge_l") {
    CHECK(rouge_l("same text here", {"same text here"}) == doctest::Approx(100.0));
    CHECK(rouge_l("aaa bbb", {"ccc ddd"}) == 0.0);
    CHECK(rouge_l("b c d e", {"b x d y"}) == doctest::Approx(50.0));
    // Normalization drops articles before the LCS.
    CHECK(rouge_l("the b c", {"b c"}) == doctest::Approx(100.0));
    // Max over references.
    CHECK(rouge_l("b c d e", {"zzz", "b c d e"}) == doctest::Approx(100.0));
    CHECK_THROWS_AS(rouge_l("x", {}), std::invalid_argument);
}

TEST_CASE("fluency preprocessing") {
    std::string answer;
    for (int i = 0; i < 150; ++i) answer += "w" + std::to_string(i) + " ";
    std::string out = fluency_preprocess("the question", answer);
    std::istringstream count(out);
    std::string w;
    int words = 0;
    while (count >> w) ++words;
    CHECK(words == 100);
    CHECK(out.rfind("the question ", 0) == 0);
    CHECK(fluency_preprocess("only question", "") == "only question");
}

TEST_CASE("fluency word cap holds for arbitrary inputs") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::string q, a;
        for (size_t i = 0, n = rng() % 80; i < n; ++i) q += "q ";
        for (size_t i = 0, n = rng() % 200; i < n; ++i) a += "a ";
        std::string out = fluency_preprocess(q, a);
        std::istringstream count(out);
        std::string w;
        int words = 0;
        while (count >> w) ++words;
        CHECK(words <= 100);
    }
}

TEST_CASE("fluency backend adapter") {
    StubMauveBackend stub(87.5);
    auto value = fluency_score({{"gold", "model"}, {"g2", "m2"}}, stub);
    REQUIRE(value);
    CHECK(*value == 87.5);
    CHECK(RemoteMauveBackend::request_payload({"g"}, {"m"}) ==
          R"({"p_texts":["g"],"q_texts":["m"]})");
}

TEST_CASE("claim generation") {
    SUBCASE("parses three claim lines") {
        auto llm = ScriptedLlm::from_queue(
            {"Claim 1: First.\nClaim 2: Second.\nClaim 3: Third."});
        auto claims = generate_claims("q?", "gold answer", llm);
        REQUIRE(claims.claims.size() == 3);
        CHECK(claims.claims[1] == "Second.");
    }
    SUBCASE("fewer than three claims is an error") {
        auto llm = ScriptedLlm::from_queue({"Claim 1: only.\nClaim 2: two."});
        CHECK_THROWS_AS(generate_claims("q?", "gold answer", llm), DataError);
    }
    SUBCASE("prompt carries the fixed demonstrations verbatim") {
        std::string prompt = claim_generation_prompt("q?", "gold");
        CHECK(prompt.find("The major branches of Islam are Sunni and Shia.") !=
              std::string::npos);
        CHECK(prompt.find("Original question: q?") != std::string::npos);
    }
}

TEST_CASE("aggregate over seeds") {
    auto report_with = [](double recall) {
        EvalReport r;
        ExampleScores ex;
        ex.citation_recall = recall;
        r.per_example.push_back(ex);
        finalize_report(r);
        return r;
    };
    SUBCASE("mean and sample std") {
        auto agg = aggregate({report_with(0.4), report_with(0.5), report_with(0.6)});
        CHECK(agg.aggregate.at("citation_recall").mean == doctest::Approx(0.5));
        CHECK(agg.aggregate.at("citation_recall").std_dev == doctest::Approx(0.1));
    }
    SUBCASE("single report has std 0") {
        auto agg = aggregate({report_with(0.7)});
        CHECK(agg.aggregate.at("citation_recall").std_dev == 0.0);
    }
    SUBCASE("metric absent in one seed is absent in the aggregate") {
        EvalReport with_em;
        ExampleScores ex;
        ex.em_recall = 0.5;
        with_em.per_example.push_back(ex);
        finalize_report(with_em);
        auto agg = aggregate({with_em, report_with(0.5)});
        CHECK(agg.aggregate.count("em_recall") == 0);
        CHECK(agg.aggregate.count("citation_recall") == 1);
    }
}
