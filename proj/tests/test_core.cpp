#include <doctest.h>

#include <random>

#include "alce/core.hpp"

using namespace alce;

TEST_CASE("normalize_text applies the four rules") {
    CHECK(normalize_text("The Story of Qiu Ju.") == "story of qiu ju");
    CHECK(normalize_text("") == "");
    CHECK(normalize_text("July 2, 1776") == "july 2 1776");
    CHECK(normalize_text("An  Apple   a day") == "apple day");
    CHECK(normalize_text("THE THE the") == "");
}

TEST_CASE("normalize_text is idempotent") {
    std::mt19937 rng(7);
    const std::string alphabet = "abcXYZ .,!?'[]123 theanA";
    for (int trial = 0; trial < 200; ++trial) {
        std::string s;
        size_t len = rng() % 40;
        for (size_t i = 0; i < len; ++i) s.push_back(alphabet[rng() % alphabet.size()]);
        std::string once = normalize_text(s);
        CHECK(normalize_text(once) == once);
    }
}

TEST_CASE("statement constructor keeps first 3 distinct citations") {
    Statement st("x", {2, 9, 2, 3, 4, 5});
    CHECK(st.citations == std::vector<int>{2, 9, 3});
}

namespace {

const char* kAsqaRecord = R"([{
  "id": "ex1",
  "question": "When did the US break away from England?",
  "docs": [
    {"id": "d1", "title": "American Decolonization", "text": "The US declared independence on July 2, 1776.", "score": 1.5},
    {"id": "d2", "title": "Treaty of Paris", "text": "The treaty was signed on September 3, 1783.", "score": 1.1}
  ],
  "qa_pairs": [
    {"short_answers": ["July 2, 1776", "July 2 1776"]},
    {"short_answers": ["September 3, 1783"]}
  ],
  "answers": ["The US declared independence on July 2, 1776 and the Treaty of Paris was signed on September 3, 1783."]
}])";

}  // namespace

TEST_CASE("load_dataset parses ASQA records") {
    auto instances = parse_instances(kAsqaRecord, DatasetKind::Asqa);
    REQUIRE(instances.size() == 1);
    const auto& inst = instances[0];
    CHECK(inst.id == "ex1");
    CHECK(inst.retrieved.size() == 2);
    CHECK(inst.retrieved[0].score == doctest::Approx(1.5));
    const auto& gold = std::get<AsqaGold>(inst.gold);
    CHECK(gold.qa_pairs.size() == 2);
    CHECK(gold.qa_pairs[0].size() == 2);
}

TEST_CASE("load_dataset rejects empty question") {
    CHECK_THROWS_AS(
        parse_instances(R"([{"id":"x","question":"","qa_pairs":[]}])", DatasetKind::Asqa),
        DataError);
}

TEST_CASE("load_dataset enforces exactly 3 ELI5 claims") {
    const char* two_claims = R"([{
      "id": "e1", "question": "why?",
      "claims": ["c1", "c2"], "answers": ["a"]
    }])";
    CHECK_THROWS_WITH_AS(parse_instances(two_claims, DatasetKind::Eli5),
                         "record 0: claims must have length 3", DataError);
}

TEST_CASE("load_dataset accepts JSON-lines input") {
    std::string jsonl =
        R"({"id":"q1","question":"who?","answers":[["A","a"],["B"]]})"
        "\n"
        R"({"id":"q2","question":"what?","answers":[["C"]]})"
        "\n";
    auto instances = parse_instances(jsonl, DatasetKind::Qampari);
    REQUIRE(instances.size() == 2);
    CHECK(std::get<QampariGold>(instances[0].gold).answer_sets.size() == 2);
}

TEST_CASE("serialize then parse is the identity on instance lists") {
    auto instances = parse_instances(kAsqaRecord, DatasetKind::Asqa);
    auto round = parse_instances(serialize_instances(instances), DatasetKind::Asqa);
    REQUIRE(round.size() == instances.size());
    CHECK(round[0].id == instances[0].id);
    CHECK(round[0].question == instances[0].question);
    CHECK(round[0].retrieved.size() == instances[0].retrieved.size());
    for (size_t i = 0; i < round[0].retrieved.size(); ++i) {
        CHECK(round[0].retrieved[i].id == instances[0].retrieved[i].id);
        CHECK(round[0].retrieved[i].title == instances[0].retrieved[i].title);
        CHECK(round[0].retrieved[i].text == instances[0].retrieved[i].text);
    }
    const auto& a = std::get<AsqaGold>(instances[0].gold);
    const auto& b = std::get<AsqaGold>(round[0].gold);
    CHECK(a.qa_pairs == b.qa_pairs);
    CHECK(a.gold_answers == b.gold_answers);
}
