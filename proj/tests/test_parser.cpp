#include <doctest.h>

#include <fstream>

#include <nlohmann/json.hpp>

#include "alce/parser.hpp"

using namespace alce;

TEST_CASE("truncate_output keeps the prefix before the first newline") {
    CHECK(truncate_output("A.\nIgnore this") == "A.");
    CHECK(truncate_output("no newline here") == "no newline here");
    CHECK(truncate_output("\nall after newline") == "");
    CHECK(truncate_output("  padded  \nrest") == "padded");
}

TEST_CASE("extract_citations removes markers and validates indices") {
    auto [text1, cites1] = extract_citations("US declared independence [1][2].", 5);
    CHECK(text1 == "US declared independence.");
    CHECK(cites1 == std::vector<int>{1, 2});

    auto [text2, cites2] = extract_citations("No cites here.", 5);
    CHECK(text2 == "No cites here.");
    CHECK(cites2.empty());

    auto [text3, cites3] = extract_citations("x [2][9][2][3][4]", 5);
    CHECK(text3 == "x");
    CHECK(cites3 == std::vector<int>{2, 3, 4});
}

TEST_CASE("extract_citations logs dropped indices") {
    ParseLog log;
    extract_citations("x [9][2][2][3][4][5]", 5, &log, "ex7", 0);
    REQUIRE(log.entries().size() == 3);
    CHECK(log.entries()[0].dropped_index == 9);
    CHECK(log.entries()[0].reason == "out_of_range");
    CHECK(log.entries()[1].reason == "duplicate");
    CHECK(log.entries()[2].dropped_index == 5);
    CHECK(log.entries()[2].reason == "over_cap");
    std::string jsonl = log.to_jsonl();
    CHECK(jsonl.find("\"example_id\":\"ex7\"") != std::string::npos);
    CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 3);
}

TEST_CASE("segment_statements handles the spec examples") {
    auto asqa = segment_statements("A happened [1][2]. B happened [3].",
                                   DatasetKind::Asqa, 5);
    REQUIRE(asqa.statements.size() == 2);
    CHECK(asqa.statements[0].citations == std::vector<int>{1, 2});
    CHECK(asqa.statements[1].citations == std::vector<int>{3});

    auto qampari = segment_statements(
        "The Story of Qiu Ju [1], Farewell My Concubine [2].", DatasetKind::Qampari, 5);
    REQUIRE(qampari.statements.size() == 2);
    CHECK(qampari.statements[0].text == "The Story of Qiu Ju");

    auto attach = segment_statements("A happened. [1] B happened.", DatasetKind::Asqa, 5);
    REQUIRE(attach.statements.size() == 2);
    CHECK(attach.statements[0].citations == std::vector<int>{1});
    CHECK(attach.statements[1].citations.empty());
}

TEST_CASE("empty input yields zero statements, not an error") {
    CHECK(segment_statements("", DatasetKind::Asqa, 5).statements.empty());
    CHECK(segment_statements("", DatasetKind::Qampari, 5).statements.empty());
}

TEST_CASE("fixture corpus segments to hand-labeled expectations") {
    std::ifstream in(std::string(ALCE_TEST_DATA_DIR) + "/parser_corpus.json");
    REQUIRE(in);
    nlohmann::json corpus = nlohmann::json::parse(in);
    REQUIRE(corpus.size() == 50);
    for (size_t i = 0; i < corpus.size(); ++i) {
        const auto& fixture = corpus[i];
        CAPTURE(i);
        CAPTURE(fixture["raw"].get<std::string>());
        auto parsed = parse_response(
            fixture["raw"].get<std::string>(),
            dataset_kind_from_string(fixture["dataset"].get<std::string>()),
            fixture["max_index"].get<int>());
        const auto& expected = fixture["statements"];
        REQUIRE(parsed.statements.size() == expected.size());
        for (size_t s = 0; s < expected.size(); ++s) {
            CHECK(parsed.statements[s].text == expected[s]["text"].get<std::string>());
            CHECK(parsed.statements[s].citations ==
                  expected[s]["citations"].get<std::vector<int>>());
        }
    }
}

TEST_CASE("segmentation is deterministic and respects the citation cap") {
    std::ifstream in(std::string(ALCE_TEST_DATA_DIR) + "/parser_corpus.json");
    nlohmann::json corpus = nlohmann::json::parse(in);
    for (const auto& fixture : corpus) {
        std::string raw = fixture["raw"].get<std::string>();
        auto kind = dataset_kind_from_string(fixture["dataset"].get<std::string>());
        int max_index = fixture["max_index"].get<int>();
        auto a = parse_response(raw, kind, max_index);
        auto b = parse_response(raw, kind, max_index);
        REQUIRE(a.statements.size() == b.statements.size());
        size_t total_cites = 0;
        for (size_t s = 0; s < a.statements.size(); ++s) {
            CHECK(a.statements[s].text == b.statements[s].text);
            CHECK(a.statements[s].citations == b.statements[s].citations);
            CHECK(a.statements[s].citations.size() <= 3);
            total_cites += a.statements[s].citations.size();
        }
        CHECK(total_cites <= 3 * a.statements.size());
    }
}
