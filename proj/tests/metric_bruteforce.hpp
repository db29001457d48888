// Test-only brute-force evaluation of the citation-quality definitions,
// written directly from the formal statement and kept independent of the
// library's metric code paths.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "alce/core.hpp"
#include "alce/eval.hpp"
#include "alce/oracle.hpp"

namespace alce_testing {

// Independent premise rendering (same wire format, separate code).
inline std::string bf_premise(const std::vector<alce::Passage>& passages) {
    std::string out;
    bool first = true;
    for (const auto& p : passages) {
        if (!first) out += "\n";
        first = false;
        out += "Title: ";
        out += p.title;
        out += "\n";
        out += p.text;
    }
    return out;
}

inline std::vector<alce::Passage> bf_select(const std::vector<int>& cites,
                                            const std::vector<alce::Passage>& passages,
                                            int excluded = -1) {
    std::vector<alce::Passage> out;
    for (int k : cites) {
        if (k != excluded) out.push_back(passages[static_cast<size_t>(k - 1)]);
    }
    return out;
}

inline double bf_citation_recall(const alce::ParsedResponse& parsed,
                                 const std::vector<alce::Passage>& passages,
                                 alce::EntailmentOracle& oracle) {
    if (parsed.statements.empty()) return 0.0;
    double total = 0.0;
    for (const auto& st : parsed.statements) {
        if (st.citations.empty()) continue;
        total += oracle.entails(bf_premise(bf_select(st.citations, passages)), st.text);
    }
    return total / static_cast<double>(parsed.statements.size());
}

inline double bf_citation_precision(const alce::ParsedResponse& parsed,
                                    const std::vector<alce::Passage>& passages,
                                    alce::EntailmentOracle& oracle) {
    int n = 0;
    double total = 0.0;
    for (const auto& st : parsed.statements) {
        int recall =
            st.citations.empty()
                ? 0
                : oracle.entails(bf_premise(bf_select(st.citations, passages)), st.text);
        for (int k : st.citations) {
            ++n;
            if (recall != 1) continue;
            bool alone =
                oracle.entails(bf_premise(bf_select({k}, passages)), st.text) == 1;
            auto rest = bf_select(st.citations, passages, k);
            bool rest_entails =
                !rest.empty() && oracle.entails(bf_premise(rest), st.text) == 1;
            bool irrelevant = !alone && rest_entails;
            if (!irrelevant) total += 1.0;
        }
    }
    if (n == 0) return 0.0;
    return total / static_cast<double>(n);
}

struct SweepResult {
    int cases = 0;
    int mismatches = 0;
};

/// Enumerates synthetic responses (up to 3 statements, citations drawn from
/// subsets of {1,2,3}) against table-oracle truth assignments and compares the
/// library metrics with the brute-force definitions above, bit for bit.
inline SweepResult run_equivalence_sweep() {
    std::vector<alce::Passage> passages = {
        {"p1", "T1", "first passage body", {}},
        {"p2", "T2", "second passage body", {}},
        {"p3", "T3", "third passage body", {}},
    };
    // All 8 subsets of {1,2,3} in a fixed order; index 0 is the empty set.
    const std::vector<std::vector<int>> subsets = {
        {}, {1}, {2}, {3}, {1, 2}, {1, 3}, {2, 3}, {1, 2, 3}};
    auto premise_of = [&](const std::vector<int>& idx) {
        std::vector<alce::Passage> subset;
        for (int k : idx) subset.push_back(passages[static_cast<size_t>(k - 1)]);
        return alce::render_premise(subset);
    };

    auto check_case = [&](const std::vector<int>& cite_choice,
                          const std::vector<int>& assignment, SweepResult& result) {
        // cite_choice[i] picks a subset for statement i; assignment[i] packs
        // the 7 oracle bits for the non-empty subsets.
        alce::TableOracle oracle({});
        alce::ParsedResponse parsed;
        for (size_t i = 0; i < cite_choice.size(); ++i) {
            std::string text = "stmt" + std::to_string(i);
            for (int t = 1; t <= 7; ++t) {
                oracle.set(premise_of(subsets[static_cast<size_t>(t)]), text,
                           (assignment[i] >> (t - 1)) & 1);
            }
            alce::Statement st;
            st.text = text;
            st.citations = subsets[static_cast<size_t>(cite_choice[i])];
            parsed.statements.push_back(std::move(st));
        }
        double recall = alce::citation_recall(parsed, passages, oracle);
        double precision = alce::citation_precision(parsed, passages, oracle);
        double ref_recall = bf_citation_recall(parsed, passages, oracle);
        double ref_precision = bf_citation_precision(parsed, passages, oracle);
        ++result.cases;
        if (recall != ref_recall || precision != ref_precision) ++result.mismatches;
    };

    SweepResult result;
    // Exhaustive single-statement sweep: 8 subsets x 128 assignments.
    for (int c = 0; c < 8; ++c) {
        for (int a = 0; a < 128; ++a) check_case({c}, {a}, result);
    }
    // Seeded random multi-statement cases.
    std::mt19937 rng(42);
    for (int trial = 0; trial < 6000; ++trial) {
        check_case({static_cast<int>(rng() % 8), static_cast<int>(rng() % 8)},
                   {static_cast<int>(rng() % 128), static_cast<int>(rng() % 128)},
                   result);
    }
    for (int trial = 0; trial < 4000; ++trial) {
        check_case({static_cast<int>(rng() % 8), static_cast<int>(rng() % 8),
                    static_cast<int>(rng() % 8)},
                   {static_cast<int>(rng() % 128), static_cast<int>(rng() % 128),
                    static_cast<int>(rng() % 128)},
                   result);
    }
    return result;
}

}  // namespace alce_testing
