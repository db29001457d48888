#pragma once

#include <optional>
#include <string>
#include <vector>

#include "alce/core.hpp"
#include "alce/generation.hpp"
#include "alce/oracle.hpp"

namespace alce {

struct ClaimSet {
    std::vector<std::string> claims;  // always length 3
};

struct QampariScores {
    double precision = 0.0;
    double recall = 0.0;
    double recall_5 = 0.0;
};

/// Fraction of statements whose (non-empty) citation set jointly entails the
/// statement.
double citation_recall(const ParsedResponse& parsed, const std::vector<Passage>& passages,
                       EntailmentOracle& oracle);

/// Fraction of citations that are not irrelevant, gated on statement
/// recall = 1. A citation is irrelevant when it does not entail the statement
/// on its own and the remaining citations already do.
double citation_precision(const ParsedResponse& parsed,
                          const std::vector<Passage>& passages,
                          EntailmentOracle& oracle);

/// Fraction of gold short-answer sets with at least one alias appearing
/// (after normalization) as a substring of the output.
double em_recall_asqa(const std::string& output, const AsqaGold& gold);

QampariScores qampari_scores(const ParsedResponse& parsed, const QampariGold& gold);

/// Mean entailment of the three sub-claims, with the model output as premise.
double claim_recall_eli5(const std::string& output, const ClaimSet& claims,
                         EntailmentOracle& oracle);

/// LCS-based F-measure over normalized tokens, max over references, x100.
double rouge_l(const std::string& output, const std::vector<std::string>& references);

/// "question answer" truncated to the first 100 whitespace words.
std::string fluency_preprocess(const std::string& question, const std::string& answer);

/// Distribution-similarity backend for fluency scoring.
class MauveBackend {
public:
    virtual ~MauveBackend() = default;
    /// Returns the MAUVE statistic (0-100), or absent when unavailable.
    virtual std::optional<double> score(const std::vector<std::string>& p_texts,
                                        const std::vector<std::string>& q_texts) = 0;
};

class StubMauveBackend : public MauveBackend {
public:
    explicit StubMauveBackend(double value) : value_(value) {}
    std::optional<double> score(const std::vector<std::string>&,
                                const std::vector<std::string>&) override {
        return value_;
    }

private:
    double value_;
};

/// HTTP MAUVE backend: POST {"p_texts": [...], "q_texts": [...]} ->
/// {"mauve": real}. Failures yield absent, not an error.
class RemoteMauveBackend : public MauveBackend {
public:
    explicit RemoteMauveBackend(std::string endpoint);
    std::optional<double> score(const std::vector<std::string>& p_texts,
                                const std::vector<std::string>& q_texts) override;
    static std::string request_payload(const std::vector<std::string>& p_texts,
                                       const std::vector<std::string>& q_texts);

private:
    std::string endpoint_;
};

/// Corpus-level fluency over preprocessed (gold, model) pairs.
std::optional<double> fluency_score(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    MauveBackend& backend);

/// Prompts the llm with three fixed demonstrations and parses
/// "Claim 1/2/3:" lines; errors when fewer than 3 claims come back.
ClaimSet generate_claims(const std::string& question, const std::string& gold_answer,
                         LlmClient& llm);

std::string claim_generation_prompt(const std::string& question,
                                    const std::string& gold_answer);

/// Per-metric mean and sample standard deviation across per-seed reports.
EvalReport aggregate(const std::vector<EvalReport>& reports);

/// Scores one example end to end (parsing already done by the caller).
ExampleScores evaluate_example(const QueryInstance& instance,
                               const ParsedResponse& parsed,
                               const std::vector<Passage>& passages,
                               EntailmentOracle& oracle);

/// Fills the aggregate block of a report from its per-example rows.
void finalize_report(EvalReport& report);

std::string report_to_json(const EvalReport& report, const RunConfig& config);

}  // namespace alce
