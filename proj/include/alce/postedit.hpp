#pragma once

#include <string>
#include <vector>

#include "alce/core.hpp"
#include "alce/oracle.hpp"
#include "alce/retrieval.hpp"

namespace alce {

struct RerankResult {
    std::string chosen;
    int chosen_index = 0;
    std::vector<double> scores;  // citation recall per candidate
};

/// Best-of-n selection by automatic citation recall; ties keep the lowest
/// candidate index.
RerankResult rerank_by_citation_recall(const std::vector<std::string>& candidates,
                                       const QueryInstance& instance,
                                       const std::vector<Passage>& passages,
                                       EntailmentOracle& oracle);

/// Replaces every statement's citations with the single best-matching passage
/// from the top-100 candidates by embedding cosine similarity.
ParsedResponse post_cite(const ParsedResponse& parsed,
                         const std::vector<Passage>& top100, const Embedder& embedder);

}  // namespace alce
