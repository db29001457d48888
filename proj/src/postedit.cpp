#include "alce/postedit.hpp"

#include "alce/eval.hpp"
#include "alce/parser.hpp"

namespace alce {

RerankResult rerank_by_citation_recall(const std::vector<std::string>& candidates,
                                       const QueryInstance& instance,
                                       const std::vector<Passage>& passages,
                                       EntailmentOracle& oracle) {
    if (candidates.empty()) {
        throw ConfigError("rerank: candidate list must be non-empty");
    }
    RerankResult result;
    result.scores.reserve(candidates.size());
    for (const auto& raw : candidates) {
        auto parsed = parse_response(raw, instance.dataset_kind,
                                     static_cast<int>(passages.size()));
        result.scores.push_back(citation_recall(parsed, passages, oracle));
    }
    size_t best = 0;
    for (size_t i = 1; i < result.scores.size(); ++i) {
        if (result.scores[i] > result.scores[best]) best = i;
    }
    result.chosen_index = static_cast<int>(best);
    result.chosen = candidates[best];
    return result;
}

ParsedResponse post_cite(const ParsedResponse& parsed,
                         const std::vector<Passage>& top100, const Embedder& embedder) {
    if (top100.empty()) {
        throw DataError("post_cite: passage list must be non-empty");
    }
    std::vector<std::vector<double>> passage_vecs;
    passage_vecs.reserve(top100.size());
    for (const auto& p : top100) passage_vecs.push_back(embedder.embed(p.text));

    ParsedResponse out = parsed;
    for (auto& st : out.statements) {
        auto svec = embedder.embed(st.text);
        size_t best = 0;
        double best_sim = cosine_similarity(svec, passage_vecs[0]);
        for (size_t i = 1; i < passage_vecs.size(); ++i) {
            double sim = cosine_similarity(svec, passage_vecs[i]);
            if (sim > best_sim) {
                best_sim = sim;
                best = i;
            }
        }
        st.citations = {static_cast<int>(best) + 1};
    }
    return out;
}

}  // namespace alce
