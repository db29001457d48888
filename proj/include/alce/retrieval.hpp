#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "alce/core.hpp"

namespace alce {

struct Corpus {
    std::vector<Passage> passages;

    static Corpus from_jsonl(const std::string& path);
};

class Retriever {
public:
    virtual ~Retriever() = default;
    /// Top-k passages by descending score, ties by ascending passage id.
    virtual std::vector<Passage> retrieve(const std::string& query, const Corpus& corpus,
                                          int k) const = 0;
};

/// BM25 with k1=0.9, b=0.4; tokens are normalize_text + whitespace split.
class Bm25Retriever : public Retriever {
public:
    Bm25Retriever(double k1 = 0.9, double b = 0.4) : k1_(k1), b_(b) {}
    std::vector<Passage> retrieve(const std::string& query, const Corpus& corpus,
                                  int k) const override;
    double score(const std::string& query, const Passage& passage,
                 const Corpus& corpus) const;

private:
    double k1_;
    double b_;
};

/// Dense text-to-vector adapter.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::vector<double> embed(const std::string& text) const = 0;
};

/// Deterministic token-hashing embedder for offline runs and tests.
class HashingEmbedder : public Embedder {
public:
    explicit HashingEmbedder(size_t dim = 64) : dim_(dim) {}
    std::vector<double> embed(const std::string& text) const override;

private:
    size_t dim_;
};

/// HTTP embedding backend: POST {"texts": [...]} -> {"vectors": [[...], ...]}.
class RemoteEmbedder : public Embedder {
public:
    explicit RemoteEmbedder(std::string endpoint);
    std::vector<double> embed(const std::string& text) const override;

private:
    std::string endpoint_;
};

class DenseRetriever : public Retriever {
public:
    explicit DenseRetriever(std::shared_ptr<Embedder> embedder)
        : embedder_(std::move(embedder)) {}
    std::vector<Passage> retrieve(const std::string& query, const Corpus& corpus,
                                  int k) const override;

private:
    std::shared_ptr<Embedder> embedder_;
};

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

/// Reorders candidates by descending cosine similarity to the query
/// embedding; ties keep the original rank order.
std::vector<Passage> rerank_candidates(const std::string& query,
                                       const std::vector<Passage>& candidates,
                                       const Embedder& embedder);

/// Maps a passage subset to the dataset's recall metric.
using SubsetScorer = std::function<double(const std::vector<Passage>&)>;

/// Greedy oracle passage-set builder: top-`set_size` individually scored
/// passages, then one replacement pass over the remaining passages in rank
/// order, applying the best strictly-positive recall improvement each time.
std::vector<Passage> build_oracle_set(const QueryInstance& instance,
                                      const SubsetScorer& scorer, int set_size = 5);

}  // namespace alce
