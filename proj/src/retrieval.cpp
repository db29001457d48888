#include "alce/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace alce {

using json = nlohmann::json;

namespace {

std::vector<std::string> tokenize(const std::string& text) {
    std::istringstream in(normalize_text(text));
    std::vector<std::string> tokens;
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
}

std::vector<Passage> top_k(std::vector<std::pair<double, const Passage*>> scored, int k) {
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second->id < b.second->id;
    });
    std::vector<Passage> out;
    size_t n = std::min<size_t>(static_cast<size_t>(k), scored.size());
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        Passage p = *scored[i].second;
        p.score = scored[i].first;
        out.push_back(std::move(p));
    }
    return out;
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

Corpus Corpus::from_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open corpus file: " + path);
    Corpus corpus;
    std::unordered_set<std::string> seen;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec = json::parse(line);
        Passage p;
        p.id = rec.at("id").get<std::string>();
        p.title = rec.at("title").get<std::string>();
        p.text = rec.at("text").get<std::string>();
        if (!seen.insert(p.id).second) {
            throw DataError("corpus line " + std::to_string(lineno) +
                            ": duplicate passage id " + p.id);
        }
        corpus.passages.push_back(std::move(p));
    }
    return corpus;
}

double Bm25Retriever::score(const std::string& query, const Passage& passage,
                            const Corpus& corpus) const {
    const size_t n_docs = corpus.passages.size();
    double total_len = 0.0;
    std::unordered_map<std::string, size_t> df;
    std::vector<std::vector<std::string>> doc_tokens;
    doc_tokens.reserve(n_docs);
    for (const auto& p : corpus.passages) {
        doc_tokens.push_back(tokenize(p.title + " " + p.text));
        total_len += static_cast<double>(doc_tokens.back().size());
        std::unordered_set<std::string> uniq(doc_tokens.back().begin(),
                                             doc_tokens.back().end());
        for (const auto& t : uniq) df[t]++;
    }
    double avgdl = n_docs ? total_len / static_cast<double>(n_docs) : 0.0;

    auto terms = tokenize(passage.title + " " + passage.text);
    std::unordered_map<std::string, double> tf;
    for (const auto& t : terms) tf[t] += 1.0;
    double dl = static_cast<double>(terms.size());

    double s = 0.0;
    for (const auto& q : tokenize(query)) {
        auto it = tf.find(q);
        if (it == tf.end()) continue;
        double n = static_cast<double>(df.count(q) ? df[q] : 0);
        double idf = std::log(1.0 + (static_cast<double>(n_docs) - n + 0.5) / (n + 0.5));
        double freq = it->second;
        s += idf * freq * (k1_ + 1.0) /
             (freq + k1_ * (1.0 - b_ + b_ * (avgdl > 0 ? dl / avgdl : 0.0)));
    }
    return s;
}

std::vector<Passage> Bm25Retriever::retrieve(const std::string& query,
                                             const Corpus& corpus, int k) const {
    if (corpus.passages.empty()) throw DataError("retrieve: empty corpus");
    if (k < 1) throw ConfigError("retrieve: k must be >= 1");

    // Corpus statistics once per call.
    const size_t n_docs = corpus.passages.size();
    std::unordered_map<std::string, size_t> df;
    std::vector<std::unordered_map<std::string, double>> tf(n_docs);
    std::vector<double> dl(n_docs);
    double total_len = 0.0;
    for (size_t i = 0; i < n_docs; ++i) {
        auto toks = tokenize(corpus.passages[i].title + " " + corpus.passages[i].text);
        dl[i] = static_cast<double>(toks.size());
        total_len += dl[i];
        for (const auto& t : toks) tf[i][t] += 1.0;
        std::unordered_set<std::string> uniq(toks.begin(), toks.end());
        for (const auto& t : uniq) df[t]++;
    }
    double avgdl = total_len / static_cast<double>(n_docs);

    auto qterms = tokenize(query);
    std::vector<std::pair<double, const Passage*>> scored;
    scored.reserve(n_docs);
    for (size_t i = 0; i < n_docs; ++i) {
        double s = 0.0;
        for (const auto& q : qterms) {
            auto it = tf[i].find(q);
            if (it == tf[i].end()) continue;
            double n = static_cast<double>(df[q]);
            double idf =
                std::log(1.0 + (static_cast<double>(n_docs) - n + 0.5) / (n + 0.5));
            s += idf * it->second * (k1_ + 1.0) /
                 (it->second + k1_ * (1.0 - b_ + b_ * dl[i] / avgdl));
        }
        scored.emplace_back(s, &corpus.passages[i]);
    }
    return top_k(std::move(scored), k);
}

std::vector<double> HashingEmbedder::embed(const std::string& text) const {
    std::vector<double> vec(dim_, 0.0);
    for (const auto& tok : tokenize(text)) {
        vec[fnv1a(tok) % dim_] += 1.0;
    }
    double norm = std::sqrt(std::inner_product(vec.begin(), vec.end(), vec.begin(), 0.0));
    if (norm > 0) {
        for (auto& v : vec) v /= norm;
    }
    return vec;
}

RemoteEmbedder::RemoteEmbedder(std::string endpoint) : endpoint_(std::move(endpoint)) {}

std::vector<double> RemoteEmbedder::embed(const std::string& text) const {
    size_t scheme_end = endpoint_.find("://");
    std::string rest =
        scheme_end == std::string::npos ? endpoint_ : endpoint_.substr(scheme_end + 3);
    size_t slash = rest.find('/');
    std::string host = rest.substr(0, slash == std::string::npos ? rest.size() : slash);
    std::string path = slash == std::string::npos ? "/" : rest.substr(slash);

    json body;
    body["texts"] = json::array({text});
    httplib::Client client(host);
    auto res = client.Post(path, body.dump(), "application/json");
    if (!res || res->status != 200) {
        throw BackendError("embedding backend unreachable: " + endpoint_);
    }
    return json::parse(res->body).at("vectors").at(0).get<std::vector<double>>();
}

std::vector<Passage> DenseRetriever::retrieve(const std::string& query,
                                              const Corpus& corpus, int k) const {
    if (corpus.passages.empty()) throw DataError("retrieve: empty corpus");
    if (k < 1) throw ConfigError("retrieve: k must be >= 1");
    auto qvec = embedder_->embed(query);
    std::vector<std::pair<double, const Passage*>> scored;
    scored.reserve(corpus.passages.size());
    for (const auto& p : corpus.passages) {
        scored.emplace_back(cosine_similarity(qvec, embedder_->embed(p.title + " " + p.text)),
                            &p);
    }
    return top_k(std::move(scored), k);
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("cosine: dimension mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<Passage> rerank_candidates(const std::string& query,
                                       const std::vector<Passage>& candidates,
                                       const Embedder& embedder) {
    if (candidates.empty()) throw std::invalid_argument("rerank_candidates: empty list");
    auto qvec = embedder.embed(query);
    std::vector<std::pair<double, size_t>> scored;
    scored.reserve(candidates.size());
    for (size_t i = 0; i < candidates.size(); ++i) {
        scored.emplace_back(
            cosine_similarity(qvec, embedder.embed(candidates[i].text)), i);
    }
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        return a.first > b.first;
    });
    std::vector<Passage> out;
    out.reserve(candidates.size());
    for (const auto& [s, i] : scored) {
        Passage p = candidates[i];
        p.score = s;
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Passage> build_oracle_set(const QueryInstance& instance,
                                      const SubsetScorer& scorer, int set_size) {
    const auto& pool = instance.retrieved;
    if (static_cast<int>(pool.size()) < set_size) {
        throw DataError("build_oracle_set: need at least " + std::to_string(set_size) +
                        " passages, have " + std::to_string(pool.size()));
    }

    std::vector<size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> solo(pool.size());
    for (size_t i = 0; i < pool.size(); ++i) solo[i] = scorer({pool[i]});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return solo[a] > solo[b]; });

    std::vector<size_t> set(order.begin(), order.begin() + set_size);
    std::vector<bool> in_set(pool.size(), false);
    for (size_t i : set) in_set[i] = true;

    auto score_of = [&](const std::vector<size_t>& idx) {
        std::vector<Passage> subset;
        subset.reserve(idx.size());
        for (size_t i : idx) subset.push_back(pool[i]);
        return scorer(subset);
    };

    // One replacement pass over the remaining passages in retrieval-rank order.
    for (size_t cand = 0; cand < pool.size(); ++cand) {
        if (in_set[cand]) continue;
        double current = score_of(set);
        double best_gain = 0.0;
        int best_slot = -1;
        for (size_t slot = 0; slot < set.size(); ++slot) {
            std::vector<size_t> trial = set;
            trial[slot] = cand;
            double gain = score_of(trial) - current;
            // Ties evict the lowest-ranked (largest retrieval index) member.
            if (gain > best_gain ||
                (gain == best_gain && best_slot >= 0 && gain > 0.0 &&
                 set[slot] > set[static_cast<size_t>(best_slot)])) {
                best_gain = gain;
                best_slot = static_cast<int>(slot);
            }
        }
        if (best_slot >= 0 && best_gain > 0.0) {
            in_set[set[static_cast<size_t>(best_slot)]] = false;
            set[static_cast<size_t>(best_slot)] = cand;
            in_set[cand] = true;
        }
    }

    std::sort(set.begin(), set.end());
    std::vector<Passage> out;
    out.reserve(set.size());
    for (size_t i : set) out.push_back(pool[i]);
    return out;
}

}  // namespace alce
