#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "alce/core.hpp"

namespace alce {

/// "Title: {title}\n{text}" per passage, joined by single newlines.
std::string render_premise(const std::vector<Passage>& passages);

/// The exact input string sent to the remote NLI service.
std::string build_nli_input(const std::string& premise, const std::string& hypothesis);

/// Binary entailment judge: entails(premise, hypothesis) -> 0/1.
class EntailmentOracle {
public:
    virtual ~EntailmentOracle() = default;
    virtual int entails(const std::string& premise, const std::string& hypothesis) = 0;
};

/// Returns 1 iff the normalized hypothesis is a substring of the normalized
/// premise. Offline stand-in for the NLI model.
class SubstringOracle : public EntailmentOracle {
public:
    int entails(const std::string& premise, const std::string& hypothesis) override;
};

/// Preloaded (premise, hypothesis) -> label truth table; misses are
/// configuration errors.
class TableOracle : public EntailmentOracle {
public:
    explicit TableOracle(std::map<std::pair<std::string, std::string>, int> table)
        : table_(std::move(table)) {}
    static TableOracle from_file(const std::string& path);

    void set(const std::string& premise, const std::string& hypothesis, int label);
    int entails(const std::string& premise, const std::string& hypothesis) override;

private:
    std::map<std::pair<std::string, std::string>, int> table_;
};

/// HTTP NLI backend: POST {"inputs": ["premise: P hypothesis: H", ...]},
/// expects {"labels": [0|1, ...]}. Retries transport failures 3 times with
/// exponential backoff, then throws BackendError.
class RemoteNliOracle : public EntailmentOracle {
public:
    explicit RemoteNliOracle(std::string endpoint, int max_attempts = 3);
    int entails(const std::string& premise, const std::string& hypothesis) override;

private:
    std::string endpoint_;
    int max_attempts_;
};

/// Thread-safe memoizing wrapper; results are identical with or without it.
class CachingOracle : public EntailmentOracle {
public:
    explicit CachingOracle(std::shared_ptr<EntailmentOracle> inner)
        : inner_(std::move(inner)) {}
    int entails(const std::string& premise, const std::string& hypothesis) override;

private:
    std::shared_ptr<EntailmentOracle> inner_;
    std::map<std::pair<std::string, std::string>, int> cache_;
    std::mutex mutex_;
};

}  // namespace alce
