#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace alce {

enum class DatasetKind { Asqa, Qampari, Eli5 };

std::string to_string(DatasetKind kind);
DatasetKind dataset_kind_from_string(const std::string& s);

/// Retrievable evidence unit (~100-word passage).
struct Passage {
    std::string id;
    std::string title;
    std::string text;
    std::optional<double> score;
};

struct AsqaGold {
    // Each entry is a set of interchangeable short-answer aliases.
    std::vector<std::vector<std::string>> qa_pairs;
    std::vector<std::string> gold_answers;
};

struct QampariGold {
    std::vector<std::vector<std::string>> answer_sets;
};

struct Eli5Gold {
    std::vector<std::string> claims;  // always length 3
    std::vector<std::string> gold_answers;
};

using GoldAnnotation = std::variant<AsqaGold, QampariGold, Eli5Gold>;

struct QueryInstance {
    std::string id;
    std::string question;
    DatasetKind dataset_kind = DatasetKind::Asqa;
    GoldAnnotation gold;
    std::vector<Passage> retrieved;  // rank order, up to 100
};

/// One sentence (or one QAMPARI list entity) with its citation indices.
struct Statement {
    std::string text;
    std::vector<int> citations;  // 1-based, deduplicated, at most 3

    Statement() = default;
    Statement(std::string text, std::vector<int> citations);
};

struct ParsedResponse {
    std::string raw_text;
    std::vector<Statement> statements;
};

enum class Strategy { Vanilla, Summ, Snippet, Interact, InlineSearch, ClosedBook };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

enum class InstructionVariant { Full, Light };

struct RunConfig {
    Strategy strategy = Strategy::Vanilla;
    int ndoc = 5;
    int nshot = 2;
    int seed = 1;
    int rerank_samples = 4;
    InstructionVariant instruction_variant = InstructionVariant::Full;
    std::string model_id = "stub";
    double temperature = 0.0;
};

struct ExampleScores {
    std::optional<double> fluency;       // 0-100
    std::optional<double> em_recall;     // 0-1
    std::optional<double> qampari_precision;
    std::optional<double> qampari_recall;
    std::optional<double> qampari_recall5;
    std::optional<double> claim_recall;
    std::optional<double> rouge_l;       // 0-100
    double citation_recall = 0.0;
    double citation_precision = 0.0;
    int n_statements = 0;
    int n_citations = 0;
};

struct MetricSummary {
    double mean = 0.0;
    double std_dev = 0.0;
};

struct EvalReport {
    std::vector<ExampleScores> per_example;
    std::map<std::string, MetricSummary> aggregate;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BackendError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// SQuAD-style answer normalization: lowercase, strip punctuation,
/// drop the articles a/an/the, collapse whitespace.
std::string normalize_text(const std::string& s);

std::vector<QueryInstance> load_dataset(const std::string& path, DatasetKind kind);
void save_dataset(const std::vector<QueryInstance>& instances, const std::string& path);

std::string serialize_instances(const std::vector<QueryInstance>& instances);
std::vector<QueryInstance> parse_instances(const std::string& json_text, DatasetKind kind);

}  // namespace alce
