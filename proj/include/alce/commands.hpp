#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "alce/core.hpp"
#include "alce/eval.hpp"
#include "alce/generation.hpp"
#include "alce/oracle.hpp"
#include "alce/retrieval.hpp"

namespace alce {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitBackendError = 3;
inline constexpr int kExitDataError = 4;

struct RetrieveOptions {
    std::string corpus_path;
    std::string dataset_path;
    DatasetKind kind = DatasetKind::Asqa;
    std::string retriever = "bm25";  // "bm25" | "dense"
    int k = 100;
    std::string out_path;
};

struct GenerateOptions {
    std::string dataset_path;
    DatasetKind kind = DatasetKind::Asqa;
    RunConfig config;
    std::string demos_path;          // optional demonstration pool
    std::string llm_spec = "scripted:";   // "remote:URL" | "scripted:PATH" | "echo"
    std::string oracle_spec = "substring";  // used when rerank_samples > 1
    std::string out_path;
    int action_cap = 10;
};

struct EvalOptions {
    std::string generation_path;
    std::string dataset_path;
    DatasetKind kind = DatasetKind::Asqa;
    std::string oracle_spec = "substring";  // "remote" | "substring" | "table:PATH"
    std::string mauve_spec;                  // "" (off) | "stub:VALUE" | "remote:URL"
    std::string out_path;
    std::string parse_log_path;
    int workers = 1;
};

std::shared_ptr<EntailmentOracle> make_oracle(const std::string& spec);
std::shared_ptr<LlmClient> make_llm(const std::string& spec, const RunConfig& config);

/// Per-example generation record written by cmd_generate and read by cmd_eval.
struct GenerationRecord {
    std::string id;
    std::string raw_output;
    std::vector<std::string> candidates;
    int chosen_index = 0;
    std::vector<int> docs_used;  // 1-based indices into instance.retrieved
    ActionTrace trace;
};

void cmd_retrieve(const RetrieveOptions& opts);
void cmd_generate(const GenerateOptions& opts);
void cmd_eval(const EvalOptions& opts);

/// Mean-and-std aggregation of several per-seed report files.
void cmd_eval_aggregate(const std::vector<std::string>& report_paths,
                        const std::string& out_path);

std::vector<GenerationRecord> load_generation_file(const std::string& path);

std::vector<Demonstration> load_demo_pool(const std::string& path);

/// Maps library exceptions to the documented exit codes; returns the code.
int run_cli(int argc, char** argv);

}  // namespace alce
