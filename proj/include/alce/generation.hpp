#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "alce/core.hpp"
#include "alce/retrieval.hpp"

namespace alce {

/// Version stamp of the prompt templates; recorded in every report so
/// instruction-wording ablations stay traceable.
inline constexpr const char* kPromptTemplateVersion = "alce-templates-v1";

namespace templates {
const std::string& instruction(Strategy strategy, InstructionVariant variant);
const std::string& summary_prompt();
const std::string& snippet_prompt();
}  // namespace templates

struct Demonstration {
    std::string question;
    std::vector<Passage> passages;
    std::string answer;  // carries inline [k] citations against its own passages
};

enum class ActionType { Check, Search, Output, End };

std::string to_string(ActionType t);

struct ActionStep {
    ActionType action = ActionType::End;
    std::string payload;
    std::vector<int> shown_passages;  // 1-based indices into the candidate list
};

struct ActionTrace {
    std::vector<ActionStep> steps;
    int search_count() const;
};

class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual std::string complete(const std::string& prompt) = 0;
};

/// Offline replay backend. Two modes: a queue of continuations consumed in
/// order, or a {prompt-hash -> continuation} map (hash = FNV-1a hex).
class ScriptedLlm : public LlmClient {
public:
    static ScriptedLlm from_queue(std::vector<std::string> continuations);
    static ScriptedLlm from_map(std::map<std::string, std::string> by_hash);
    static ScriptedLlm from_map_file(const std::string& path);

    std::string complete(const std::string& prompt) override;
    static std::string prompt_hash(const std::string& prompt);

private:
    ScriptedLlm() = default;
    bool queue_mode_ = false;
    std::vector<std::string> queue_;
    size_t next_ = 0;
    std::map<std::string, std::string> by_hash_;
};

/// HTTP completion backend:
/// POST {"model","prompt","temperature","max_tokens","stop"} -> {"text"}.
/// Reads the API key from LLM_API_KEY.
class RemoteLlm : public LlmClient {
public:
    RemoteLlm(std::string endpoint, std::string model_id, double temperature,
              int max_tokens = 512, std::vector<std::string> stop = {"\n"});
    std::string complete(const std::string& prompt) override;

private:
    std::string endpoint_;
    std::string model_id_;
    double temperature_;
    int max_tokens_;
    std::vector<std::string> stop_;
};

/// Renders the few-shot prompt: instruction, demonstrations, then the test
/// question with its passages.
std::string build_prompt(const QueryInstance& instance, const RunConfig& config,
                         const std::vector<Demonstration>& demos,
                         const std::vector<Passage>& passages);

/// Seeded sampling without replacement from the demonstration pool.
std::vector<Demonstration> sample_demonstrations(const std::vector<Demonstration>& pool,
                                                 int nshot, int seed);

/// Summarize or snippet-extract one passage; absent when the model flags the
/// passage "irrelevant".
enum class CompressionMode { Summary, Snippet };
std::optional<std::string> compress_passage(const Passage& passage,
                                            const std::string& question,
                                            CompressionMode mode, LlmClient& llm);

/// Compressed top-ndoc documents plus their 1-based source indices in the
/// instance's candidate list (irrelevant passages filtered out).
struct CompressedDocs {
    std::vector<Passage> docs;
    std::vector<int> source_indices;
};

CompressedDocs compress_docs(const QueryInstance& instance, int ndoc,
                             CompressionMode mode, LlmClient& llm);

struct GenerationResult {
    std::string raw_text;
    ActionTrace trace;
    std::string prompt;  // initial prompt, for audit
};

GenerationResult run_vanilla(const QueryInstance& instance, const RunConfig& config,
                             const std::vector<Demonstration>& demos, LlmClient& llm);

GenerationResult run_closedbook(const QueryInstance& instance, const RunConfig& config,
                                const std::vector<Demonstration>& demos, LlmClient& llm);

/// Summ/Snippet: compress the top-ndoc passages, drop the irrelevant ones,
/// then prompt as Vanilla over the compressed documents.
GenerationResult run_compressed(const QueryInstance& instance, const RunConfig& config,
                                const std::vector<Demonstration>& demos, LlmClient& llm,
                                LlmClient& compressor);

/// Interactive loop over compressed documents with Check/Output/End actions.
/// Checked full texts leave the context after the next action; every Check is
/// followed by a forced "Output:".
GenerationResult run_interact(const QueryInstance& instance, const RunConfig& config,
                              const std::vector<Demonstration>& demos, LlmClient& llm,
                              const std::vector<Passage>& compressed,
                              int action_cap = 10);

/// Search/Output/End loop over the top-100 candidates; each Search shows the
/// single best passage not yet shown in the episode.
GenerationResult run_inline_search(const QueryInstance& instance, const RunConfig& config,
                                   const std::vector<Demonstration>& demos,
                                   LlmClient& llm, const Embedder& embedder,
                                   int action_cap = 10);

}  // namespace alce
