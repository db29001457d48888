#include "alce/generation.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <utility>
#include <random>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "alce/parser.hpp"

namespace alce {

using json = nlohmann::json;

namespace templates {

namespace {

const std::string kVanillaFull =
    "Instruction: Write an accurate, engaging, and concise answer for the given "
    "question using only the provided search results (some of which might be "
    "irrelevant) and cite them properly. Use an unbiased and journalistic tone. "
    "Always cite for any factual claim. When citing several search results, use "
    "[1][2][3]. Cite at least one document and at most three documents in each "
    "sentence. If multiple documents support the sentence, only cite a minimum "
    "sufficient subset of the documents.";

const std::string kVanillaLight =
    "Instruction: Write a high-quality answer for the given question using only "
    "the provided search results and cite them properly using [1][2][3].";

const std::string kClosedBook =
    "Instruction: Write an accurate, engaging, and concise answer for the given "
    "question. Use an unbiased and journalistic tone.";

const std::string kInteract =
    "Instruction: Write an accurate, engaging, and concise answer for the given "
    "question using only the provided search results and cite them properly. Use "
    "an unbiased and journalistic tone. Always cite for any factual claim.\n"
    "You are provided summaries/snippets of the search results. You can use "
    "\"Check: Document [1][2]\" to check the corresponding full documents (you "
    "should only check relevant documents and you can at most check 3 documents "
    "at a time) and use \"Output:\" to output a sentence in the answer. In the "
    "answer, cite properly by using [1][2][3]. Cite at least one document and at "
    "most three documents in each sentence. If multiple documents support the "
    "sentence, only cite a minimum sufficient subset of the documents. Use "
    "\"End\" to end the generation.";

const std::string kInlineSearch =
    "Instruction: Write an accurate, engaging, and concise answer for the given "
    "question using only the provided search results and cite them properly. Use "
    "an unbiased and journalistic tone. Always cite for any factual claim.\n"
    "You can use \"Search: key words\" to check the most relevant document's "
    "full text and use \"Output:\" to output a sentence in the answer. In the "
    "answer, cite properly by using [1][2][3]. Cite at least one document and at "
    "most three documents in each sentence. If multiple documents support the "
    "sentence, only cite a minimum sufficient subset of the documents. Use "
    "\"End\" to end the generation.";

const std::string kSummary =
    "Summarize the following document within 50 words with the question of "
    "interest \"{QUESTION}\" Return \"irrelevant\" if the document is irrelevant "
    "to the question. Try to keep all the important dates, numbers, and names.\n"
    "\n"
    "Title: {TITLE}\n"
    "Text: {TEXT}\n"
    "Summary:";

const std::string kSnippet =
    "Given the follow passage and the question \"{QUESTION}\", extract a useful "
    "span from the passage that can answer the question. Resolve all the "
    "coreference issues to make the extracted span understandable standalone. If "
    "the passage is not helpful for answering the question, return "
    "\"irrelevant\".\n"
    "\n"
    "Title: {TITLE}\n"
    "Text: {TEXT}\n"
    "Extracted span:";

}  // namespace

const std::string& instruction(Strategy strategy, InstructionVariant variant) {
    switch (strategy) {
        case Strategy::ClosedBook:
            return kClosedBook;
        case Strategy::Interact:
            return kInteract;
        case Strategy::InlineSearch:
            return kInlineSearch;
        default:
            return variant == InstructionVariant::Light ? kVanillaLight : kVanillaFull;
    }
}

const std::string& summary_prompt() { return kSummary; }
const std::string& snippet_prompt() { return kSnippet; }

}  // namespace templates

std::string to_string(ActionType t) {
    switch (t) {
        case ActionType::Check: return "check";
        case ActionType::Search: return "search";
        case ActionType::Output: return "output";
        case ActionType::End: return "end";
    }
    return "end";
}

int ActionTrace::search_count() const {
    return static_cast<int>(std::count_if(steps.begin(), steps.end(), [](const auto& s) {
        return s.action == ActionType::Search;
    }));
}

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string first_nonempty_line(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (!t.empty()) return t;
    }
    return "";
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string document_line(int index_1based, const Passage& p) {
    return "Document [" + std::to_string(index_1based) + "](Title: " + p.title +
           "): " + p.text;
}

std::vector<int> bracket_indices(const std::string& s) {
    std::vector<int> out;
    for (size_t i = 0; i + 2 < s.size(); ++i) {
        if (s[i] != '[') continue;
        size_t j = i + 1;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i + 1 && j < s.size() && s[j] == ']') {
            out.push_back(std::stoi(s.substr(i + 1, j - i - 1)));
            i = j;
        }
    }
    return out;
}

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
    size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
    return text;
}

void append_demo_blocks(std::string& prompt, const std::vector<Demonstration>& demos) {
    for (const auto& demo : demos) {
        for (int k : bracket_indices(demo.answer)) {
            if (k < 1 || k > static_cast<int>(demo.passages.size())) {
                throw ConfigError("demonstration cites [" + std::to_string(k) +
                                  "] outside its own passage list");
            }
        }
        prompt += "\n\n";
        for (size_t i = 0; i < demo.passages.size(); ++i) {
            prompt += document_line(static_cast<int>(i) + 1, demo.passages[i]) + "\n";
        }
        prompt += "Question: " + demo.question + "\n";
        prompt += "Answer: " + demo.answer;
    }
}

}  // namespace

std::string build_prompt(const QueryInstance& instance, const RunConfig& config,
                         const std::vector<Demonstration>& demos,
                         const std::vector<Passage>& passages) {
    if (static_cast<int>(demos.size()) != config.nshot) {
        throw ConfigError("build_prompt: expected " + std::to_string(config.nshot) +
                          " demonstrations, got " + std::to_string(demos.size()));
    }
    if (config.strategy == Strategy::ClosedBook) {
        if (!passages.empty()) throw ConfigError("build_prompt: ClosedBook takes no passages");
    } else if (static_cast<int>(passages.size()) > config.ndoc) {
        throw ConfigError("build_prompt: more passages than ndoc");
    }

    std::string prompt = templates::instruction(config.strategy,
                                                config.instruction_variant);
    append_demo_blocks(prompt, demos);

    prompt += "\n\n";
    for (size_t i = 0; i < passages.size(); ++i) {
        prompt += document_line(static_cast<int>(i) + 1, passages[i]) + "\n";
    }
    prompt += "Question: " + instance.question;
    bool interactive = config.strategy == Strategy::Interact ||
                       config.strategy == Strategy::InlineSearch;
    if (!interactive) prompt += "\nAnswer:";
    return prompt;
}

std::vector<Demonstration> sample_demonstrations(const std::vector<Demonstration>& pool,
                                                 int nshot, int seed) {
    if (nshot < 0 || nshot > static_cast<int>(pool.size())) {
        throw ConfigError("sample_demonstrations: nshot " + std::to_string(nshot) +
                          " exceeds pool size " + std::to_string(pool.size()));
    }
    std::vector<size_t> order(pool.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937 rng(static_cast<uint32_t>(seed));
    // Partial Fisher-Yates with explicit modulo draws so results do not
    // depend on the standard library's distribution implementation.
    for (size_t i = 0; i < static_cast<size_t>(nshot); ++i) {
        size_t j = i + rng() % (order.size() - i);
        std::swap(order[i], order[j]);
    }
    std::vector<Demonstration> out;
    out.reserve(static_cast<size_t>(nshot));
    for (size_t i = 0; i < static_cast<size_t>(nshot); ++i) out.push_back(pool[order[i]]);
    return out;
}

ScriptedLlm ScriptedLlm::from_queue(std::vector<std::string> continuations) {
    ScriptedLlm llm;
    llm.queue_mode_ = true;
    llm.queue_ = std::move(continuations);
    return llm;
}

ScriptedLlm ScriptedLlm::from_map(std::map<std::string, std::string> by_hash) {
    ScriptedLlm llm;
    llm.by_hash_ = std::move(by_hash);
    return llm;
}

ScriptedLlm ScriptedLlm::from_map_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scripted llm file: " + path);
    json obj = json::parse(in);
    std::map<std::string, std::string> by_hash;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        by_hash[it.key()] = it.value().get<std::string>();
    }
    return from_map(std::move(by_hash));
}

std::string ScriptedLlm::prompt_hash(const std::string& prompt) {
    std::ostringstream out;
    out << std::hex << fnv1a(prompt);
    return out.str();
}

std::string ScriptedLlm::complete(const std::string& prompt) {
    if (queue_mode_) {
        if (next_ >= queue_.size()) {
            throw BackendError("scripted llm queue exhausted");
        }
        return queue_[next_++];
    }
    auto it = by_hash_.find(prompt_hash(prompt));
    if (it == by_hash_.end()) {
        throw BackendError("scripted llm has no continuation for prompt hash " +
                           prompt_hash(prompt));
    }
    return it->second;
}

RemoteLlm::RemoteLlm(std::string endpoint, std::string model_id, double temperature,
                     int max_tokens, std::vector<std::string> stop)
    : endpoint_(std::move(endpoint)),
      model_id_(std::move(model_id)),
      temperature_(temperature),
      max_tokens_(max_tokens),
      stop_(std::move(stop)) {}

std::string RemoteLlm::complete(const std::string& prompt) {
    size_t scheme_end = endpoint_.find("://");
    std::string rest =
        scheme_end == std::string::npos ? endpoint_ : endpoint_.substr(scheme_end + 3);
    size_t slash = rest.find('/');
    std::string host = rest.substr(0, slash == std::string::npos ? rest.size() : slash);
    std::string path = slash == std::string::npos ? "/" : rest.substr(slash);

    json body;
    body["model"] = model_id_;
    body["prompt"] = prompt;
    body["temperature"] = temperature_;
    body["max_tokens"] = max_tokens_;
    body["stop"] = stop_;

    httplib::Client client(host);
    httplib::Headers headers;
    if (const char* key = std::getenv("LLM_API_KEY")) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res || res->status != 200) {
        throw BackendError("LLM backend unreachable: " + endpoint_);
    }
    return json::parse(res->body).at("text").get<std::string>();
}

std::optional<std::string> compress_passage(const Passage& passage,
                                            const std::string& question,
                                            CompressionMode mode, LlmClient& llm) {
    std::string prompt = mode == CompressionMode::Summary ? templates::summary_prompt()
                                                          : templates::snippet_prompt();
    prompt = replace_all(prompt, "{QUESTION}", question);
    prompt = replace_all(prompt, "{TITLE}", passage.title);
    prompt = replace_all(prompt, "{TEXT}", passage.text);
    std::string reply = trim(llm.complete(prompt));
    std::string lower;
    for (char c : reply) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower.rfind("irrelevant", 0) == 0) return std::nullopt;
    return reply;
}

namespace {

GenerationResult single_shot(const QueryInstance& instance, const RunConfig& config,
                             const std::vector<Demonstration>& demos, LlmClient& llm,
                             const std::vector<Passage>& passages) {
    GenerationResult result;
    result.prompt = build_prompt(instance, config, demos, passages);
    result.raw_text = llm.complete(result.prompt);
    return result;
}

}  // namespace

GenerationResult run_vanilla(const QueryInstance& instance, const RunConfig& config,
                             const std::vector<Demonstration>& demos, LlmClient& llm) {
    if (static_cast<int>(instance.retrieved.size()) < config.ndoc) {
        throw DataError("run_vanilla: instance has fewer than ndoc passages");
    }
    std::vector<Passage> docs(instance.retrieved.begin(),
                              instance.retrieved.begin() + config.ndoc);
    return single_shot(instance, config, demos, llm, docs);
}

GenerationResult run_closedbook(const QueryInstance& instance, const RunConfig& config,
                                const std::vector<Demonstration>& demos, LlmClient& llm) {
    return single_shot(instance, config, demos, llm, {});
}

CompressedDocs compress_docs(const QueryInstance& instance, int ndoc,
                             CompressionMode mode, LlmClient& llm) {
    CompressedDocs out;
    int limit = std::min<int>(ndoc, static_cast<int>(instance.retrieved.size()));
    for (int i = 0; i < limit; ++i) {
        const Passage& p = instance.retrieved[static_cast<size_t>(i)];
        auto compressed = compress_passage(p, instance.question, mode, llm);
        if (!compressed) continue;  // flagged irrelevant
        Passage c = p;
        c.text = *compressed;
        out.docs.push_back(std::move(c));
        out.source_indices.push_back(i + 1);
    }
    return out;
}

GenerationResult run_compressed(const QueryInstance& instance, const RunConfig& config,
                                const std::vector<Demonstration>& demos, LlmClient& llm,
                                LlmClient& compressor) {
    CompressionMode mode = config.strategy == Strategy::Snippet
                               ? CompressionMode::Snippet
                               : CompressionMode::Summary;
    auto compressed = compress_docs(instance, config.ndoc, mode, compressor);
    return single_shot(instance, config, demos, llm, compressed.docs);
}

namespace {

// Shared Check/Search/Output/End controller. Shown full texts stay in the
// context for exactly one following model call.
class ActionLoop {
public:
    ActionLoop(LlmClient& llm, int action_cap) : llm_(llm), cap_(action_cap) {}

    void push(std::string segment) { segments_.push_back(std::move(segment)); }

    std::string prompt() const {
        std::string out;
        for (const auto& s : segments_) {
            if (s.empty()) continue;
            if (!out.empty()) out.push_back('\n');
            out += s;
        }
        return out;
    }

    GenerationResult run(
        const std::function<std::vector<int>(const std::string& payload,
                                             std::vector<std::string>& doc_lines)>&
            resolve_docs,
        ActionType doc_action) {
        GenerationResult result;
        result.prompt = prompt();
        std::vector<size_t> previous_volatile;
        std::vector<size_t> new_volatile;
        std::vector<std::string> answer_parts;
        bool forced_output = false;
        int actions = 0;

        while (actions < cap_) {
            std::string p = prompt();
            if (forced_output) p += "\nOutput:";
            std::string line = first_nonempty_line(llm_.complete(p));

            if (forced_output) {
                forced_output = false;
                // Model may or may not echo the forced prefix.
                std::string payload = line.rfind("Output:", 0) == 0
                                          ? trim(line.substr(7))
                                          : line;
                answer_parts.push_back(payload);
                segments_.push_back("Output: " + payload);
                result.trace.steps.push_back({ActionType::Output, payload, {}});
                expire(previous_volatile);
                previous_volatile = std::exchange(new_volatile, {});
                ++actions;
                continue;
            }

            std::string verb = doc_action == ActionType::Check ? "Check:" : "Search:";
            if (line.rfind(verb, 0) == 0) {
                std::string payload = trim(line.substr(verb.size()));
                segments_.push_back(line);
                std::vector<std::string> doc_lines;
                std::vector<int> shown = resolve_docs(payload, doc_lines);
                expire(previous_volatile);
                previous_volatile = std::exchange(new_volatile, {});
                for (auto& dl : doc_lines) {
                    new_volatile.push_back(segments_.size());
                    segments_.push_back(std::move(dl));
                }
                result.trace.steps.push_back({doc_action, payload, shown});
                if (doc_action == ActionType::Check) forced_output = true;
                ++actions;
                continue;
            }
            if (line.rfind("Output:", 0) == 0) {
                std::string payload = trim(line.substr(7));
                answer_parts.push_back(payload);
                segments_.push_back(line);
                result.trace.steps.push_back({ActionType::Output, payload, {}});
                expire(previous_volatile);
                previous_volatile = std::exchange(new_volatile, {});
                ++actions;
                continue;
            }
            // "End", "End." or anything unparseable terminates the episode.
            result.trace.steps.push_back({ActionType::End, line, {}});
            break;
        }

        std::string answer;
        for (const auto& part : answer_parts) {
            if (!answer.empty()) answer.push_back(' ');
            answer += part;
        }
        result.raw_text = answer;
        return result;
    }

private:
    void expire(const std::vector<size_t>& indices) {
        for (size_t i : indices) segments_[i].clear();
    }

    LlmClient& llm_;
    int cap_;
    std::vector<std::string> segments_;
};

}  // namespace

GenerationResult run_interact(const QueryInstance& instance, const RunConfig& config,
                              const std::vector<Demonstration>& demos, LlmClient& llm,
                              const std::vector<Passage>& compressed, int action_cap) {
    if (compressed.empty()) throw DataError("run_interact: no compressed documents");
    RunConfig cfg = config;
    cfg.strategy = Strategy::Interact;
    cfg.ndoc = static_cast<int>(compressed.size());
    ActionLoop loop(llm, action_cap);
    loop.push(build_prompt(instance, cfg, demos, compressed));

    auto resolve = [&](const std::string& payload, std::vector<std::string>& doc_lines) {
        std::vector<int> shown;
        for (int k : bracket_indices(payload)) {
            if (k < 1 || k > static_cast<int>(compressed.size())) continue;
            if (std::find(shown.begin(), shown.end(), k) != shown.end()) continue;
            shown.push_back(k);
            if (shown.size() == 3) break;  // at most 3 documents per Check
        }
        for (int k : shown) {
            doc_lines.push_back(document_line(k, compressed[static_cast<size_t>(k - 1)]));
        }
        return shown;
    };
    return loop.run(resolve, ActionType::Check);
}

GenerationResult run_inline_search(const QueryInstance& instance, const RunConfig& config,
                                   const std::vector<Demonstration>& demos,
                                   LlmClient& llm, const Embedder& embedder,
                                   int action_cap) {
    if (instance.retrieved.empty()) throw DataError("run_inline_search: no candidates");
    RunConfig cfg = config;
    cfg.strategy = Strategy::InlineSearch;
    ActionLoop loop(llm, action_cap);
    loop.push(build_prompt(instance, cfg, demos, {}));

    std::vector<bool> shown_before(instance.retrieved.size(), false);
    auto resolve = [&](const std::string& payload, std::vector<std::string>& doc_lines) {
        std::vector<Passage> remaining;
        std::vector<size_t> remaining_idx;
        for (size_t i = 0; i < instance.retrieved.size(); ++i) {
            if (shown_before[i]) continue;
            remaining.push_back(instance.retrieved[i]);
            remaining_idx.push_back(i);
        }
        std::vector<int> shown;
        if (!remaining.empty()) {
            auto ranked = rerank_candidates(payload, remaining, embedder);
            // Map the winner back to its position in the full candidate list.
            for (size_t i = 0; i < remaining.size(); ++i) {
                if (remaining[i].id == ranked.front().id) {
                    size_t orig = remaining_idx[i];
                    shown_before[orig] = true;
                    int k = static_cast<int>(orig) + 1;
                    shown.push_back(k);
                    doc_lines.push_back(document_line(k, instance.retrieved[orig]));
                    break;
                }
            }
        }
        return shown;
    };
    return loop.run(resolve, ActionType::Search);
}

}  // namespace alce
