#include "alce/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "alce/parser.hpp"
#include "alce/postedit.hpp"

namespace alce {

using json = nlohmann::ordered_json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << content;
}

/// Deterministic offline fallback backend: always answers with a fixed
/// sentence citing document 1.
class EchoLlm : public LlmClient {
public:
    std::string complete(const std::string&) override {
        return "According to the provided search results, see [1].";
    }
};

}  // namespace

std::shared_ptr<EntailmentOracle> make_oracle(const std::string& spec) {
    if (spec == "substring") return std::make_shared<SubstringOracle>();
    if (spec.rfind("table:", 0) == 0) {
        return std::make_shared<TableOracle>(TableOracle::from_file(spec.substr(6)));
    }
    if (spec == "remote") {
        const char* ep = std::getenv("NLI_ENDPOINT");
        if (!ep) throw ConfigError("oracle 'remote' requires NLI_ENDPOINT");
        return std::make_shared<CachingOracle>(std::make_shared<RemoteNliOracle>(ep));
    }
    throw ConfigError("unknown oracle spec: " + spec);
}

std::shared_ptr<LlmClient> make_llm(const std::string& spec, const RunConfig& config) {
    if (spec == "echo") return std::make_shared<EchoLlm>();
    if (spec.rfind("scripted:", 0) == 0) {
        std::string path = spec.substr(9);
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open scripted llm file: " + path);
        nlohmann::json doc = nlohmann::json::parse(in);
        if (doc.is_array()) {
            return std::make_shared<ScriptedLlm>(
                ScriptedLlm::from_queue(doc.get<std::vector<std::string>>()));
        }
        std::map<std::string, std::string> by_hash;
        for (auto it = doc.begin(); it != doc.end(); ++it) {
            by_hash[it.key()] = it.value().get<std::string>();
        }
        return std::make_shared<ScriptedLlm>(ScriptedLlm::from_map(std::move(by_hash)));
    }
    if (spec.rfind("remote:", 0) == 0) {
        return std::make_shared<RemoteLlm>(spec.substr(7), config.model_id,
                                           config.temperature);
    }
    if (spec == "remote") {
        const char* ep = std::getenv("LLM_ENDPOINT");
        if (!ep) throw ConfigError("llm 'remote' requires LLM_ENDPOINT");
        return std::make_shared<RemoteLlm>(ep, config.model_id, config.temperature);
    }
    throw ConfigError("unknown llm spec: " + spec);
}

std::vector<Demonstration> load_demo_pool(const std::string& path) {
    nlohmann::json arr = nlohmann::json::parse(slurp(path));
    std::vector<Demonstration> pool;
    for (const auto& rec : arr) {
        Demonstration d;
        d.question = rec.at("question").get<std::string>();
        d.answer = rec.at("answer").get<std::string>();
        if (rec.contains("docs")) {
            for (const auto& doc : rec["docs"]) {
                Passage p;
                p.id = doc.value("id", "");
                p.title = doc.at("title").get<std::string>();
                p.text = doc.at("text").get<std::string>();
                d.passages.push_back(std::move(p));
            }
        }
        pool.push_back(std::move(d));
    }
    return pool;
}

void cmd_retrieve(const RetrieveOptions& opts) {
    Corpus corpus = Corpus::from_jsonl(opts.corpus_path);
    auto instances = load_dataset(opts.dataset_path, opts.kind);
    std::unique_ptr<Retriever> retriever;
    if (opts.retriever == "bm25") {
        retriever = std::make_unique<Bm25Retriever>();
    } else if (opts.retriever == "dense") {
        retriever = std::make_unique<DenseRetriever>(std::make_shared<HashingEmbedder>());
    } else {
        throw ConfigError("unknown retriever: " + opts.retriever);
    }
    for (auto& inst : instances) {
        inst.retrieved = retriever->retrieve(inst.question, corpus, opts.k);
    }
    save_dataset(instances, opts.out_path);
}

namespace {

struct GeneratedExample {
    GenerationRecord record;
};

json trace_to_json(const ActionTrace& trace) {
    json steps = json::array();
    for (const auto& s : trace.steps) {
        steps.push_back({{"action", to_string(s.action)},
                         {"payload", s.payload},
                         {"shown_passages", s.shown_passages}});
    }
    return steps;
}

GenerationRecord generate_one(const QueryInstance& inst, const GenerateOptions& opts,
                              const std::vector<Demonstration>& demos, LlmClient& llm) {
    GenerationRecord rec;
    rec.id = inst.id;
    const RunConfig& cfg = opts.config;
    switch (cfg.strategy) {
        case Strategy::Vanilla: {
            auto r = run_vanilla(inst, cfg, demos, llm);
            rec.raw_output = r.raw_text;
            for (int i = 1; i <= cfg.ndoc; ++i) rec.docs_used.push_back(i);
            break;
        }
        case Strategy::ClosedBook: {
            auto r = run_closedbook(inst, cfg, demos, llm);
            rec.raw_output = r.raw_text;
            break;
        }
        case Strategy::Summ:
        case Strategy::Snippet: {
            CompressionMode mode = cfg.strategy == Strategy::Snippet
                                       ? CompressionMode::Snippet
                                       : CompressionMode::Summary;
            auto compressed = compress_docs(inst, cfg.ndoc, mode, llm);
            auto r = [&] {
                GenerationResult out;
                out.prompt = build_prompt(inst, cfg, demos, compressed.docs);
                out.raw_text = llm.complete(out.prompt);
                return out;
            }();
            rec.raw_output = r.raw_text;
            rec.docs_used = compressed.source_indices;
            break;
        }
        case Strategy::Interact: {
            auto compressed = compress_docs(inst, cfg.ndoc, CompressionMode::Summary,
                                            llm);
            auto r = run_interact(inst, cfg, demos, llm, compressed.docs,
                                  opts.action_cap);
            rec.raw_output = r.raw_text;
            rec.trace = r.trace;
            rec.docs_used = compressed.source_indices;
            break;
        }
        case Strategy::InlineSearch: {
            HashingEmbedder embedder;
            auto r = run_inline_search(inst, cfg, demos, llm, embedder, opts.action_cap);
            rec.raw_output = r.raw_text;
            rec.trace = r.trace;
            for (size_t i = 1; i <= inst.retrieved.size(); ++i) {
                rec.docs_used.push_back(static_cast<int>(i));
            }
            break;
        }
    }
    return rec;
}

}  // namespace

void cmd_generate(const GenerateOptions& opts) {
    auto instances = load_dataset(opts.dataset_path, opts.kind);
    auto llm = make_llm(opts.llm_spec, opts.config);

    std::vector<Demonstration> demos;
    if (opts.config.nshot > 0) {
        if (opts.demos_path.empty()) {
            throw ConfigError("nshot > 0 requires a demonstration pool (--demos)");
        }
        auto pool = load_demo_pool(opts.demos_path);
        demos = sample_demonstrations(pool, opts.config.nshot, opts.config.seed);
    }

    std::shared_ptr<EntailmentOracle> oracle;
    if (opts.config.rerank_samples > 1) oracle = make_oracle(opts.oracle_spec);

    json examples = json::array();
    for (const auto& inst : instances) {
        GenerationRecord rec;
        if (opts.config.rerank_samples > 1) {
            std::vector<std::string> candidates;
            std::vector<int> docs_used;
            for (int s = 0; s < opts.config.rerank_samples; ++s) {
                auto one = generate_one(inst, opts, demos, *llm);
                candidates.push_back(one.raw_output);
                docs_used = one.docs_used;
                if (s == 0) rec = one;
            }
            std::vector<Passage> passages;
            for (int d : docs_used) {
                passages.push_back(inst.retrieved[static_cast<size_t>(d - 1)]);
            }
            auto chosen =
                rerank_by_citation_recall(candidates, inst, passages, *oracle);
            rec.candidates = candidates;
            rec.chosen_index = chosen.chosen_index;
            rec.raw_output = chosen.chosen;
        } else {
            rec = generate_one(inst, opts, demos, *llm);
        }

        json ex;
        ex["id"] = rec.id;
        ex["raw_output"] = rec.raw_output;
        ex["docs_used"] = rec.docs_used;
        if (!rec.candidates.empty()) {
            ex["candidates"] = rec.candidates;
            ex["chosen_index"] = rec.chosen_index;
        }
        ex["trace"] = trace_to_json(rec.trace);
        examples.push_back(std::move(ex));
    }

    json root;
    json cfg;
    cfg["strategy"] = to_string(opts.config.strategy);
    cfg["ndoc"] = opts.config.ndoc;
    cfg["nshot"] = opts.config.nshot;
    cfg["seed"] = opts.config.seed;
    cfg["rerank_samples"] = opts.config.rerank_samples;
    cfg["instruction_variant"] =
        opts.config.instruction_variant == InstructionVariant::Light ? "light" : "full";
    cfg["model_id"] = opts.config.model_id;
    cfg["temperature"] = opts.config.temperature;
    root["config"] = std::move(cfg);
    root["template_version"] = kPromptTemplateVersion;
    root["examples"] = std::move(examples);
    spit(opts.out_path, root.dump(2) + "\n");
}

std::vector<GenerationRecord> load_generation_file(const std::string& path) {
    nlohmann::json root = nlohmann::json::parse(slurp(path));
    std::vector<GenerationRecord> out;
    for (const auto& ex : root.at("examples")) {
        GenerationRecord rec;
        rec.id = ex.at("id").get<std::string>();
        rec.raw_output = ex.at("raw_output").get<std::string>();
        if (ex.contains("docs_used")) {
            rec.docs_used = ex["docs_used"].get<std::vector<int>>();
        }
        if (ex.contains("candidates")) {
            rec.candidates = ex["candidates"].get<std::vector<std::string>>();
            rec.chosen_index = ex.value("chosen_index", 0);
        }
        out.push_back(std::move(rec));
    }
    return out;
}

namespace {

RunConfig config_from_generation_file(const std::string& path) {
    nlohmann::json root = nlohmann::json::parse(slurp(path));
    RunConfig cfg;
    if (!root.contains("config")) return cfg;
    const auto& c = root["config"];
    cfg.strategy = strategy_from_string(c.value("strategy", "vanilla"));
    cfg.ndoc = c.value("ndoc", 5);
    cfg.nshot = c.value("nshot", 2);
    cfg.seed = c.value("seed", 1);
    cfg.rerank_samples = c.value("rerank_samples", 1);
    cfg.instruction_variant = c.value("instruction_variant", "full") == "light"
                                  ? InstructionVariant::Light
                                  : InstructionVariant::Full;
    cfg.model_id = c.value("model_id", "stub");
    cfg.temperature = c.value("temperature", 0.0);
    return cfg;
}

void print_aggregate_table(const EvalReport& report, std::ostream& out) {
    out << "metric                mean (std)\n";
    for (const auto& [name, s] : report.aggregate) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%-20s  %.4f (%.4f)\n", name.c_str(), s.mean,
                      s.std_dev);
        out << buf;
    }
}

}  // namespace

void cmd_eval(const EvalOptions& opts) {
    auto instances = load_dataset(opts.dataset_path, opts.kind);
    auto records = load_generation_file(opts.generation_path);

    std::map<std::string, const GenerationRecord*> by_id;
    for (const auto& r : records) by_id[r.id] = &r;
    std::vector<std::string> missing;
    for (const auto& inst : instances) {
        if (!by_id.count(inst.id)) missing.push_back(inst.id);
    }
    if (!missing.empty()) {
        std::string msg = "generation file is missing ids:";
        for (const auto& id : missing) msg += " " + id;
        throw DataError(msg);
    }
    // Validate docs_used up front: worker threads must not throw.
    for (const auto& inst : instances) {
        for (int d : by_id.at(inst.id)->docs_used) {
            if (d < 1 || d > static_cast<int>(inst.retrieved.size())) {
                throw DataError("example " + inst.id + ": docs_used index " +
                                std::to_string(d) + " out of range");
            }
        }
    }

    auto oracle = make_oracle(opts.oracle_spec);
    ParseLog log;
    std::mutex log_mutex;

    EvalReport report;
    report.per_example.resize(instances.size());
    std::vector<std::string> truncated_outputs(instances.size());

    auto eval_range = [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            const auto& inst = instances[i];
            const auto& rec = *by_id.at(inst.id);
            std::vector<Passage> passages;
            for (int d : rec.docs_used) {
                passages.push_back(inst.retrieved[static_cast<size_t>(d - 1)]);
            }
            ParseLog local_log;
            auto parsed = parse_response(rec.raw_output, opts.kind,
                                         static_cast<int>(passages.size()), &local_log,
                                         inst.id);
            truncated_outputs[i] = parsed.raw_text;
            report.per_example[i] = evaluate_example(inst, parsed, passages, *oracle);
            if (!local_log.entries().empty()) {
                std::lock_guard<std::mutex> lock(log_mutex);
                for (const auto& e : local_log.entries()) log.record(e);
            }
        }
    };

    int workers = std::max(1, opts.workers);
    if (workers == 1 || instances.size() < 2) {
        eval_range(0, instances.size());
    } else {
        std::vector<std::thread> threads;
        size_t chunk = (instances.size() + workers - 1) / static_cast<size_t>(workers);
        for (size_t begin = 0; begin < instances.size(); begin += chunk) {
            threads.emplace_back(eval_range, begin,
                                 std::min(begin + chunk, instances.size()));
        }
        for (auto& t : threads) t.join();
    }

    // Fluency is corpus-level and never reported for QAMPARI.
    if (!opts.mauve_spec.empty() && opts.kind != DatasetKind::Qampari) {
        std::unique_ptr<MauveBackend> backend;
        if (opts.mauve_spec.rfind("stub:", 0) == 0) {
            backend = std::make_unique<StubMauveBackend>(
                std::stod(opts.mauve_spec.substr(5)));
        } else if (opts.mauve_spec.rfind("remote:", 0) == 0) {
            backend = std::make_unique<RemoteMauveBackend>(opts.mauve_spec.substr(7));
        } else {
            throw ConfigError("unknown mauve spec: " + opts.mauve_spec);
        }
        std::vector<std::pair<std::string, std::string>> pairs;
        for (size_t i = 0; i < instances.size(); ++i) {
            const auto& inst = instances[i];
            std::vector<std::string> golds;
            if (const auto* g = std::get_if<AsqaGold>(&inst.gold)) golds = g->gold_answers;
            if (const auto* g = std::get_if<Eli5Gold>(&inst.gold)) golds = g->gold_answers;
            if (golds.empty()) continue;
            pairs.emplace_back(fluency_preprocess(inst.question, golds.front()),
                               fluency_preprocess(inst.question, truncated_outputs[i]));
        }
        if (!pairs.empty()) {
            if (auto value = fluency_score(pairs, *backend)) {
                for (auto& ex : report.per_example) ex.fluency = *value;
            }
        }
    }

    finalize_report(report);
    RunConfig cfg = config_from_generation_file(opts.generation_path);
    spit(opts.out_path, report_to_json(report, cfg) + "\n");
    if (!opts.parse_log_path.empty()) spit(opts.parse_log_path, log.to_jsonl());
    print_aggregate_table(report, std::cout);
}

void cmd_eval_aggregate(const std::vector<std::string>& report_paths,
                        const std::string& out_path) {
    std::vector<EvalReport> reports;
    nlohmann::json first_cfg;
    for (const auto& path : report_paths) {
        nlohmann::json root = nlohmann::json::parse(slurp(path));
        nlohmann::json cfg = root.value("config", nlohmann::json::object());
        cfg.erase("seed");
        if (reports.empty()) {
            first_cfg = cfg;
        } else if (cfg != first_cfg) {
            throw ConfigError("aggregate: report configs differ beyond seed: " + path);
        }
        EvalReport rep;
        for (auto it = root.at("aggregate").begin(); it != root.at("aggregate").end();
             ++it) {
            rep.aggregate[it.key()] = {it.value().at("mean").get<double>(),
                                       it.value().at("std").get<double>()};
        }
        reports.push_back(std::move(rep));
    }
    EvalReport combined = aggregate(reports);
    json root;
    root["n_seeds"] = report_paths.size();
    json agg;
    for (const auto& [name, s] : combined.aggregate) {
        agg[name] = {{"mean", s.mean}, {"std", s.std_dev}};
    }
    root["aggregate"] = std::move(agg);
    spit(out_path, root.dump(2) + "\n");
    print_aggregate_table(combined, std::cout);
}

int run_cli(int argc, char** argv) {
    CLI::App app{"ALCE-style citation-quality evaluation and generation"};
    app.require_subcommand(1);

    RetrieveOptions ropts;
    std::string r_dataset_kind = "asqa";
    auto* retrieve = app.add_subcommand("retrieve", "attach top-k passages to a dataset");
    retrieve->add_option("--corpus", ropts.corpus_path)->required();
    retrieve->add_option("--data", ropts.dataset_path)->required();
    retrieve->add_option("--dataset", r_dataset_kind, "asqa|qampari|eli5");
    retrieve->add_option("--retriever", ropts.retriever, "bm25|dense");
    retrieve->add_option("-k,--top-k", ropts.k);
    retrieve->add_option("--out", ropts.out_path)->required();

    GenerateOptions gopts;
    std::string g_dataset_kind = "asqa";
    std::string g_strategy = "vanilla";
    std::string g_instruction = "full";
    auto* generate = app.add_subcommand("generate", "run a synthesis strategy");
    generate->add_option("--data", gopts.dataset_path)->required();
    generate->add_option("--dataset", g_dataset_kind, "asqa|qampari|eli5");
    generate->add_option("--strategy", g_strategy,
                         "vanilla|summ|snippet|interact|inlinesearch|closedbook");
    generate->add_option("--ndoc", gopts.config.ndoc);
    generate->add_option("--shot", gopts.config.nshot);
    generate->add_option("--seed", gopts.config.seed);
    generate->add_option("--rerank", gopts.config.rerank_samples);
    generate->add_option("--instruction", g_instruction, "full|light");
    generate->add_option("--temperature", gopts.config.temperature);
    generate->add_option("--model", gopts.config.model_id);
    generate->add_option("--llm", gopts.llm_spec, "remote|remote:URL|scripted:PATH|echo");
    generate->add_option("--oracle", gopts.oracle_spec,
                         "remote|substring|table:PATH (for --rerank > 1)");
    generate->add_option("--demos", gopts.demos_path);
    generate->add_option("--action-cap", gopts.action_cap);
    generate->add_option("--out", gopts.out_path)->required();

    EvalOptions eopts;
    std::string e_dataset_kind = "asqa";
    std::vector<std::string> aggregate_paths;
    auto* eval = app.add_subcommand("eval", "score generations");
    eval->add_option("--gen", eopts.generation_path);
    eval->add_option("--data", eopts.dataset_path);
    eval->add_option("--dataset", e_dataset_kind, "asqa|qampari|eli5");
    eval->add_option("--oracle", eopts.oracle_spec, "remote|substring|table:PATH");
    eval->add_option("--mauve", eopts.mauve_spec, "stub:VALUE|remote:URL");
    eval->add_option("--parse-log", eopts.parse_log_path);
    eval->add_option("--workers", eopts.workers);
    eval->add_option("--aggregate", aggregate_paths,
                     "per-seed report files to combine instead of scoring");
    eval->add_option("--out", eopts.out_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfigError;
    }

    try {
        if (retrieve->parsed()) {
            ropts.kind = dataset_kind_from_string(r_dataset_kind);
            cmd_retrieve(ropts);
        } else if (generate->parsed()) {
            gopts.kind = dataset_kind_from_string(g_dataset_kind);
            gopts.config.strategy = strategy_from_string(g_strategy);
            gopts.config.instruction_variant = g_instruction == "light"
                                                   ? InstructionVariant::Light
                                                   : InstructionVariant::Full;
            cmd_generate(gopts);
        } else if (eval->parsed()) {
            if (!aggregate_paths.empty()) {
                cmd_eval_aggregate(aggregate_paths, eopts.out_path);
            } else {
                if (eopts.generation_path.empty() || eopts.dataset_path.empty()) {
                    throw ConfigError("eval requires --gen and --data (or --aggregate)");
                }
                eopts.kind = dataset_kind_from_string(e_dataset_kind);
                cmd_eval(eopts);
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const BackendError& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return kExitBackendError;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}

}  // namespace alce
