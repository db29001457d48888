#include "alce/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace alce {

using json = nlohmann::ordered_json;

namespace {

std::vector<std::string> tokens_of(const std::string& text) {
    std::istringstream in(normalize_text(text));
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::vector<Passage> cited_passages(const Statement& st,
                                    const std::vector<Passage>& passages,
                                    int skip_index = -1) {
    std::vector<Passage> out;
    for (int k : st.citations) {
        if (k == skip_index) continue;
        if (k < 1 || k > static_cast<int>(passages.size())) {
            throw std::out_of_range("citation index " + std::to_string(k) +
                                    " out of range");
        }
        out.push_back(passages[static_cast<size_t>(k - 1)]);
    }
    return out;
}

int statement_recall(const Statement& st, const std::vector<Passage>& passages,
                     EntailmentOracle& oracle) {
    if (st.citations.empty()) return 0;
    return oracle.entails(render_premise(cited_passages(st, passages)), st.text);
}

}  // namespace

double citation_recall(const ParsedResponse& parsed, const std::vector<Passage>& passages,
                       EntailmentOracle& oracle) {
    if (parsed.statements.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& st : parsed.statements) {
        sum += statement_recall(st, passages, oracle);
    }
    return sum / static_cast<double>(parsed.statements.size());
}

double citation_precision(const ParsedResponse& parsed,
                          const std::vector<Passage>& passages,
                          EntailmentOracle& oracle) {
    int n_citations = 0;
    double sum = 0.0;
    for (const auto& st : parsed.statements) {
        if (st.citations.empty()) continue;
        int recall = statement_recall(st, passages, oracle);
        for (int k : st.citations) {
            ++n_citations;
            if (recall != 1) continue;  // precision gated on statement recall
            int alone = oracle.entails(
                render_premise({passages[static_cast<size_t>(k - 1)]}), st.text);
            if (alone == 1) {
                sum += 1.0;
                continue;
            }
            if (st.citations.size() == 1) {
                // recall = 1 with one citation forces alone = 1; kept for
                // oracle backends that are not perfectly consistent.
                sum += 1.0;
                continue;
            }
            int rest = oracle.entails(render_premise(cited_passages(st, passages, k)),
                                      st.text);
            if (rest != 1) sum += 1.0;  // not irrelevant
        }
    }
    if (n_citations == 0) return 0.0;
    return sum / static_cast<double>(n_citations);
}

double em_recall_asqa(const std::string& output, const AsqaGold& gold) {
    if (gold.qa_pairs.empty()) return 0.0;
    std::string haystack = normalize_text(output);
    int hit = 0;
    for (const auto& aliases : gold.qa_pairs) {
        for (const auto& alias : aliases) {
            std::string needle = normalize_text(alias);
            if (!needle.empty() && haystack.find(needle) != std::string::npos) {
                ++hit;
                break;
            }
        }
    }
    return static_cast<double>(hit) / static_cast<double>(gold.qa_pairs.size());
}

QampariScores qampari_scores(const ParsedResponse& parsed, const QampariGold& gold) {
    std::vector<std::string> preds;
    for (const auto& st : parsed.statements) {
        std::string norm = normalize_text(st.text);
        if (norm.empty()) continue;
        if (std::find(preds.begin(), preds.end(), norm) == preds.end()) {
            preds.push_back(norm);
        }
    }
    std::vector<bool> matched(gold.answer_sets.size(), false);
    int correct = 0;
    for (const auto& pred : preds) {
        for (size_t g = 0; g < gold.answer_sets.size(); ++g) {
            if (matched[g]) continue;
            bool hit = false;
            for (const auto& alias : gold.answer_sets[g]) {
                if (normalize_text(alias) == pred) {
                    hit = true;
                    break;
                }
            }
            if (hit) {
                matched[g] = true;
                ++correct;
                break;
            }
        }
    }
    QampariScores scores;
    int n_gold = static_cast<int>(gold.answer_sets.size());
    scores.precision =
        preds.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(preds.size());
    scores.recall = n_gold == 0 ? 0.0
                                : static_cast<double>(correct) / static_cast<double>(n_gold);
    int denom = std::min(n_gold, 5);
    scores.recall_5 = denom == 0 ? 0.0
                                 : static_cast<double>(std::min(correct, 5)) /
                                       static_cast<double>(denom);
    return scores;
}

double claim_recall_eli5(const std::string& output, const ClaimSet& claims,
                         EntailmentOracle& oracle) {
    if (claims.claims.size() != 3) {
        throw std::invalid_argument("claim_recall_eli5: need exactly 3 claims");
    }
    if (output.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& claim : claims.claims) {
        sum += oracle.entails(output, claim);  // output is the premise
    }
    return sum / 3.0;
}

double rouge_l(const std::string& output, const std::vector<std::string>& references) {
    if (references.empty()) {
        throw std::invalid_argument("rouge_l: references must be non-empty");
    }
    auto cand = tokens_of(output);
    double best = 0.0;
    for (const auto& ref_text : references) {
        auto ref = tokens_of(ref_text);
        if (cand.empty() && ref.empty()) {
            best = std::max(best, 100.0);
            continue;
        }
        if (cand.empty() || ref.empty()) continue;
        // LCS length by dynamic programming.
        std::vector<std::vector<int>> dp(cand.size() + 1,
                                         std::vector<int>(ref.size() + 1, 0));
        for (size_t i = 1; i <= cand.size(); ++i) {
            for (size_t j = 1; j <= ref.size(); ++j) {
                dp[i][j] = cand[i - 1] == ref[j - 1]
                               ? dp[i - 1][j - 1] + 1
                               : std::max(dp[i - 1][j], dp[i][j - 1]);
            }
        }
        double lcs = dp[cand.size()][ref.size()];
        if (lcs == 0) continue;
        double p = lcs / static_cast<double>(cand.size());
        double r = lcs / static_cast<double>(ref.size());
        best = std::max(best, 100.0 * 2.0 * p * r / (p + r));
    }
    return best;
}

std::string fluency_preprocess(const std::string& question, const std::string& answer) {
    std::string combined = question;
    if (!answer.empty()) combined += " " + answer;
    std::istringstream in(combined);
    std::string word;
    std::string out;
    int count = 0;
    while (count < 100 && in >> word) {
        if (!out.empty()) out.push_back(' ');
        out += word;
        ++count;
    }
    return out;
}

RemoteMauveBackend::RemoteMauveBackend(std::string endpoint)
    : endpoint_(std::move(endpoint)) {}

std::string RemoteMauveBackend::request_payload(const std::vector<std::string>& p_texts,
                                                const std::vector<std::string>& q_texts) {
    json body;
    body["p_texts"] = p_texts;
    body["q_texts"] = q_texts;
    return body.dump();
}

std::optional<double> RemoteMauveBackend::score(const std::vector<std::string>& p_texts,
                                                const std::vector<std::string>& q_texts) {
    size_t scheme_end = endpoint_.find("://");
    std::string rest =
        scheme_end == std::string::npos ? endpoint_ : endpoint_.substr(scheme_end + 3);
    size_t slash = rest.find('/');
    std::string host = rest.substr(0, slash == std::string::npos ? rest.size() : slash);
    std::string path = slash == std::string::npos ? "/" : rest.substr(slash);

    httplib::Client client(host);
    auto res = client.Post(path, request_payload(p_texts, q_texts), "application/json");
    if (!res || res->status != 200) return std::nullopt;  // run continues without fluency
    return nlohmann::json::parse(res->body).at("mauve").get<double>();
}

std::optional<double> fluency_score(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    MauveBackend& backend) {
    std::vector<std::string> p_texts;
    std::vector<std::string> q_texts;
    for (const auto& [gold, model] : pairs) {
        p_texts.push_back(gold);
        q_texts.push_back(model);
    }
    return backend.score(p_texts, q_texts);
}

namespace {

struct ClaimDemo {
    const char* question;
    const char* passage;
    const char* claims[3];
};

const ClaimDemo kClaimDemos[3] = {
    {"What's the difference between Shia vs. Sunni Islam?",
     "The main difference between Shia and Sunni Muslim is related to ideological "
     "heritage and issues of leadership. This difference is first formed after the "
     "death of the Prophet Muhammad in 632 A.D. The ideological practice of the "
     "Sunni branch strictly follows Prophet Muhammad and his teachings, while the "
     "Shia branch follows Prophet Muhammad's son-in-law Ali. Nowadays, Sunni and "
     "Shia are the major branches of Islam.",
     {"The major branches of Islam are Sunni and Shia.",
      "Prophet Muhammad died in 632 A.D.",
      "The ideological practice of the Sunni branch strictly follows Prophet "
      "Muhammad and his teachings."}},
    {"What causes Bi-polar disorder?",
     "Bipolar disorder is an emotional disorder that causes extreme mood swings "
     "between excitement and depression. The spectrum of mood swing may span from "
     "days to months. We are still not certain of the exact factors that cause "
     "such disorder, but genetics is considered a major factor.",
     {"One symptom of Bi-polar disorder is extreme mood swings between excitement "
      "and depression.",
      "Genetics could be one of the major factors that causes Bi-polar disorder.",
      "The mood swing from Bi-polar disorder can last days to months."}},
    {"How do we hear differences in sound besides volume and pitch?",
     "Pitch refers to the frequency of soundwave, and volumn refers to the "
     "amplitude of the soundwave. Besides volumn and pitch, we can also tell the "
     "difference between sounds based on the tone of sound. For example, we can "
     "differentiate the sound of different instruments based on the tone of the "
     "sounds.",
     {"Volume of sound is the amplitude of the soundwave.",
      "Pitch is the frequency of soundwave.",
      "We can use the tone of the sounds to differentiate the sound of different "
      "instruments."}},
};

}  // namespace

std::string claim_generation_prompt(const std::string& question,
                                    const std::string& gold_answer) {
    std::string prompt =
        "Read the original question and passage, and generate 3 additional claims "
        "that are supported by the passage and answer the question.";
    for (const auto& demo : kClaimDemos) {
        prompt += "\n\nOriginal question: ";
        prompt += demo.question;
        prompt += "\nPassage: ";
        prompt += demo.passage;
        for (int i = 0; i < 3; ++i) {
            prompt += "\nClaim " + std::to_string(i + 1) + ": " + demo.claims[i];
        }
    }
    prompt += "\n\nOriginal question: " + question;
    prompt += "\nPassage: " + gold_answer;
    return prompt;
}

ClaimSet generate_claims(const std::string& question, const std::string& gold_answer,
                         LlmClient& llm) {
    if (gold_answer.empty()) {
        throw std::invalid_argument("generate_claims: gold answer must be non-empty");
    }
    std::string continuation = llm.complete(claim_generation_prompt(question, gold_answer));
    ClaimSet out;
    std::istringstream lines(continuation);
    std::string line;
    while (std::getline(lines, line) && out.claims.size() < 3) {
        std::string expect = "Claim " + std::to_string(out.claims.size() + 1) + ":";
        size_t pos = line.find(expect);
        if (pos == std::string::npos) continue;
        std::string claim = line.substr(pos + expect.size());
        size_t b = claim.find_first_not_of(" \t");
        claim = b == std::string::npos ? "" : claim.substr(b);
        if (!claim.empty()) out.claims.push_back(claim);
    }
    if (out.claims.size() != 3) {
        throw DataError("generate_claims: expected 3 claims, got " +
                        std::to_string(out.claims.size()) + "; raw continuation: " +
                        continuation);
    }
    return out;
}

namespace {

using MetricGetter = std::optional<double> (*)(const ExampleScores&);

struct MetricDef {
    const char* name;
    MetricGetter get;
};

const MetricDef kMetrics[] = {
    {"fluency", [](const ExampleScores& e) { return e.fluency; }},
    {"em_recall", [](const ExampleScores& e) { return e.em_recall; }},
    {"qampari_precision", [](const ExampleScores& e) { return e.qampari_precision; }},
    {"qampari_recall", [](const ExampleScores& e) { return e.qampari_recall; }},
    {"qampari_recall5", [](const ExampleScores& e) { return e.qampari_recall5; }},
    {"claim_recall", [](const ExampleScores& e) { return e.claim_recall; }},
    {"rouge_l", [](const ExampleScores& e) { return e.rouge_l; }},
    {"citation_recall",
     [](const ExampleScores& e) { return std::optional<double>(e.citation_recall); }},
    {"citation_precision",
     [](const ExampleScores& e) { return std::optional<double>(e.citation_precision); }},
};

MetricSummary summarize(const std::vector<double>& values) {
    MetricSummary s;
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double sq = 0.0;
        for (double v : values) sq += (v - s.mean) * (v - s.mean);
        s.std_dev = std::sqrt(sq / static_cast<double>(values.size() - 1));
    }
    return s;
}

}  // namespace

void finalize_report(EvalReport& report) {
    report.aggregate.clear();
    for (const auto& metric : kMetrics) {
        std::vector<double> values;
        for (const auto& ex : report.per_example) {
            if (auto v = metric.get(ex)) values.push_back(*v);
        }
        if (!values.empty()) report.aggregate[metric.name] = summarize(values);
    }
}

EvalReport aggregate(const std::vector<EvalReport>& reports) {
    if (reports.empty()) throw ConfigError("aggregate: no reports");
    EvalReport out;
    for (const auto& metric : kMetrics) {
        std::vector<double> means;
        bool present_everywhere = true;
        for (const auto& rep : reports) {
            auto it = rep.aggregate.find(metric.name);
            if (it == rep.aggregate.end()) {
                present_everywhere = false;
                break;
            }
            means.push_back(it->second.mean);
        }
        // A metric absent in any seed stays absent in the aggregate.
        if (present_everywhere && !means.empty()) {
            out.aggregate[metric.name] = summarize(means);
        }
    }
    return out;
}

ExampleScores evaluate_example(const QueryInstance& instance,
                               const ParsedResponse& parsed,
                               const std::vector<Passage>& passages,
                               EntailmentOracle& oracle) {
    ExampleScores scores;
    scores.n_statements = static_cast<int>(parsed.statements.size());
    for (const auto& st : parsed.statements) {
        scores.n_citations += static_cast<int>(st.citations.size());
    }
    scores.citation_recall = citation_recall(parsed, passages, oracle);
    scores.citation_precision = citation_precision(parsed, passages, oracle);

    switch (instance.dataset_kind) {
        case DatasetKind::Asqa: {
            const auto& gold = std::get<AsqaGold>(instance.gold);
            scores.em_recall = em_recall_asqa(parsed.raw_text, gold);
            if (!gold.gold_answers.empty()) {
                scores.rouge_l = rouge_l(parsed.raw_text, gold.gold_answers);
            }
            break;
        }
        case DatasetKind::Qampari: {
            auto q = qampari_scores(parsed, std::get<QampariGold>(instance.gold));
            scores.qampari_precision = q.precision;
            scores.qampari_recall = q.recall;
            scores.qampari_recall5 = q.recall_5;
            break;
        }
        case DatasetKind::Eli5: {
            const auto& gold = std::get<Eli5Gold>(instance.gold);
            ClaimSet claims{gold.claims};
            scores.claim_recall = claim_recall_eli5(parsed.raw_text, claims, oracle);
            if (!gold.gold_answers.empty()) {
                scores.rouge_l = rouge_l(parsed.raw_text, gold.gold_answers);
            }
            break;
        }
    }
    return scores;
}

std::string report_to_json(const EvalReport& report, const RunConfig& config) {
    json root;
    json cfg;
    cfg["strategy"] = to_string(config.strategy);
    cfg["ndoc"] = config.ndoc;
    cfg["nshot"] = config.nshot;
    cfg["seed"] = config.seed;
    cfg["rerank_samples"] = config.rerank_samples;
    cfg["instruction_variant"] =
        config.instruction_variant == InstructionVariant::Light ? "light" : "full";
    cfg["model_id"] = config.model_id;
    cfg["temperature"] = config.temperature;
    cfg["template_version"] = kPromptTemplateVersion;
    root["config"] = std::move(cfg);

    json rows = json::array();
    for (const auto& ex : report.per_example) {
        json row;
        auto put = [&row](const char* name, const std::optional<double>& v) {
            if (v) row[name] = *v;
        };
        put("fluency", ex.fluency);
        put("em_recall", ex.em_recall);
        put("qampari_precision", ex.qampari_precision);
        put("qampari_recall", ex.qampari_recall);
        put("qampari_recall5", ex.qampari_recall5);
        put("claim_recall", ex.claim_recall);
        put("rouge_l", ex.rouge_l);
        row["citation_recall"] = ex.citation_recall;
        row["citation_precision"] = ex.citation_precision;
        row["n_statements"] = ex.n_statements;
        row["n_citations"] = ex.n_citations;
        rows.push_back(std::move(row));
    }
    root["per_example"] = std::move(rows);

    json agg;
    for (const auto& [name, summary] : report.aggregate) {
        agg[name] = {{"mean", summary.mean}, {"std", summary.std_dev}};
    }
    root["aggregate"] = std::move(agg);
    return root.dump(2);
}

}  // namespace alce
