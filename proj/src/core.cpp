#include "alce/core.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace alce {

using json = nlohmann::ordered_json;

std::string to_string(DatasetKind kind) {
    switch (kind) {
        case DatasetKind::Asqa: return "asqa";
        case DatasetKind::Qampari: return "qampari";
        case DatasetKind::Eli5: return "eli5";
    }
    return "asqa";
}

DatasetKind dataset_kind_from_string(const std::string& s) {
    if (s == "asqa") return DatasetKind::Asqa;
    if (s == "qampari") return DatasetKind::Qampari;
    if (s == "eli5") return DatasetKind::Eli5;
    throw ConfigError("unknown dataset kind: " + s);
}

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::Vanilla: return "vanilla";
        case Strategy::Summ: return "summ";
        case Strategy::Snippet: return "snippet";
        case Strategy::Interact: return "interact";
        case Strategy::InlineSearch: return "inlinesearch";
        case Strategy::ClosedBook: return "closedbook";
    }
    return "vanilla";
}

Strategy strategy_from_string(const std::string& s) {
    if (s == "vanilla") return Strategy::Vanilla;
    if (s == "summ") return Strategy::Summ;
    if (s == "snippet") return Strategy::Snippet;
    if (s == "interact") return Strategy::Interact;
    if (s == "inlinesearch") return Strategy::InlineSearch;
    if (s == "closedbook") return Strategy::ClosedBook;
    throw ConfigError("unknown strategy: " + s);
}

Statement::Statement(std::string text_in, std::vector<int> citations_in)
    : text(std::move(text_in)) {
    // Keep the first three distinct indices in order of appearance.
    for (int c : citations_in) {
        if (std::find(citations.begin(), citations.end(), c) != citations.end()) continue;
        citations.push_back(c);
        if (citations.size() == 3) break;
    }
}

std::string normalize_text(const std::string& s) {
    std::string kept;
    kept.reserve(s.size());
    for (unsigned char ch : s) {
        if (std::isalnum(ch)) {
            kept.push_back(static_cast<char>(std::tolower(ch)));
        } else if (std::isspace(ch)) {
            kept.push_back(' ');
        }
        // other punctuation is deleted outright
    }
    std::istringstream words(kept);
    std::string word;
    std::string out;
    while (words >> word) {
        if (word == "a" || word == "an" || word == "the") continue;
        if (!out.empty()) out.push_back(' ');
        out += word;
    }
    return out;
}

namespace {

std::string require_string(const json& rec, const char* key, size_t index) {
    if (!rec.contains(key) || !rec[key].is_string() || rec[key].get<std::string>().empty()) {
        throw DataError("record " + std::to_string(index) + ": missing or empty \"" +
                        key + "\"");
    }
    return rec[key].get<std::string>();
}

std::vector<std::string> string_list(const json& arr) {
    std::vector<std::string> out;
    for (const auto& v : arr) out.push_back(v.get<std::string>());
    return out;
}

QueryInstance parse_record(const json& rec, DatasetKind kind, size_t index) {
    QueryInstance inst;
    inst.id = require_string(rec, "id", index);
    inst.question = require_string(rec, "question", index);
    inst.dataset_kind = kind;

    if (rec.contains("docs")) {
        for (const auto& d : rec["docs"]) {
            Passage p;
            p.id = d.at("id").get<std::string>();
            p.title = d.at("title").get<std::string>();
            p.text = d.at("text").get<std::string>();
            if (d.contains("score") && !d["score"].is_null()) {
                p.score = d["score"].get<double>();
            }
            if (p.title.empty() || p.text.empty()) {
                throw DataError("record " + std::to_string(index) +
                                ": passage with empty title or text");
            }
            inst.retrieved.push_back(std::move(p));
        }
    }

    switch (kind) {
        case DatasetKind::Asqa: {
            if (!rec.contains("qa_pairs")) {
                throw DataError("record " + std::to_string(index) + ": missing \"qa_pairs\"");
            }
            AsqaGold gold;
            for (const auto& qp : rec["qa_pairs"]) {
                auto aliases = string_list(qp.at("short_answers"));
                if (aliases.empty()) {
                    throw DataError("record " + std::to_string(index) +
                                    ": empty short_answers alias set");
                }
                gold.qa_pairs.push_back(std::move(aliases));
            }
            if (rec.contains("answers")) gold.gold_answers = string_list(rec["answers"]);
            inst.gold = std::move(gold);
            break;
        }
        case DatasetKind::Qampari: {
            if (!rec.contains("answers")) {
                throw DataError("record " + std::to_string(index) + ": missing \"answers\"");
            }
            QampariGold gold;
            for (const auto& set : rec["answers"]) {
                auto aliases = string_list(set);
                if (aliases.empty()) {
                    throw DataError("record " + std::to_string(index) +
                                    ": empty answer alias set");
                }
                gold.answer_sets.push_back(std::move(aliases));
            }
            inst.gold = std::move(gold);
            break;
        }
        case DatasetKind::Eli5: {
            if (!rec.contains("claims")) {
                throw DataError("record " + std::to_string(index) + ": missing \"claims\"");
            }
            Eli5Gold gold;
            gold.claims = string_list(rec["claims"]);
            if (gold.claims.size() != 3) {
                throw DataError("record " + std::to_string(index) +
                                ": claims must have length 3");
            }
            if (rec.contains("answers")) gold.gold_answers = string_list(rec["answers"]);
            inst.gold = std::move(gold);
            break;
        }
    }
    return inst;
}

json instance_to_json(const QueryInstance& inst) {
    json rec;
    rec["id"] = inst.id;
    rec["question"] = inst.question;
    json docs = json::array();
    for (const auto& p : inst.retrieved) {
        json d;
        d["id"] = p.id;
        d["title"] = p.title;
        d["text"] = p.text;
        if (p.score) d["score"] = *p.score;
        docs.push_back(std::move(d));
    }
    rec["docs"] = std::move(docs);
    if (const auto* g = std::get_if<AsqaGold>(&inst.gold)) {
        json pairs = json::array();
        for (const auto& aliases : g->qa_pairs) {
            pairs.push_back({{"short_answers", aliases}});
        }
        rec["qa_pairs"] = std::move(pairs);
        rec["answers"] = g->gold_answers;
    } else if (const auto* g = std::get_if<QampariGold>(&inst.gold)) {
        rec["answers"] = g->answer_sets;
    } else if (const auto* g = std::get_if<Eli5Gold>(&inst.gold)) {
        rec["claims"] = g->claims;
        rec["answers"] = g->gold_answers;
    }
    return rec;
}

}  // namespace

std::vector<QueryInstance> parse_instances(const std::string& text, DatasetKind kind) {
    std::vector<json> records;
    std::string trimmed = text;
    size_t first = trimmed.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    if (trimmed[first] == '[') {
        json arr = json::parse(trimmed);
        for (auto& r : arr) records.push_back(std::move(r));
    } else {
        // JSON-lines
        std::istringstream lines(trimmed);
        std::string line;
        while (std::getline(lines, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            records.push_back(json::parse(line));
        }
    }
    std::vector<QueryInstance> out;
    out.reserve(records.size());
    for (size_t i = 0; i < records.size(); ++i) {
        out.push_back(parse_record(records[i], kind, i));
    }
    return out;
}

std::vector<QueryInstance> load_dataset(const std::string& path, DatasetKind kind) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_instances(buf.str(), kind);
}

std::string serialize_instances(const std::vector<QueryInstance>& instances) {
    json arr = json::array();
    for (const auto& inst : instances) arr.push_back(instance_to_json(inst));
    return arr.dump(2);
}

void save_dataset(const std::vector<QueryInstance>& instances, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write dataset file: " + path);
    out << serialize_instances(instances) << "\n";
}

}  // namespace alce
