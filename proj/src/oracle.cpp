#include "alce/oracle.hpp"

#include <chrono>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace alce {

using json = nlohmann::json;

std::string render_premise(const std::vector<Passage>& passages) {
    if (passages.empty()) {
        throw std::invalid_argument("render_premise: passage list must be non-empty");
    }
    std::string out;
    for (size_t i = 0; i < passages.size(); ++i) {
        if (i > 0) out.push_back('\n');
        out += "Title: " + passages[i].title + "\n" + passages[i].text;
    }
    return out;
}

std::string build_nli_input(const std::string& premise, const std::string& hypothesis) {
    return "premise: " + premise + " hypothesis: " + hypothesis;
}

int SubstringOracle::entails(const std::string& premise, const std::string& hypothesis) {
    std::string p = normalize_text(premise);
    std::string h = normalize_text(hypothesis);
    if (h.empty()) return 0;
    return p.find(h) != std::string::npos ? 1 : 0;
}

TableOracle TableOracle::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open oracle table file: " + path);
    json arr = json::parse(in);
    std::map<std::pair<std::string, std::string>, int> table;
    for (const auto& rec : arr) {
        table[{rec.at("premise").get<std::string>(),
               rec.at("hypothesis").get<std::string>()}] = rec.at("label").get<int>();
    }
    return TableOracle(std::move(table));
}

void TableOracle::set(const std::string& premise, const std::string& hypothesis,
                      int label) {
    table_[{premise, hypothesis}] = label;
}

int TableOracle::entails(const std::string& premise, const std::string& hypothesis) {
    auto it = table_.find({premise, hypothesis});
    if (it == table_.end()) {
        throw ConfigError("oracle table miss for hypothesis: " + hypothesis);
    }
    return it->second;
}

RemoteNliOracle::RemoteNliOracle(std::string endpoint, int max_attempts)
    : endpoint_(std::move(endpoint)), max_attempts_(max_attempts) {}

int RemoteNliOracle::entails(const std::string& premise, const std::string& hypothesis) {
    json body;
    body["inputs"] = json::array({build_nli_input(premise, hypothesis)});
    std::string payload = body.dump();

    size_t scheme_end = endpoint_.find("://");
    std::string rest = scheme_end == std::string::npos
                           ? endpoint_
                           : endpoint_.substr(scheme_end + 3);
    size_t slash = rest.find('/');
    std::string host = rest.substr(0, slash == std::string::npos ? rest.size() : slash);
    std::string path = slash == std::string::npos ? "/" : rest.substr(slash);

    int backoff_ms = 250;
    for (int attempt = 1; attempt <= max_attempts_; ++attempt) {
        httplib::Client client(host);
        auto res = client.Post(path, payload, "application/json");
        if (res && res->status == 200) {
            json reply = json::parse(res->body);
            return reply.at("labels").at(0).get<int>() != 0 ? 1 : 0;
        }
        if (attempt < max_attempts_) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
            backoff_ms *= 2;
        }
    }
    throw BackendError("NLI backend unreachable after " +
                       std::to_string(max_attempts_) + " attempts: " + endpoint_);
}

int CachingOracle::entails(const std::string& premise, const std::string& hypothesis) {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find({premise, hypothesis});
        if (it != cache_.end()) return it->second;
    }
    int label = inner_->entails(premise, hypothesis);
    std::lock_guard<std::mutex> lock(mutex_);
    cache_.emplace(std::make_pair(premise, hypothesis), label);
    return label;
}

}  // namespace alce
