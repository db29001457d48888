#include "alce/parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>

#include <nlohmann/json.hpp>

namespace alce {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Matches "[123]" starting at pos; returns length of the token or 0.
size_t bracket_token_length(const std::string& s, size_t pos) {
    if (pos >= s.size() || s[pos] != '[') return 0;
    size_t i = pos + 1;
    size_t digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        ++i;
        ++digits;
    }
    if (digits == 0 || i >= s.size() || s[i] != ']') return 0;
    return i - pos + 1;
}

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

const std::array<const char*, 17> kAbbreviations = {
    "mr", "mrs", "ms", "dr", "prof", "st", "sr", "jr", "vs",
    "etc", "eg", "ie", "no", "fig", "al", "inc", "ltd"};

// Is the '.' at `pos` part of an abbreviation or initial rather than a
// sentence end?
bool period_is_abbreviation(const std::string& s, size_t pos) {
    // Collect the word immediately before the period.
    size_t b = pos;
    while (b > 0 && std::isalpha(static_cast<unsigned char>(s[b - 1]))) --b;
    std::string word = s.substr(b, pos - b);
    if (word.empty()) return false;
    if (word.size() == 1) return true;  // initials: "U.S.", "e.g."
    std::string lower;
    for (char c : word) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return std::find(kAbbreviations.begin(), kAbbreviations.end(), lower) !=
           kAbbreviations.end();
}

// Rule-based sentence splitter. Terminators . ! ? close a sentence when
// followed by whitespace, end of text, or a citation marker; citation
// markers directly after the terminator stay with the closing sentence.
std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> out;
    size_t start = 0;
    size_t i = 0;
    const size_t n = text.size();
    while (i < n) {
        char c = text[i];
        if (!is_terminator(c)) {
            ++i;
            continue;
        }
        if (c == '.') {
            bool decimal = i > 0 && i + 1 < n &&
                           std::isdigit(static_cast<unsigned char>(text[i - 1])) &&
                           std::isdigit(static_cast<unsigned char>(text[i + 1]));
            if (decimal || period_is_abbreviation(text, i)) {
                ++i;
                continue;
            }
        }
        size_t end = i + 1;
        while (end < n && is_terminator(text[end])) ++end;  // "?!", "..."
        if (end < n && !std::isspace(static_cast<unsigned char>(text[end])) &&
            text[end] != '[') {
            i = end;
            continue;
        }
        // Attach post-terminator citation markers to this sentence.
        size_t probe = end;
        while (true) {
            size_t ws = probe;
            while (ws < n && std::isspace(static_cast<unsigned char>(text[ws]))) ++ws;
            size_t len = bracket_token_length(text, ws);
            if (len == 0) break;
            probe = ws + len;
            end = probe;
        }
        std::string sentence = trim(text.substr(start, end - start));
        if (!sentence.empty()) out.push_back(std::move(sentence));
        i = end;
        while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        start = i;
    }
    std::string tail = trim(text.substr(start));
    if (!tail.empty()) out.push_back(std::move(tail));
    return out;
}

// Collapse whitespace runs and drop spaces that precede closing punctuation,
// so removing "[1]" from "x [1]." yields "x." not "x .".
std::string tidy(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!out.empty() && out.back() != ' ') out.push_back(' ');
            continue;
        }
        if (!out.empty() && out.back() == ' ' &&
            (c == '.' || c == ',' || c == '!' || c == '?' || c == ';' || c == ':')) {
            out.back() = c;
            continue;
        }
        out.push_back(c);
    }
    return trim(out);
}

}  // namespace

std::string ParseLog::to_jsonl() const {
    std::ostringstream out;
    for (const auto& e : entries_) {
        nlohmann::ordered_json rec;
        rec["example_id"] = e.example_id;
        rec["statement_index"] = e.statement_index;
        rec["dropped_index"] = e.dropped_index;
        rec["reason"] = e.reason;
        out << rec.dump() << "\n";
    }
    return out.str();
}

std::string truncate_output(const std::string& raw) {
    size_t nl = raw.find('\n');
    return trim(nl == std::string::npos ? raw : raw.substr(0, nl));
}

std::pair<std::string, std::vector<int>> extract_citations(
    const std::string& sentence, int max_index, ParseLog* log,
    const std::string& example_id, int statement_index) {
    std::string clean;
    clean.reserve(sentence.size());
    std::vector<int> cites;
    auto drop = [&](int k, const char* reason) {
        if (log) log->record({example_id, statement_index, k, reason});
    };
    size_t i = 0;
    while (i < sentence.size()) {
        size_t len = bracket_token_length(sentence, i);
        if (len == 0) {
            clean.push_back(sentence[i]);
            ++i;
            continue;
        }
        int k = std::stoi(sentence.substr(i + 1, len - 2));
        i += len;
        if (k < 1 || k > max_index) {
            drop(k, "out_of_range");
        } else if (std::find(cites.begin(), cites.end(), k) != cites.end()) {
            drop(k, "duplicate");
        } else if (cites.size() >= 3) {
            drop(k, "over_cap");
        } else {
            cites.push_back(k);
        }
    }
    return {tidy(clean), std::move(cites)};
}

ParsedResponse segment_statements(const std::string& truncated, DatasetKind kind,
                                  int max_index, ParseLog* log,
                                  const std::string& example_id) {
    ParsedResponse parsed;
    parsed.raw_text = truncated;
    std::vector<std::string> pieces;
    if (kind == DatasetKind::Qampari) {
        std::string body = trim(truncated);
        if (!body.empty() && body.back() == '.') body.pop_back();
        std::istringstream items(body);
        std::string item;
        while (std::getline(items, item, ',')) {
            item = trim(item);
            if (!item.empty()) pieces.push_back(item);
        }
    } else {
        pieces = split_sentences(truncated);
    }
    int idx = 0;
    for (const auto& piece : pieces) {
        auto [clean, cites] = extract_citations(piece, max_index, log, example_id, idx);
        if (clean.empty() && cites.empty()) continue;
        Statement st;
        st.text = clean;
        st.citations = std::move(cites);
        parsed.statements.push_back(std::move(st));
        ++idx;
    }
    return parsed;
}

ParsedResponse parse_response(const std::string& raw, DatasetKind kind, int max_index,
                              ParseLog* log, const std::string& example_id) {
    return segment_statements(truncate_output(raw), kind, max_index, log, example_id);
}

}  // namespace alce
