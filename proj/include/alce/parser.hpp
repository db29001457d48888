#pragma once

#include <string>
#include <utility>
#include <vector>

#include "alce/core.hpp"

namespace alce {

struct DroppedCitation {
    std::string example_id;
    int statement_index = 0;
    int dropped_index = 0;
    std::string reason;  // "out_of_range" | "duplicate" | "over_cap"
};

/// Collects citation indices dropped during parsing, one record per drop.
class ParseLog {
public:
    void record(DroppedCitation entry) { entries_.push_back(std::move(entry)); }
    const std::vector<DroppedCitation>& entries() const { return entries_; }
    /// JSON-lines rendering, one object per dropped citation.
    std::string to_jsonl() const;

private:
    std::vector<DroppedCitation> entries_;
};

/// Keeps everything before the first newline, trimmed.
std::string truncate_output(const std::string& raw);

/// Removes "[k]" markers from `sentence` and returns the cleaned text plus
/// the in-order, deduplicated, valid (1..max_index) indices capped at 3.
std::pair<std::string, std::vector<int>> extract_citations(
    const std::string& sentence, int max_index, ParseLog* log = nullptr,
    const std::string& example_id = "", int statement_index = 0);

/// Splits an already-truncated output into citation-bearing statements.
/// ASQA/ELI5 split on sentence boundaries; QAMPARI splits on commas.
ParsedResponse segment_statements(const std::string& truncated, DatasetKind kind,
                                  int max_index, ParseLog* log = nullptr,
                                  const std::string& example_id = "");

/// Convenience: truncate then segment.
ParsedResponse parse_response(const std::string& raw, DatasetKind kind, int max_index,
                              ParseLog* log = nullptr, const std::string& example_id = "");

}  // namespace alce
