#pragma once

#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "botdet/types.hpp"

namespace botdet {

enum class InputFormat { csv, jsonl };

InputFormat input_format_from_string(const std::string& s);

/// Maps the five canonical fields to source column/key names.
struct Schema {
    std::string tx_id = "tx_id";
    std::string timestamp = "timestamp";
    std::string from_wallet = "from_wallet";
    std::string to_wallet = "to_wallet";
    std::string value = "value";
    bool to_wallet_nullable = true;
};

struct ParseOptions {
    InputFormat format = InputFormat::csv;
    Schema schema;
    bool strict = false;
    char csv_delimiter = ',';
};

/// Thrown in strict mode at the first malformed record, and always for
/// stream-level defects (missing header column, unreadable stream).
class ParseError : public std::runtime_error {
public:
    ParseError(uint64_t row, const std::string& reason)
        : std::runtime_error("row " + std::to_string(row) + ": " + reason), row_(row) {}
    uint64_t row() const { return row_; }

private:
    uint64_t row_ = 0;
};

/// Parse a CSV or JSONL transaction export. Well-formed records become
/// Transactions; in non-strict mode malformed records are counted into
/// stats.rows_skipped. Timestamps may be integer epoch seconds or ISO-8601
/// UTC strings; the first record decides which, and mixing is malformed.
std::vector<Transaction> parse_transactions(std::istream& in, const ParseOptions& opts,
                                            ParseStats& stats);

}  // namespace botdet
