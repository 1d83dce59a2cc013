#include "botdet/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdlib>
#include <optional>
#include <string_view>
#include <unordered_map>

#include <json.hpp>

namespace botdet {

namespace {

enum class TimestampMode { undecided, epoch, iso8601 };

// days since 1970-01-01 for a civil date (proleptic Gregorian)
int64_t days_from_civil(int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

bool parse_uint(std::string_view s, unsigned& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

// "YYYY-MM-DDTHH:MM:SS[.frac][Z|+00:00]", UTC; fraction truncated toward zero
bool parse_iso8601_utc(std::string_view s, int64_t& out) {
    if (s.size() < 19) return false;
    if (s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' ||
        s[16] != ':')
        return false;
    unsigned y, mo, d, h, mi, sec;
    if (!parse_uint(s.substr(0, 4), y) || !parse_uint(s.substr(5, 2), mo) ||
        !parse_uint(s.substr(8, 2), d) || !parse_uint(s.substr(11, 2), h) ||
        !parse_uint(s.substr(14, 2), mi) || !parse_uint(s.substr(17, 2), sec))
        return false;
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || sec > 60) return false;
    std::string_view rest = s.substr(19);
    if (!rest.empty() && rest[0] == '.') {
        size_t i = 1;
        while (i < rest.size() && rest[i] >= '0' && rest[i] <= '9') ++i;
        if (i == 1) return false;
        rest = rest.substr(i);
    }
    if (!(rest.empty() || rest == "Z" || rest == "+00:00")) return false;
    out = days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + sec;
    return true;
}

// integer epoch seconds; an optional .fraction is truncated toward zero
bool parse_epoch(std::string_view s, int64_t& out) {
    if (s.empty()) return false;
    size_t dot = s.find('.');
    std::string_view head = dot == std::string_view::npos ? s : s.substr(0, dot);
    if (dot != std::string_view::npos) {
        std::string_view frac = s.substr(dot + 1);
        if (frac.empty() ||
            !std::all_of(frac.begin(), frac.end(), [](char c) { return c >= '0' && c <= '9'; }))
            return false;
    }
    auto [p, ec] = std::from_chars(head.data(), head.data() + head.size(), out);
    return ec == std::errc() && p == head.data() + head.size();
}

struct RawRecord {
    std::string tx_id, timestamp, from_wallet, value;
    std::optional<std::string> to_wallet;
};

// Validates one raw record into a Transaction; returns a reason on failure.
std::optional<std::string> make_transaction(const RawRecord& raw, TimestampMode& ts_mode,
                                            Transaction& out) {
    if (raw.tx_id.empty()) return "empty tx_id";
    if (raw.from_wallet.empty()) return "empty from_wallet";

    int64_t ts;
    if (ts_mode == TimestampMode::undecided) {
        // the first parseable record fixes the timestamp format for the stream
        if (parse_epoch(raw.timestamp, ts)) {
            ts_mode = TimestampMode::epoch;
        } else if (parse_iso8601_utc(raw.timestamp, ts)) {
            ts_mode = TimestampMode::iso8601;
        } else {
            return "timestamp neither epoch seconds nor ISO-8601 UTC: " + raw.timestamp;
        }
    } else if (ts_mode == TimestampMode::epoch) {
        if (!parse_epoch(raw.timestamp, ts)) return "timestamp not epoch seconds: " + raw.timestamp;
    } else {
        if (!parse_iso8601_utc(raw.timestamp, ts))
            return "timestamp not ISO-8601 UTC: " + raw.timestamp;
    }
    if (ts <= 0) return "timestamp must be positive";

    Wei value;
    if (!wei_from_string(raw.value, value)) return "value not a non-negative integer: " + raw.value;

    out.tx_id = raw.tx_id;
    out.timestamp = ts;
    out.from_wallet = raw.from_wallet;
    out.to_wallet = raw.to_wallet.value_or("");
    out.value = value;
    return std::nullopt;
}

// RFC-4180 field splitter; handles quoted fields, doubled quotes and
// embedded newlines. Returns false at end of stream.
bool read_csv_record(std::istream& in, char delim, std::vector<std::string>& fields,
                     bool& bad_quoting) {
    fields.clear();
    bad_quoting = false;
    int c = in.get();
    if (c == EOF) return false;
    std::string field;
    bool in_quotes = false;
    bool started_quoted = false;
    while (true) {
        if (c == EOF) {
            fields.push_back(std::move(field));
            if (in_quotes) bad_quoting = true;
            return true;
        }
        char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                int next = in.peek();
                if (next == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"' && field.empty() && !started_quoted) {
            in_quotes = true;
            started_quoted = true;
        } else if (ch == delim) {
            fields.push_back(std::move(field));
            field.clear();
            started_quoted = false;
        } else if (ch == '\n') {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(ch);
        }
        c = in.get();
    }
}

std::vector<Transaction> parse_csv(std::istream& in, const ParseOptions& opts, ParseStats& stats) {
    std::vector<std::string> fields;
    bool bad_quoting = false;
    if (!read_csv_record(in, opts.csv_delimiter, fields, bad_quoting)) {
        return {};  // empty stream: no rows at all
    }
    // header row
    std::unordered_map<std::string, size_t> columns;
    for (size_t i = 0; i < fields.size(); ++i) columns.emplace(fields[i], i);
    const Schema& sc = opts.schema;
    auto col = [&](const std::string& name, bool required) -> std::optional<size_t> {
        auto it = columns.find(name);
        if (it == columns.end()) {
            if (required) throw ParseError(1, "missing column '" + name + "' in header");
            return std::nullopt;
        }
        return it->second;
    };
    size_t c_id = *col(sc.tx_id, true);
    size_t c_ts = *col(sc.timestamp, true);
    size_t c_from = *col(sc.from_wallet, true);
    std::optional<size_t> c_to = col(sc.to_wallet, !sc.to_wallet_nullable);
    size_t c_val = *col(sc.value, true);

    std::vector<Transaction> out;
    TimestampMode ts_mode = TimestampMode::undecided;
    uint64_t row = 1;
    while (read_csv_record(in, opts.csv_delimiter, fields, bad_quoting)) {
        ++row;
        ++stats.rows_read;
        std::string reason;
        if (bad_quoting) {
            reason = "unterminated quoted field";
        } else if (fields.size() != columns.size()) {
            reason = "expected " + std::to_string(columns.size()) + " fields, got " +
                     std::to_string(fields.size());
        } else {
            RawRecord raw;
            raw.tx_id = fields[c_id];
            raw.timestamp = fields[c_ts];
            raw.from_wallet = fields[c_from];
            raw.value = fields[c_val];
            if (c_to && !fields[*c_to].empty()) raw.to_wallet = fields[*c_to];
            if (!c_to || fields[*c_to].empty()) {
                if (!sc.to_wallet_nullable) reason = "missing to_wallet";
            }
            if (reason.empty()) {
                Transaction tx;
                if (auto err = make_transaction(raw, ts_mode, tx)) {
                    reason = *err;
                } else {
                    out.push_back(std::move(tx));
                    continue;
                }
            }
        }
        if (opts.strict) throw ParseError(row, reason);
        ++stats.rows_skipped;
    }
    return out;
}

std::vector<Transaction> parse_jsonl(std::istream& in, const ParseOptions& opts,
                                     ParseStats& stats) {
    const Schema& sc = opts.schema;
    std::vector<Transaction> out;
    TimestampMode ts_mode = TimestampMode::undecided;
    std::string line;
    uint64_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;  // blank line
        ++stats.rows_read;
        std::string reason;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            reason = "not a JSON object";
        } else {
            // scalar -> string; integers must be exact
            auto field = [&](const std::string& key) -> std::optional<std::string> {
                auto it = j.find(key);
                if (it == j.end() || it->is_null()) return std::nullopt;
                if (it->is_string()) return it->get<std::string>();
                if (it->is_number_unsigned())
                    return std::to_string(it->get<uint64_t>());
                if (it->is_number_integer()) return std::to_string(it->get<int64_t>());
                return std::nullopt;
            };
            RawRecord raw;
            auto id = field(sc.tx_id), ts = field(sc.timestamp), from = field(sc.from_wallet),
                 val = field(sc.value);
            auto to = field(sc.to_wallet);
            if (!id || !ts || !from || !val) {
                reason = "missing or non-scalar required key";
            } else if (!to && !sc.to_wallet_nullable) {
                reason = "missing to_wallet";
            } else {
                raw.tx_id = *id;
                raw.timestamp = *ts;
                raw.from_wallet = *from;
                raw.value = *val;
                if (to && !to->empty()) raw.to_wallet = *to;
                Transaction tx;
                if (auto err = make_transaction(raw, ts_mode, tx)) {
                    reason = *err;
                } else {
                    out.push_back(std::move(tx));
                    continue;
                }
            }
        }
        if (opts.strict) throw ParseError(row, reason);
        ++stats.rows_skipped;
    }
    return out;
}

}  // namespace

InputFormat input_format_from_string(const std::string& s) {
    if (s == "csv") return InputFormat::csv;
    if (s == "jsonl") return InputFormat::jsonl;
    throw std::invalid_argument("unknown input format: " + s);
}

std::vector<Transaction> parse_transactions(std::istream& in, const ParseOptions& opts,
                                            ParseStats& stats) {
    switch (opts.format) {
        case InputFormat::csv:
            return parse_csv(in, opts, stats);
        case InputFormat::jsonl:
            return parse_jsonl(in, opts, stats);
    }
    throw std::invalid_argument("unknown input format");
}

}  // namespace botdet
