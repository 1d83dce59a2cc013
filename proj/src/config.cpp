#include "botdet/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "botdet/rng.hpp"

namespace botdet {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

uint64_t to_u64(const std::string& key, const std::string& v) {
    uint64_t out{};
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
        throw std::invalid_argument("config: " + key + " expects an unsigned integer, got '" +
                                    v + "'");
    }
    return out;
}

int64_t to_i64(const std::string& key, const std::string& v) {
    int64_t out{};
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
        throw std::invalid_argument("config: " + key + " expects an integer, got '" + v + "'");
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double out = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return out;
    } catch (...) {
        throw std::invalid_argument("config: " + key + " expects a number, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config: " + key + " expects true/false, got '" + v + "'");
}

}  // namespace

void RunConfig::validate() const {
    if (format != "csv" && format != "jsonl") {
        throw std::invalid_argument("config: format must be csv or jsonl");
    }
    if (mode != "sent" && mode != "received" && mode != "both") {
        throw std::invalid_argument("config: mode must be sent, received or both");
    }
    if (csv_delimiter.size() != 1) {
        throw std::invalid_argument("config: csv_delimiter must be a single character");
    }
    if (fit_xmin_min < 1 || fit_xmin_max < fit_xmin_min) {
        throw std::invalid_argument("config: fit x_min range must satisfy 1 <= lo <= hi");
    }
    if (detect_sigma <= 0) throw std::invalid_argument("config: detect.sigma must be positive");
    if (window_length == 0) throw std::invalid_argument("config: window.length must be positive");
    if (window_samples == 0)
        throw std::invalid_argument("config: window.samples must be positive");
    if (!(window_rho > 0.0 && window_rho <= 1.0)) {
        throw std::invalid_argument("config: window.rho must be in (0, 1]");
    }
    if (!(report_min_share >= 0.0 && report_min_share <= 1.0)) {
        throw std::invalid_argument("config: report.min_share must be in [0, 1]");
    }
    if (report_min_records == 0) {
        throw std::invalid_argument("config: report.min_records must be >= 1");
    }
}

std::string RunConfig::canonical_string() const {
    std::ostringstream os;
    os << "detect.min_count=" << detect_min_count << "\n"
       << "detect.sigma=" << detect_sigma << "\n"
       << "fit.min_tail=" << fit_min_tail << "\n"
       << "fit.xmin_max=" << fit_xmin_max << "\n"
       << "fit.xmin_min=" << fit_xmin_min << "\n"
       << "format=" << format << "\n"
       << "input=" << input << "\n"
       << "csv_delimiter=" << csv_delimiter << "\n"
       << "mode=" << mode << "\n"
       << "report.min_records=" << report_min_records << "\n"
       << "report.min_share=" << report_min_share << "\n"
       << "schema.from_wallet=" << schema.from_wallet << "\n"
       << "schema.timestamp=" << schema.timestamp << "\n"
       << "schema.to_nullable=" << (schema.to_wallet_nullable ? "true" : "false") << "\n"
       << "schema.to_wallet=" << schema.to_wallet << "\n"
       << "schema.tx_id=" << schema.tx_id << "\n"
       << "schema.value=" << schema.value << "\n"
       << "strict=" << (strict ? "true" : "false") << "\n"
       << "window.length=" << window_length << "\n"
       << "window.refit=" << (window_refit ? "true" : "false") << "\n"
       << "window.rho=" << window_rho << "\n"
       << "window.samples=" << window_samples << "\n"
       << "window.seed=" << window_seed << "\n";
    return os.str();
}

std::string RunConfig::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical_string())));
    return buf;
}

KeyValues parse_key_values(const std::string& text) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value");
        }
        kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return kv;
}

KeyValues load_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_key_values(buf.str());
}

void apply_run_config(const KeyValues& kv, RunConfig& cfg) {
    for (const auto& [key, value] : kv) {
        if (key == "input") cfg.input = value;
        else if (key == "format") cfg.format = value;
        else if (key == "strict") cfg.strict = to_bool(key, value);
        else if (key == "csv_delimiter") cfg.csv_delimiter = value;
        else if (key == "mode") cfg.mode = value;
        else if (key == "schema.tx_id") cfg.schema.tx_id = value;
        else if (key == "schema.timestamp") cfg.schema.timestamp = value;
        else if (key == "schema.from_wallet") cfg.schema.from_wallet = value;
        else if (key == "schema.to_wallet") cfg.schema.to_wallet = value;
        else if (key == "schema.value") cfg.schema.value = value;
        else if (key == "schema.to_nullable") cfg.schema.to_wallet_nullable = to_bool(key, value);
        else if (key == "fit.xmin_min") cfg.fit_xmin_min = static_cast<uint32_t>(to_u64(key, value));
        else if (key == "fit.xmin_max") cfg.fit_xmin_max = static_cast<uint32_t>(to_u64(key, value));
        else if (key == "fit.min_tail") cfg.fit_min_tail = to_u64(key, value);
        else if (key == "detect.sigma") cfg.detect_sigma = to_double(key, value);
        else if (key == "detect.min_count") cfg.detect_min_count = to_u64(key, value);
        else if (key == "window.length") cfg.window_length = static_cast<uint32_t>(to_u64(key, value));
        else if (key == "window.samples") cfg.window_samples = static_cast<uint32_t>(to_u64(key, value));
        else if (key == "window.seed") cfg.window_seed = to_u64(key, value);
        else if (key == "window.rho") cfg.window_rho = to_double(key, value);
        else if (key == "window.refit") cfg.window_refit = to_bool(key, value);
        else if (key == "report.min_records") cfg.report_min_records = to_u64(key, value);
        else if (key == "report.min_share") cfg.report_min_share = to_double(key, value);
        else if (key == "out") cfg.out = value;
        else if (key.rfind("synth.", 0) == 0) {
            // synth keys may share a file with run keys; ignored here
        } else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
}

void SynthFileConfig::finalize() {
    synth.span = Interval{start_epoch, start_epoch + int64_t(days) * 86400};
}

std::string SynthFileConfig::canonical_string() const {
    std::ostringstream os;
    os << "synth.burst.common_destination=" << synth.burst_bots.common_destination << "\n"
       << "synth.burst.common_value=" << synth.burst_bots.common_value << "\n"
       << "synth.burst.background_events=" << synth.burst_bots.background_events << "\n"
       << "synth.burst.day=" << synth.burst_bots.burst_day << "\n"
       << "synth.burst.gap=" << synth.burst_bots.common_gap_minutes << "\n"
       << "synth.burst.wallets=" << synth.burst_bots.wallet_count << "\n"
       << "synth.days=" << days << "\n"
       << "synth.humans.alpha=" << synth.humans.alpha << "\n"
       << "synth.humans.count=" << synth.humans.count << "\n"
       << "synth.humans.events=" << synth.humans.mean_events << "\n"
       << "synth.humans.xmin=" << synth.humans.x_min << "\n"
       << "synth.pools.cadence_max=" << synth.periodic_bots.cadence_days_max << "\n"
       << "synth.pools.count=" << synth.periodic_bots.count << "\n"
       << "synth.pools.destinations=" << synth.periodic_bots.payout_destinations << "\n"
       << "synth.pools.jitter=" << synth.periodic_bots.jitter_minutes << "\n"
       << "synth.pools.label_destinations_as_bots="
       << synth.periodic_bots.label_destinations_as_bots << "\n"
       << "synth.pools.period=" << synth.periodic_bots.period_minutes << "\n"
       << "synth.seed=" << synth.seed << "\n"
       << "synth.start=" << start_epoch << "\n";
    return os.str();
}

void apply_synth_config(const KeyValues& kv, SynthFileConfig& cfg) {
    for (const auto& [key, value] : kv) {
        if (key == "synth.seed") cfg.synth.seed = to_u64(key, value);
        else if (key == "synth.start") cfg.start_epoch = to_i64(key, value);
        else if (key == "synth.days") cfg.days = static_cast<uint32_t>(to_u64(key, value));
        else if (key == "synth.humans.count") cfg.synth.humans.count = static_cast<uint32_t>(to_u64(key, value));
        else if (key == "synth.humans.alpha") cfg.synth.humans.alpha = to_double(key, value);
        else if (key == "synth.humans.xmin") cfg.synth.humans.x_min = static_cast<uint32_t>(to_u64(key, value));
        else if (key == "synth.humans.events") cfg.synth.humans.mean_events = static_cast<uint32_t>(to_u64(key, value));
        else if (key == "synth.pools.count") cfg.synth.periodic_bots.count = static_cast<uint32_t>(to_u64(key, value));
        else if (key == "synth.pools.period") cfg.synth.periodic_bots.period_minutes = static_cast<uint32_t>(to_u64(key, value));
        else if (key == "synth.pools.jitter") cfg.synth.periodic_bots.jitter_minutes = static_cast<uint32_t>(to_u64(key, value));
        else if (key == "synth.pools.destinations") cfg.synth.periodic_bots.payout_destinations = static_cast<uint32_t>(to_u64(key, value));
        else if (key == "synth.pools.cadence_max") cfg.synth.periodic_bots.cadence_days_max = static_cast<uint32_t>(to_u64(key, value));
        else if (key == "synth.pools.label_destinations_as_bots") cfg.synth.periodic_bots.label_destinations_as_bots = to_bool(key, value);
        else if (key == "synth.burst.wallets") cfg.synth.burst_bots.wallet_count = static_cast<uint32_t>(to_u64(key, value));
        else if (key == "synth.burst.day") cfg.synth.burst_bots.burst_day = static_cast<uint32_t>(to_u64(key, value));
        else if (key == "synth.burst.gap") cfg.synth.burst_bots.common_gap_minutes = static_cast<uint32_t>(to_u64(key, value));
        else if (key == "synth.burst.common_destination") cfg.synth.burst_bots.common_destination = to_bool(key, value);
        else if (key == "synth.burst.common_value") cfg.synth.burst_bots.common_value = to_bool(key, value);
        else if (key == "synth.burst.background_events") cfg.synth.burst_bots.background_events = to_bool(key, value);
        else if (key == "out") { /* shared with run keys */ }
        else if (key.find("synth.") != 0) { /* run keys may share the file */ }
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    cfg.finalize();
}

}  // namespace botdet
