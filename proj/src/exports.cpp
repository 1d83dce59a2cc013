#include "botdet/exports.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace botdet {

namespace {

using nlohmann::json;

std::string csv_escape(const std::string& field, char delim = ',') {
    if (field.find_first_of(std::string{delim} + "\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

json interval_json(const Interval& iv) { return json::array({iv.start, iv.end}); }

json classification_json(const SpikeClassification& sc) {
    json j;
    j["delta_minutes"] = sc.spike.delta_minutes;
    j["observed"] = sc.spike.observed;
    j["expected"] = sc.spike.expected;
    j["score"] = sc.spike.score;
    j["p_value"] = sc.spike.p_value;
    j["kind"] = to_string(sc.kind);
    j["recurrence_rate"] = sc.recurrence_rate;
    json windows = json::array();
    for (const auto& w : sc.occurrence_windows) windows.push_back(interval_json(w));
    j["occurrence_windows"] = windows;
    if (!sc.reason.empty()) j["reason"] = sc.reason;
    return j;
}

json fit_to_json(const PowerLawFit& fit) {
    json j;
    j["alpha"] = fit.alpha;
    j["x_min"] = fit.x_min;
    j["n_tail"] = fit.n_tail;
    j["ks"] = fit.ks;
    j["log_likelihood"] = fit.log_likelihood;
    j["zeta"] = fit.zeta;
    return j;
}

}  // namespace

std::string histogram_csv(const DeltaHistogram& histogram, const std::string& config_hash) {
    std::ostringstream os;
    os << "# config=" << config_hash << "\n";
    os << "delta_minutes,count\n";
    for (const auto& [bin, count] : histogram.bins) {
        os << bin << ',' << count << '\n';
    }
    return os.str();
}

std::string degree_csv(const std::map<uint32_t, uint64_t>& dist, const std::string& config_hash) {
    std::ostringstream os;
    os << "# config=" << config_hash << "\n";
    os << "degree,wallet_count\n";
    for (const auto& [degree, count] : dist) {
        os << degree << ',' << count << '\n';
    }
    return os.str();
}

std::string fit_json(const PowerLawFit& fit, const std::string& config_hash) {
    json j = fit_to_json(fit);
    j["config_hash"] = config_hash;
    return j.dump(2) + "\n";
}

std::string spikes_json(const std::vector<Spike>& spikes, const std::string& config_hash) {
    json arr = json::array();
    for (const auto& s : spikes) {
        json j;
        j["delta_minutes"] = s.delta_minutes;
        j["observed"] = s.observed;
        j["expected"] = s.expected;
        j["score"] = s.score;
        j["p_value"] = s.p_value;
        arr.push_back(j);
    }
    json root;
    root["config_hash"] = config_hash;
    root["spikes"] = arr;
    return root.dump(2) + "\n";
}

std::string anomalies_json(const std::vector<SpikeClassification>& classifications,
                           const std::string& config_hash) {
    json arr = json::array();
    for (const auto& sc : classifications) arr.push_back(classification_json(sc));
    json root;
    root["config_hash"] = config_hash;
    root["anomalies"] = arr;
    return root.dump(2) + "\n";
}

std::string report_json(const BotReport& report,
                        const std::vector<SpikeClassification>& classifications,
                        const std::vector<SpikeCluster>& clusters, const PowerLawFit& fit,
                        const Dataset& ds, const RunConfig& cfg) {
    json root;
    json config;
    config["hash"] = cfg.hash();
    json values;
    for (const auto& [k, v] : parse_key_values(cfg.canonical_string())) values[k] = v;
    config["values"] = values;
    root["config"] = config;
    root["fit"] = fit_to_json(fit);

    json spikes = json::array();
    for (const auto& sc : classifications) spikes.push_back(classification_json(sc));
    root["spikes"] = spikes;

    json cluster_arr = json::array();
    for (const auto& c : clusters) {
        json j;
        j["delta_minutes"] = c.delta_minutes;
        j["wallet_count"] = c.wallets.size();
        j["record_count"] = c.records.size();
        j["same_value_share"] = c.shares.same_value_share;
        j["same_destination_share"] = c.shares.same_destination_share;
        j["same_source_share"] = c.shares.same_source_share;
        if (c.shares.dominant_value) j["dominant_value"] = wei_to_string(*c.shares.dominant_value);
        if (c.shares.dominant_destination) j["dominant_destination"] = *c.shares.dominant_destination;
        if (c.shares.dominant_source) j["dominant_source"] = *c.shares.dominant_source;
        cluster_arr.push_back(j);
    }
    root["clusters"] = cluster_arr;

    json wallets;  // json objects iterate in key order: byte-stable
    for (const auto& [addr, entry] : report.wallets) {
        json w;
        w["flagged"] = entry.flagged;
        w["evidence"] = entry.evidence;
        json memberships = json::array();
        for (const auto& m : entry.spike_memberships) {
            json mj;
            mj["delta_minutes"] = m.delta_minutes;
            mj["kind"] = to_string(m.kind);
            mj["records"] = m.record_count;
            memberships.push_back(mj);
        }
        w["spike_memberships"] = memberships;
        wallets[addr] = w;
    }
    root["wallets"] = wallets;
    root["flagged_count"] = report.flagged_count;
    (void)ds;
    return root.dump(2) + "\n";
}

std::string fit_plot_tsv(const DeltaHistogram& histogram, const PowerLawFit& fit,
                         const std::string& config_hash) {
    std::ostringstream os;
    os << "# config=" << config_hash << "\n";
    os << "k\tobserved\texpected\n";
    if (histogram.bins.empty()) return os.str();
    const std::vector<double> expected = expected_counts(fit, histogram.max_bin());
    char buf[32];
    for (auto it = histogram.bins.lower_bound(fit.x_min); it != histogram.bins.end(); ++it) {
        std::snprintf(buf, sizeof(buf), "%.6g", expected[it->first - fit.x_min]);
        os << it->first << '\t' << it->second << '\t' << buf << '\n';
    }
    return os.str();
}

std::string recurrence_tsv(const std::vector<WindowProbe>& probes,
                           const std::string& config_hash) {
    std::ostringstream os;
    os << "# config=" << config_hash << "\n";
    os << "spike\twindow_index\tstart\tend\tobserved\texpected\tqualifies\n";
    char buf[32];
    for (const auto& p : probes) {
        std::snprintf(buf, sizeof(buf), "%.6g", p.expected);
        os << p.spike_bin << '\t' << p.window_index << '\t' << p.window.start << '\t'
           << p.window.end << '\t' << p.observed << '\t' << buf << '\t'
           << (p.qualifies ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string dataset_csv(const Dataset& ds) {
    std::ostringstream os;
    os << "tx_id,timestamp,from_wallet,to_wallet,value\n";
    for (const auto& tx : ds.transactions()) {
        os << csv_escape(tx.tx_id) << ',' << tx.timestamp << ',' << csv_escape(tx.from_wallet)
           << ',' << csv_escape(tx.to_wallet) << ',' << wei_to_string(tx.value) << '\n';
    }
    return os.str();
}

std::string dataset_jsonl(const Dataset& ds) {
    std::ostringstream os;
    for (const auto& tx : ds.transactions()) {
        json j;
        j["tx_id"] = tx.tx_id;
        j["timestamp"] = tx.timestamp;
        j["from_wallet"] = tx.from_wallet;
        if (tx.has_to()) {
            j["to_wallet"] = tx.to_wallet;
        } else {
            j["to_wallet"] = nullptr;
        }
        j["value"] = wei_to_string(tx.value);
        os << j.dump() << '\n';
    }
    return os.str();
}

std::string truth_csv(const GroundTruth& truth) {
    std::ostringstream os;
    os << "wallet,label\n";
    for (const auto& [wallet, label] : truth) {
        os << csv_escape(wallet) << ',' << to_string(label) << '\n';
    }
    return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace botdet
