// botdet: finds bot-like wallets in transaction logs by fitting a discrete
// power law to inter-transaction time differences and chasing the spikes
// that deviate from it.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "botdet/anomaly.hpp"
#include "botdet/attribution.hpp"
#include "botdet/config.hpp"
#include "botdet/exports.hpp"
#include "botdet/ingest.hpp"
#include "botdet/powerlaw.hpp"
#include "botdet/synth.hpp"
#include "botdet/timeline.hpp"

namespace {

using namespace botdet;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitFit = 3;

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Dataset load_dataset(const RunConfig& cfg) {
    if (cfg.input.empty()) throw std::invalid_argument("no input file given (--input)");
    std::ifstream in(cfg.input, std::ios::binary);
    if (!in) throw DataError("cannot open input file: " + cfg.input);
    ParseOptions opts;
    opts.format = input_format_from_string(cfg.format);
    opts.schema = cfg.schema;
    opts.strict = cfg.strict;
    opts.csv_delimiter = cfg.csv_delimiter[0];
    ParseStats stats;
    std::vector<Transaction> txs;
    try {
        txs = parse_transactions(in, opts, stats);
    } catch (const ParseError& e) {
        throw DataError(cfg.input + ": " + e.what());
    }
    return normalize(std::move(txs), stats);
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out) / name).string();
}

nlohmann::json dataset_summary(const Dataset& ds) {
    nlohmann::json j;
    j["tx_count"] = ds.size();
    j["wallet_count"] = ds.wallet_count();
    if (ds.span()) {
        j["span"] = nlohmann::json::array({ds.span()->t_min, ds.span()->t_max});
    } else {
        j["span"] = nullptr;
    }
    j["rows_read"] = ds.rows_read;
    j["rows_skipped"] = ds.rows_skipped;
    j["duplicates_dropped"] = ds.duplicates_dropped;
    return j;
}

// pipeline stages shared by the subcommands; each stage writes its artifacts
struct Pipeline {
    RunConfig cfg;
    std::string hash;
    Dataset ds;
    TimelineSet timelines;
    DeltaHistogram histogram;
    PowerLawFit fit;
    std::vector<Spike> spikes;
    ClassificationResult classification;
    std::vector<SpikeCluster> clusters;
    BotReport report;

    explicit Pipeline(const RunConfig& c) : cfg(c), hash(c.hash()) {}

    void load() { ds = load_dataset(cfg); }

    void stage_histogram() {
        timelines = build_timelines(ds, participation_mode_from_string(cfg.mode));
        histogram = aggregate_histogram(all_deltas(ds, timelines));
        write_file_atomic(out_path(cfg, "histogram.csv"), histogram_csv(histogram, hash));
        write_file_atomic(out_path(cfg, "degree.csv"), degree_csv(degree_distribution(ds), hash));
    }

    void stage_fit() {
        fit = fit_discrete_power_law(
            histogram, FitOptions{cfg.fit_xmin_min, cfg.fit_xmin_max, cfg.fit_min_tail});
        write_file_atomic(out_path(cfg, "fit.json"), fit_json(fit, hash));
        write_file_atomic(out_path(cfg, "fit_plot.tsv"), fit_plot_tsv(histogram, fit, hash));
    }

    void stage_detect() {
        spikes = detect_spikes(histogram, fit, DetectParams{cfg.detect_sigma, cfg.detect_min_count});
        write_file_atomic(out_path(cfg, "spikes.json"), spikes_json(spikes, hash));
    }

    void stage_classify() {
        classification = classify_anomalies(
            ds, participation_mode_from_string(cfg.mode), spikes, fit,
            WindowConfig{cfg.window_length, cfg.window_samples, cfg.window_seed, cfg.window_rho,
                         cfg.window_refit},
            DetectParams{cfg.detect_sigma, cfg.detect_min_count});
        write_file_atomic(out_path(cfg, "anomalies.json"),
                          anomalies_json(classification.classifications, hash));
        write_file_atomic(out_path(cfg, "recurrence.tsv"),
                          recurrence_tsv(classification.probes, hash));
    }

    void stage_report() {
        clusters.clear();
        for (const auto& sc : classification.classifications) {
            clusters.push_back(extract_cluster(sc.spike, histogram, ds));
        }
        report = build_report(classification.classifications, clusters, ds,
                              ReportParams{cfg.report_min_records, cfg.report_min_share});
        write_file_atomic(out_path(cfg, "report.json"),
                          report_json(report, classification.classifications, clusters, fit, ds,
                                      cfg));
    }
};

int cmd_ingest(const RunConfig& cfg) {
    Dataset ds = load_dataset(cfg);
    write_file_atomic(out_path(cfg, "dataset.csv"), dataset_csv(ds));
    std::cout << dataset_summary(ds).dump(2) << "\n";
    return kExitOk;
}

int cmd_histogram(const RunConfig& cfg) {
    Pipeline p(cfg);
    p.load();
    p.stage_histogram();
    std::cout << "{\"bins\": " << p.histogram.bins.size()
              << ", \"total\": " << p.histogram.total << "}\n";
    return kExitOk;
}

// which stage a subcommand runs through
enum class Stage { fit, detect, classify, report };

int run_through(const RunConfig& cfg, Stage last) {
    Pipeline p(cfg);
    p.load();
    p.stage_histogram();
    try {
        p.stage_fit();
    } catch (const NoViableXminError& e) {
        std::cerr << "fit failed: " << e.what() << "\n";
        return kExitFit;
    } catch (const InsufficientTailError& e) {
        std::cerr << "fit failed: " << e.what() << "\n";
        return kExitFit;
    }
    if (last >= Stage::detect) p.stage_detect();
    if (last >= Stage::classify) p.stage_classify();
    if (last >= Stage::report) p.stage_report();

    nlohmann::json summary = dataset_summary(p.ds);
    summary["alpha"] = p.fit.alpha;
    summary["x_min"] = p.fit.x_min;
    if (last >= Stage::detect) summary["spikes"] = p.spikes.size();
    if (last >= Stage::report) summary["flagged_wallets"] = p.report.flagged_count;
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

int cmd_synth(const SynthFileConfig& scfg, const std::string& out_dir,
              const std::string& format) {
    const SynthOutput out = generate(scfg.synth);
    if (format == "jsonl") {
        write_file_atomic((fs::path(out_dir) / "dataset.jsonl").string(),
                          dataset_jsonl(out.dataset));
    } else if (format == "csv") {
        write_file_atomic((fs::path(out_dir) / "dataset.csv").string(), dataset_csv(out.dataset));
    } else {
        throw std::invalid_argument("synth: format must be csv or jsonl");
    }
    write_file_atomic((fs::path(out_dir) / "truth.csv").string(), truth_csv(out.truth));
    nlohmann::json j = dataset_summary(out.dataset);
    j["wallets_labeled"] = out.truth.size();
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

// pull --config out of argv before CLI11 runs so file values load first and
// explicit flags then override them
std::string find_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) return argv[i + 1];
        if (a.rfind("--config=", 0) == 0) return a.substr(9);
    }
    return "";
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    SynthFileConfig scfg;

    try {
        const std::string config_path = find_config_path(argc, argv);
        if (!config_path.empty()) {
            const KeyValues kv = load_key_values(config_path);
            apply_run_config(kv, cfg);
            apply_synth_config(kv, scfg);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    CLI::App app{"bot-activity detector for blockchain transaction logs"};
    app.require_subcommand(1);
    std::string config_path_opt;
    app.add_option("--config", config_path_opt, "flat key=value config file");

    auto add_input_opts = [&](CLI::App* sub) {
        sub->add_option("--config", config_path_opt, "flat key=value config file");
        sub->add_option("--input", cfg.input, "transaction export to read");
        sub->add_option("--format", cfg.format, "csv or jsonl");
        sub->add_flag("--strict", cfg.strict, "abort on the first malformed record");
        sub->add_option("--delimiter", cfg.csv_delimiter, "CSV delimiter");
        sub->add_option("--mode", cfg.mode, "participation mode: sent, received or both");
        sub->add_option("--out", cfg.out, "output directory");
        sub->add_option("--schema-tx-id", cfg.schema.tx_id);
        sub->add_option("--schema-timestamp", cfg.schema.timestamp);
        sub->add_option("--schema-from", cfg.schema.from_wallet);
        sub->add_option("--schema-to", cfg.schema.to_wallet);
        sub->add_option("--schema-value", cfg.schema.value);
    };
    auto add_fit_opts = [&](CLI::App* sub) {
        sub->add_option("--xmin-min", cfg.fit_xmin_min, "smallest x_min candidate");
        sub->add_option("--xmin-max", cfg.fit_xmin_max, "largest x_min candidate");
        sub->add_option("--min-tail", cfg.fit_min_tail, "minimum tail size for a fit");
    };
    auto add_detect_opts = [&](CLI::App* sub) {
        sub->add_option("--sigma", cfg.detect_sigma, "spike score threshold");
        sub->add_option("--min-count", cfg.detect_min_count, "minimum observed count for a spike");
    };
    auto add_window_opts = [&](CLI::App* sub) {
        sub->add_option("--window", cfg.window_length, "window length in minutes");
        sub->add_option("--samples", cfg.window_samples, "number of random windows");
        sub->add_option("--seed", cfg.window_seed, "window sampling seed");
        sub->add_option("--rho", cfg.window_rho, "periodic recurrence threshold");
        sub->add_flag("--refit-windows", cfg.window_refit, "refit the power law per window");
    };
    auto add_report_opts = [&](CLI::App* sub) {
        sub->add_option("--min-records", cfg.report_min_records,
                        "records per wallet needed in a cluster");
        sub->add_option("--min-share", cfg.report_min_share,
                        "property share needed for evidence");
    };

    CLI::App* ingest = app.add_subcommand("ingest", "parse + normalize, write dataset cache");
    add_input_opts(ingest);
    CLI::App* histogram = app.add_subcommand("histogram", "delta histogram and degree distribution");
    add_input_opts(histogram);
    CLI::App* fit = app.add_subcommand("fit", "fit the discrete power law");
    add_input_opts(fit);
    add_fit_opts(fit);
    CLI::App* detect = app.add_subcommand("detect", "detect spike bins against the fit");
    add_input_opts(detect);
    add_fit_opts(detect);
    add_detect_opts(detect);
    CLI::App* classify = app.add_subcommand("classify", "classify spikes as periodic/irregular");
    add_input_opts(classify);
    add_fit_opts(classify);
    add_detect_opts(classify);
    add_window_opts(classify);
    CLI::App* report = app.add_subcommand("report", "full pipeline through the wallet report");
    add_input_opts(report);
    add_fit_opts(report);
    add_detect_opts(report);
    add_window_opts(report);
    add_report_opts(report);
    CLI::App* analyze = app.add_subcommand("analyze", "run everything, write all artifacts");
    add_input_opts(analyze);
    add_fit_opts(analyze);
    add_detect_opts(analyze);
    add_window_opts(analyze);
    add_report_opts(analyze);

    CLI::App* synth = app.add_subcommand("synth", "generate a labeled synthetic dataset");
    std::string synth_out = cfg.out;
    std::string synth_format = "csv";
    synth->add_option("--config", config_path_opt, "flat key=value config file");
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--format", synth_format, "dataset file format: csv or jsonl");
    synth->add_option("--seed", scfg.synth.seed);
    synth->add_option("--start", scfg.start_epoch, "span start, epoch seconds");
    synth->add_option("--days", scfg.days);
    synth->add_option("--humans", scfg.synth.humans.count);
    synth->add_option("--human-alpha", scfg.synth.humans.alpha);
    synth->add_option("--human-xmin", scfg.synth.humans.x_min);
    synth->add_option("--human-events", scfg.synth.humans.mean_events);
    synth->add_option("--pools", scfg.synth.periodic_bots.count);
    synth->add_option("--pool-period", scfg.synth.periodic_bots.period_minutes);
    synth->add_option("--pool-jitter", scfg.synth.periodic_bots.jitter_minutes);
    synth->add_option("--pool-destinations", scfg.synth.periodic_bots.payout_destinations);
    synth->add_option("--pool-cadence-max", scfg.synth.periodic_bots.cadence_days_max);
    synth->add_flag("--label-destinations-as-bots",
                    scfg.synth.periodic_bots.label_destinations_as_bots);
    synth->add_option("--burst-wallets", scfg.synth.burst_bots.wallet_count);
    synth->add_option("--burst-day", scfg.synth.burst_bots.burst_day);
    synth->add_option("--burst-gap", scfg.synth.burst_bots.common_gap_minutes);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (synth->parsed()) {
            scfg.finalize();
            scfg.synth.validate();
            return cmd_synth(scfg, synth_out, synth_format);
        }
        cfg.validate();
        if (ingest->parsed()) return cmd_ingest(cfg);
        if (histogram->parsed()) return cmd_histogram(cfg);
        if (fit->parsed()) return run_through(cfg, Stage::fit);
        if (detect->parsed()) return run_through(cfg, Stage::detect);
        if (classify->parsed()) return run_through(cfg, Stage::classify);
        if (report->parsed()) return run_through(cfg, Stage::report);
        if (analyze->parsed()) return run_through(cfg, Stage::report);
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
