#pragma once

#include <map>
#include <string>

#include "botdet/ingest.hpp"
#include "botdet/synth.hpp"

namespace botdet {

/// Everything one analysis run needs. Loaded from a flat key=value file,
/// individual keys overridable from the command line.
struct RunConfig {
    std::string input;
    std::string format = "csv";
    Schema schema;
    bool strict = false;
    std::string csv_delimiter = ",";
    std::string mode = "both";

    uint32_t fit_xmin_min = 1;
    uint32_t fit_xmin_max = 1440;
    uint64_t fit_min_tail = 50;

    double detect_sigma = 6.0;
    uint64_t detect_min_count = 30;

    uint32_t window_length = 2880;  // minutes
    uint32_t window_samples = 40;
    uint64_t window_seed = 1;
    double window_rho = 0.9;
    bool window_refit = false;

    uint64_t report_min_records = 3;
    double report_min_share = 0.5;

    std::string out = "out";

    void validate() const;  // throws std::invalid_argument
    std::string canonical_string() const;
    std::string hash() const;  // fnv-1a over the canonical string, hex
};

using KeyValues = std::map<std::string, std::string>;

/// Parse a flat key=value file ('#' comments, blank lines ignored).
KeyValues load_key_values(const std::string& path);
KeyValues parse_key_values(const std::string& text);

/// Apply recognized keys onto the config; unknown keys throw.
void apply_run_config(const KeyValues& kv, RunConfig& cfg);

struct SynthFileConfig {
    SynthConfig synth;
    int64_t start_epoch = 1514764800;  // 2018-01-01T00:00:00Z
    uint32_t days = 60;

    void finalize();  // derive synth.span from start/days
    std::string canonical_string() const;
};

void apply_synth_config(const KeyValues& kv, SynthFileConfig& cfg);

}  // namespace botdet
