#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "botdet/powerlaw.hpp"
#include "botdet/timeline.hpp"

namespace botdet {

struct DetectParams {
    double sigma_threshold = 6.0;
    uint64_t min_count = 30;
};

/// A bin whose observed count exceeds the power-law expectation.
struct Spike {
    uint32_t delta_minutes = 0;
    uint64_t observed = 0;
    double expected = 0.0;
    double score = 0.0;   // (observed - expected) / sqrt(max(expected, 1))
    double p_value = 1.0; // Poisson upper tail at `observed`, mean `expected`
};

struct WindowConfig {
    uint32_t window_length = 2880;  // minutes
    uint32_t num_samples = 40;
    uint64_t rng_seed = 1;
    double periodic_threshold = 0.9;  // rho
    bool refit_per_window = false;
};

enum class AnomalyKind { periodic, irregular, unclassifiable };

const char* to_string(AnomalyKind kind);

/// Classification of one spike across randomly placed windows. For
/// kind == unclassifiable, `reason` says why and the window fields are empty.
struct SpikeClassification {
    Spike spike;
    AnomalyKind kind = AnomalyKind::unclassifiable;
    double recurrence_rate = 0.0;
    std::vector<Interval> occurrence_windows;  // merged maximal intervals
    std::string reason;
};

/// Per-window qualification detail, for export and diagnostics.
struct WindowProbe {
    uint32_t spike_bin = 0;
    uint32_t window_index = 0;
    Interval window;
    uint64_t observed = 0;
    double expected = 0.0;
    bool qualifies = false;
};

struct ClassificationResult {
    std::vector<SpikeClassification> classifications;
    std::vector<WindowProbe> probes;
};

/// Poisson upper tail P(N >= n) with mean lambda.
double poisson_upper_tail(double lambda, uint64_t n);

std::vector<Spike> detect_spikes(const DeltaHistogram& histogram, const PowerLawFit& fit,
                                 const DetectParams& params = {});

/// Histogram of deltas whose BOTH endpoints fall inside `window`.
DeltaHistogram windowed_histogram(const Dataset& ds, ParticipationMode mode, Interval window);

/// As above, reusing prebuilt timelines.
DeltaHistogram windowed_histogram(const Dataset& ds, const TimelineSet& timelines,
                                  Interval window);

/// Re-detect each spike in `num_samples` seeded random windows of fixed
/// length; periodic iff it re-qualifies in at least rho of them. Expected
/// counts (and the min-count floor) are rescaled to each window's tail size.
ClassificationResult classify_anomalies(const Dataset& ds, ParticipationMode mode,
                                        const std::vector<Spike>& spikes, const PowerLawFit& fit,
                                        const WindowConfig& wcfg, const DetectParams& params = {});

}  // namespace botdet
