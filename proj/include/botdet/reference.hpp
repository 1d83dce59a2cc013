#pragma once

// Serial reference implementations, kept deliberately naive. They are the
// independent oracles the test suites compare the production kernels
// against, and the baseline side of the benchmark. Nothing here may call
// into the implementations it checks.

#include <cstdint>
#include <map>
#include <vector>

#include "botdet/attribution.hpp"
#include "botdet/rng.hpp"
#include "botdet/timeline.hpp"
#include "botdet/types.hpp"

namespace botdet::ref {

/// Per-wallet event collection by full scans of the transaction list.
std::vector<std::vector<uint32_t>> build_timelines(const Dataset& ds, ParticipationMode mode);

/// All delta records via the naive per-wallet scan.
std::vector<DeltaRecord> all_deltas(const Dataset& ds, ParticipationMode mode);

/// bin -> count tally, one record at a time.
std::map<uint32_t, uint64_t> histogram_bins(const std::vector<DeltaRecord>& records);

/// Deltas whose both endpoints lie in the window: filter, then recompute.
std::vector<DeltaRecord> windowed_deltas(const Dataset& ds, ParticipationMode mode,
                                         Interval window);

/// Adjacency-set construction, one set per wallet.
std::map<uint32_t, uint64_t> degree_distribution(const Dataset& ds);

/// Brute-force frequency counts over the records' current transactions.
PropertyShares score_properties(const std::vector<DeltaRecord>& records, const Dataset& ds);

/// Direct summation of k^(-alpha) over `terms` terms plus a midpoint
/// integral bound for the remainder. Long-double accumulation.
double zeta(double alpha, uint64_t x_min, uint64_t terms = 10'000'000);

/// argmax of the tail log-likelihood by grid scan at `step` resolution.
double mle_alpha_grid(const std::map<uint32_t, uint64_t>& bins, uint32_t x_min, double lo,
                      double hi, double step);

/// KS distance by the naive double loop over observed tail bins.
double ks_distance(const std::map<uint32_t, uint64_t>& bins, double alpha, uint32_t x_min);

/// Per-bin spike scoring without the production shortcuts.
std::vector<uint32_t> spike_bins(const std::map<uint32_t, uint64_t>& bins, double alpha,
                                 uint32_t x_min, uint64_t n_tail, double sigma_threshold,
                                 uint64_t min_count);

/// Inverse-CDF sampler over an ascending cumulative table (long double),
/// normalized by ref::zeta. Independent of the production sampler.
class PowerLawSampler {
public:
    PowerLawSampler(double alpha, uint32_t x_min);
    uint32_t draw(Rng& rng);

private:
    void grow(size_t need);
    double alpha_;
    uint32_t x_min_;
    long double norm_;
    std::vector<long double> cdf_;  // cdf_[i] = P(X <= x_min + i)
};

}  // namespace botdet::ref
