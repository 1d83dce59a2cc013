#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "botdet/timeline.hpp"

namespace botdet {

class InsufficientTailError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// All tail mass in one bin, or the likelihood is maximized at the edge of
/// the search bracket.
class DegenerateTailError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoViableXminError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Maximum-likelihood fit of p(k) = k^(-alpha) / zeta(alpha, x_min) to the
/// histogram tail k >= x_min.
struct PowerLawFit {
    double alpha = 0.0;
    uint32_t x_min = 1;
    uint64_t n_tail = 0;
    double ks = 0.0;
    double log_likelihood = 0.0;
    double zeta = 0.0;  // Hurwitz zeta(alpha, x_min)
};

inline constexpr double kAlphaEps = 1e-6;
inline constexpr double kAlphaMax = 6.0;

/// Hurwitz zeta: sum of k^(-alpha) for k = x_min..infinity, alpha > 1.
/// Direct summation plus an Euler-Maclaurin tail; absolute error < 1e-12.
double hurwitz_zeta(double alpha, uint32_t x_min);

/// Model tail CDF P(X >= k) = zeta(alpha, k) / zeta(alpha, x_min).
double tail_cdf_model(const PowerLawFit& fit, uint32_t k);

struct MleResult {
    double alpha = 0.0;
    double log_likelihood = 0.0;
};

/// Maximize L(a) = -n ln zeta(a, x_min) - a * sum over tail of count(k) ln k
/// by golden-section search on a in (1+eps, 6], tolerance 1e-6.
MleResult mle_alpha(const DeltaHistogram& histogram, uint32_t x_min, uint64_t min_tail = 50);

/// Max over observed tail bins of |empirical P(X >= k) - model P(X >= k)|.
double ks_distance(const DeltaHistogram& histogram, double alpha, uint32_t x_min);

struct FitOptions {
    uint32_t x_min_lo = 1;
    uint32_t x_min_hi = 1440;
    uint64_t min_tail = 50;
};

/// Scan candidate x_min values, fit alpha by MLE for each, keep the
/// candidate with the smallest KS distance (ties: smallest x_min).
/// Bin 0 is never part of the tail.
PowerLawFit fit_discrete_power_law(const DeltaHistogram& histogram, const FitOptions& opts = {});

/// Expected tail counts E(k) = n_tail * k^(-alpha) / zeta(alpha, x_min) for
/// k in [x_min, max_bin]. Indexed by k - x_min.
std::vector<double> expected_counts(const PowerLawFit& fit, uint32_t max_bin);

}  // namespace botdet
