#include <doctest.h>

#include <cmath>
#include <numbers>

#include "botdet/powerlaw.hpp"
#include "botdet/reference.hpp"
#include "botdet/rng.hpp"

using namespace botdet;

namespace {

DeltaHistogram hist_from_bins(std::map<uint32_t, uint64_t> bins) {
    DeltaHistogram h;
    h.bins = std::move(bins);
    for (const auto& [bin, count] : h.bins) h.total += count;
    return h;
}

DeltaHistogram sample_histogram(double alpha, uint32_t x_min, size_t n, uint64_t seed) {
    ref::PowerLawSampler sampler(alpha, x_min);
    Rng rng(seed);
    std::map<uint32_t, uint64_t> bins;
    for (size_t i = 0; i < n; ++i) bins[sampler.draw(rng)] += 1;
    return hist_from_bins(std::move(bins));
}

constexpr double kPi2Over6 = std::numbers::pi * std::numbers::pi / 6.0;

}  // namespace

TEST_CASE("hurwitz_zeta matches known identities") {
    CHECK(hurwitz_zeta(2.0, 1) == doctest::Approx(kPi2Over6).epsilon(1e-12));
    CHECK(hurwitz_zeta(2.0, 2) == doctest::Approx(kPi2Over6 - 1.0).epsilon(1e-12));
    // frozen from ref::zeta(2.5, 7, 1e7 terms + integral bound)
    CHECK(hurwitz_zeta(2.5, 7) == doctest::Approx(0.040081757933661).epsilon(1e-10));
}

TEST_CASE("hurwitz_zeta rejects a divergent or invalid domain") {
    CHECK_THROWS_AS(hurwitz_zeta(1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(hurwitz_zeta(1.0 + 5e-7, 1), std::invalid_argument);
    CHECK_THROWS_AS(hurwitz_zeta(2.0, 0), std::invalid_argument);
}

TEST_CASE("hurwitz_zeta recurrence zeta(a,x) - zeta(a,x+1) = x^-a") {
    Rng rng(20240517);
    for (int i = 0; i < 200; ++i) {
        const double alpha = 1.05 + rng.unit() * 4.75;
        const uint32_t x = 1 + static_cast<uint32_t>(rng.below(5000));
        const double lhs = hurwitz_zeta(alpha, x) - hurwitz_zeta(alpha, x + 1);
        const double rhs = std::exp(-alpha * std::log(static_cast<double>(x)));
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("hurwitz_zeta agrees with the brute-force summation oracle") {
    Rng rng(7);
    for (int i = 0; i < 12; ++i) {
        const double alpha = 1.3 + rng.unit() * 4.0;
        const uint32_t x = 1 + static_cast<uint32_t>(rng.below(300));
        CHECK(hurwitz_zeta(alpha, x) ==
              doctest::Approx(ref::zeta(alpha, x, 1'000'000)).epsilon(1e-10));
    }
}

TEST_CASE("tail_cdf_model boundary, ratio and monotonicity") {
    PowerLawFit fit;
    fit.alpha = 2.0;
    fit.x_min = 1;
    fit.zeta = hurwitz_zeta(2.0, 1);
    CHECK(tail_cdf_model(fit, 1) == 1.0);
    // (pi^2/6 - 1) / (pi^2/6)
    CHECK(tail_cdf_model(fit, 2) == doctest::Approx(0.392072898145973).epsilon(1e-12));
    CHECK_THROWS_AS(tail_cdf_model(fit, 0), std::invalid_argument);
    double prev = 1.0;
    for (uint32_t k = 2; k < 40; ++k) {
        const double cur = tail_cdf_model(fit, k);
        CHECK(cur < prev);
        CHECK(cur > 0.0);
        prev = cur;
    }
}

TEST_CASE("tail_cdf_model matches the direct-summation oracle on random points") {
    Rng rng(99);
    for (int i = 0; i < 10; ++i) {
        PowerLawFit fit;
        fit.alpha = 1.4 + rng.unit() * 3.0;
        fit.x_min = 1 + static_cast<uint32_t>(rng.below(20));
        fit.zeta = hurwitz_zeta(fit.alpha, fit.x_min);
        const uint32_t k = fit.x_min + static_cast<uint32_t>(rng.below(500));
        const double expect =
            ref::zeta(fit.alpha, k, 1'000'000) / ref::zeta(fit.alpha, fit.x_min, 1'000'000);
        CHECK(tail_cdf_model(fit, k) == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("mle_alpha rejects degenerate and thin tails") {
    CHECK_THROWS_AS(mle_alpha(hist_from_bins({{4, 500}}), 1), DegenerateTailError);
    CHECK_THROWS_AS(mle_alpha(hist_from_bins({{1, 10}, {2, 12}}), 1), InsufficientTailError);
}

TEST_CASE("mle_alpha on a two-bin histogram matches the fine grid-scan oracle") {
    // frozen: ref::mle_alpha_grid({{1,1000},{2,1000}}, x_min 1, step 1e-7)
    const auto r = mle_alpha(hist_from_bins({{1, 1000}, {2, 1000}}), 1);
    CHECK(r.alpha == doctest::Approx(2.353828129).epsilon(2e-5));
}

TEST_CASE("mle_alpha recovers the exponent of sampled data") {
    const auto h = sample_histogram(2.5, 1, 100'000, 1234);
    const auto r = mle_alpha(h, 1);
    CHECK(r.alpha > 2.45);
    CHECK(r.alpha < 2.55);
}

TEST_CASE("mle_alpha is invariant under scaling all bin counts") {
    auto h = sample_histogram(2.2, 1, 5'000, 42);
    auto scaled = h;
    for (auto& [bin, count] : scaled.bins) count *= 7;
    scaled.total *= 7;
    const auto a = mle_alpha(h, 1);
    const auto b = mle_alpha(scaled, 1);
    CHECK(a.alpha == doctest::Approx(b.alpha).epsilon(1e-5));
}

TEST_CASE("mle estimator consistency over 20 seeded samples") {
    double total_err = 0.0;
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        const auto h = sample_histogram(2.5, 1, 100'000, seed * 7919);
        total_err += std::abs(mle_alpha(h, 1).alpha - 2.5);
    }
    CHECK(total_err / 20.0 < 0.05);
}

TEST_CASE("ks_distance is small when the histogram follows the model") {
    const double alpha = 2.5;
    const double z = hurwitz_zeta(alpha, 1);
    std::map<uint32_t, uint64_t> bins;
    for (uint32_t k = 1; k <= 400; ++k) {
        const uint64_t c = static_cast<uint64_t>(
            std::llround(1e6 * std::exp(-alpha * std::log(static_cast<double>(k))) / z));
        if (c > 0) bins[k] = c;
    }
    CHECK(ks_distance(hist_from_bins(std::move(bins)), alpha, 1) < 0.01);
}

TEST_CASE("ks_distance matches the naive double-loop oracle") {
    Rng rng(555);
    for (int i = 0; i < 8; ++i) {
        std::map<uint32_t, uint64_t> bins;
        const uint32_t spread = 2 + static_cast<uint32_t>(rng.below(60));
        for (int b = 0; b < 25; ++b) bins[1 + rng.below(spread)] += 1 + rng.below(40);
        const double alpha = 1.5 + rng.unit() * 2.0;
        const auto h = hist_from_bins(std::move(bins));
        CHECK(ks_distance(h, alpha, 1) ==
              doctest::Approx(ref::ks_distance(h.bins, alpha, 1)).epsilon(1e-8));
    }
}

TEST_CASE("ks_distance ignores bin-count scaling and rejects an empty tail") {
    const auto h = sample_histogram(2.0, 1, 2'000, 3);
    auto scaled = h;
    for (auto& [bin, count] : scaled.bins) count *= 9;
    scaled.total *= 9;
    CHECK(ks_distance(h, 2.0, 1) == doctest::Approx(ks_distance(scaled, 2.0, 1)).epsilon(1e-12));
    CHECK_THROWS_AS(ks_distance(hist_from_bins({{0, 5}}), 2.0, 1), std::invalid_argument);
}

TEST_CASE("fit_discrete_power_law recovers clean samples") {
    const auto h = sample_histogram(2.5, 1, 100'000, 2024);
    const auto fit = fit_discrete_power_law(h, FitOptions{1, 50, 50});
    CHECK(fit.x_min <= 3);
    CHECK(fit.alpha > 2.45);
    CHECK(fit.alpha < 2.55);
    CHECK(fit.ks < 0.02);
    CHECK(fit.n_tail > 90'000);
}

TEST_CASE("fit_discrete_power_law finds x_min under low-end contamination") {
    auto h = sample_histogram(2.5, 5, 100'000, 77);
    Rng rng(78);
    for (int i = 0; i < 12'000; ++i) h.bins[1 + rng.below(4)] += 1;  // uniform noise below 5
    h.total += 12'000;
    const auto fit = fit_discrete_power_law(h, FitOptions{1, 60, 50});
    CHECK(fit.x_min >= 3);
    CHECK(fit.x_min <= 8);
    CHECK(fit.alpha > 2.4);
    CHECK(fit.alpha < 2.6);
}

TEST_CASE("fit_discrete_power_law rejects hopeless histograms") {
    CHECK_THROWS_AS(fit_discrete_power_law(hist_from_bins({})), NoViableXminError);
    CHECK_THROWS_AS(fit_discrete_power_law(hist_from_bins({{0, 1000}})), NoViableXminError);
    CHECK_THROWS_AS(fit_discrete_power_law(hist_from_bins({{3, 1000}})), NoViableXminError);
}

TEST_CASE("expected_counts plug-in values and the scale identity") {
    PowerLawFit fit;
    fit.alpha = 2.0;
    fit.x_min = 1;
    fit.n_tail = 1000;
    fit.zeta = hurwitz_zeta(2.0, 1);
    const auto e = expected_counts(fit, 2000);
    CHECK(e[0] == doctest::Approx(607.9271018540267).epsilon(1e-12));
    for (uint32_t k : {1u, 7u, 50u, 400u}) {
        CHECK(e[2 * k - fit.x_min] / e[k - fit.x_min] ==
              doctest::Approx(std::exp2(-fit.alpha)).epsilon(1e-12));
    }
}

TEST_CASE("expected_counts sums to n_tail") {
    const auto h = sample_histogram(2.5, 1, 50'000, 9);
    const auto fit = fit_discrete_power_law(h, FitOptions{1, 20, 50});
    const uint32_t max_bin = h.max_bin() + 2000;  // extend past observations
    const auto e = expected_counts(fit, max_bin);
    double sum = 0.0, comp = 0.0;
    for (double v : e) {  // kahan
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    // analytic remainder beyond max_bin via the independent oracle zeta
    sum += static_cast<double>(fit.n_tail) * ref::zeta(fit.alpha, max_bin + 1, 1'000'000) /
           ref::zeta(fit.alpha, fit.x_min, 1'000'000);
    CHECK(sum == doctest::Approx(static_cast<double>(fit.n_tail)).epsilon(1e-9));
}

TEST_CASE("expected_counts matches the direct formula per bin") {
    Rng rng(31337);
    PowerLawFit fit;
    fit.alpha = 1.9 + rng.unit();
    fit.x_min = 1 + static_cast<uint32_t>(rng.below(10));
    fit.n_tail = 10'000;
    fit.zeta = hurwitz_zeta(fit.alpha, fit.x_min);
    const auto e = expected_counts(fit, fit.x_min + 300);
    for (uint32_t k = fit.x_min; k <= fit.x_min + 300; ++k) {
        const double direct = 10'000.0 * std::pow(static_cast<double>(k), -fit.alpha) /
                              ref::zeta(fit.alpha, fit.x_min, 1'000'000);
        CHECK(e[k - fit.x_min] == doctest::Approx(direct).epsilon(1e-9));
    }
}
