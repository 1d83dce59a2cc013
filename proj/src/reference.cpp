#include "botdet/reference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace botdet::ref {

std::vector<std::vector<uint32_t>> build_timelines(const Dataset& ds, ParticipationMode mode) {
    std::vector<std::vector<uint32_t>> events(ds.wallet_count());
    for (WalletId w = 0; w < ds.wallet_count(); ++w) {
        for (uint32_t i = 0; i < ds.size(); ++i) {
            bool participates = false;
            if (mode == ParticipationMode::sent || mode == ParticipationMode::both) {
                participates = participates || ds.from_id(i) == w;
            }
            if (mode == ParticipationMode::received || mode == ParticipationMode::both) {
                participates = participates || ds.to_id(i) == w;
            }
            if (participates) events[w].push_back(i);
        }
    }
    return events;
}

std::vector<DeltaRecord> all_deltas(const Dataset& ds, ParticipationMode mode) {
    std::vector<DeltaRecord> out;
    const auto events = ref::build_timelines(ds, mode);
    for (WalletId w = 0; w < events.size(); ++w) {
        for (size_t i = 1; i < events[w].size(); ++i) {
            const int64_t gap =
                ds.tx(events[w][i]).timestamp - ds.tx(events[w][i - 1]).timestamp;
            out.push_back(DeltaRecord{w, static_cast<uint32_t>(gap / 60), events[w][i - 1],
                                      events[w][i]});
        }
    }
    return out;
}

std::map<uint32_t, uint64_t> histogram_bins(const std::vector<DeltaRecord>& records) {
    std::map<uint32_t, uint64_t> bins;
    for (const auto& r : records) bins[r.delta_minutes] += 1;
    return bins;
}

std::vector<DeltaRecord> windowed_deltas(const Dataset& ds, ParticipationMode mode,
                                         Interval window) {
    std::vector<DeltaRecord> out;
    for (const auto& r : all_deltas(ds, mode)) {
        if (window.contains(ds.tx(r.prior_tx).timestamp) &&
            window.contains(ds.tx(r.current_tx).timestamp)) {
            out.push_back(r);
        }
    }
    return out;
}

std::map<uint32_t, uint64_t> degree_distribution(const Dataset& ds) {
    std::vector<std::set<WalletId>> adjacency(ds.wallet_count());
    for (uint32_t i = 0; i < ds.size(); ++i) {
        const WalletId a = ds.from_id(i), b = ds.to_id(i);
        if (b == kNoWallet || a == b) continue;
        adjacency[a].insert(b);
        adjacency[b].insert(a);
    }
    std::map<uint32_t, uint64_t> dist;
    for (const auto& nbrs : adjacency) {
        if (!nbrs.empty()) dist[nbrs.size()] += 1;
    }
    return dist;
}

PropertyShares score_properties(const std::vector<DeltaRecord>& records, const Dataset& ds) {
    PropertyShares out;
    std::map<std::string, uint64_t> by_value;
    std::map<std::string, uint64_t> by_dest;
    std::map<std::string, uint64_t> by_source;
    uint64_t dest_population = 0;
    for (const auto& r : records) {
        const Transaction& tx = ds.tx(r.current_tx);
        by_value[wei_to_string(tx.value)] += 1;
        by_source[tx.from_wallet] += 1;
        if (tx.has_to()) {
            by_dest[tx.to_wallet] += 1;
            ++dest_population;
        }
    }
    auto best_of = [](const std::map<std::string, uint64_t>& freqs) {
        uint64_t best = 0;
        std::string key;
        for (const auto& [k, c] : freqs) {
            if (c > best) {
                best = c;
                key = k;
            }
        }
        return std::make_pair(key, best);
    };
    // ties pick the numerically smallest value: shorter decimal first
    auto best_numeric = [](const std::map<std::string, uint64_t>& freqs) {
        uint64_t best = 0;
        std::string key;
        auto less_numeric = [](const std::string& a, const std::string& b) {
            return a.size() != b.size() ? a.size() < b.size() : a < b;
        };
        for (const auto& [k, c] : freqs) {
            if (c > best || (c == best && !key.empty() && less_numeric(k, key))) {
                best = c;
                key = k;
            }
        }
        return std::make_pair(key, best);
    };
    if (!records.empty()) {
        auto [val, vc] = best_numeric(by_value);
        out.same_value_share = static_cast<double>(vc) / static_cast<double>(records.size());
        Wei w = 0;
        wei_from_string(val, w);
        out.dominant_value = w;
        auto [src, sc] = best_of(by_source);
        out.same_source_share = static_cast<double>(sc) / static_cast<double>(records.size());
        out.dominant_source = src;
        if (dest_population > 0) {
            auto [dst, dc] = best_of(by_dest);
            out.same_destination_share =
                static_cast<double>(dc) / static_cast<double>(dest_population);
            out.dominant_destination = dst;
        }
    }
    return out;
}

double zeta(double alpha, uint64_t x_min, uint64_t terms) {
    // Kahan-compensated summation small-to-large, remainder bounded by the
    // midpoint integral. A different construction than the production kernel
    // on purpose.
    double sum = 0.0, comp = 0.0;
    for (uint64_t k = x_min + terms; k-- > x_min;) {
        const double term = std::exp(-alpha * std::log(static_cast<double>(k)));
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    const double n = static_cast<double>(x_min + terms) - 0.5;
    return sum + std::exp((1.0 - alpha) * std::log(n)) / (alpha - 1.0);
}

namespace {
constexpr uint64_t kGridZetaTerms = 100'000;
}

double mle_alpha_grid(const std::map<uint32_t, uint64_t>& bins, uint32_t x_min, double lo,
                      double hi, double step) {
    uint64_t n = 0;
    double sum_log = 0.0;
    for (const auto& [k, c] : bins) {
        if (k < x_min || k == 0) continue;
        n += c;
        sum_log += static_cast<double>(c) * std::log(static_cast<double>(k));
    }
    auto ll = [&](double a) {
        return -static_cast<double>(n) * std::log(zeta(a, x_min, kGridZetaTerms)) - a * sum_log;
    };
    // scan coarse-to-fine until the requested resolution
    double cur_lo = lo, cur_hi = hi;
    double cur_step = std::max(step, (hi - lo) / 500.0);
    double best_alpha = lo;
    while (true) {
        double best_ll = -HUGE_VAL;
        for (double a = cur_lo; a <= cur_hi + cur_step / 2; a += cur_step) {
            const double v = ll(a);
            if (v > best_ll) {
                best_ll = v;
                best_alpha = a;
            }
        }
        if (cur_step <= step) break;
        cur_lo = std::max(lo, best_alpha - 2 * cur_step);
        cur_hi = std::min(hi, best_alpha + 2 * cur_step);
        cur_step = std::max(step, cur_step / 10.0);
    }
    return best_alpha;
}

double ks_distance(const std::map<uint32_t, uint64_t>& bins, double alpha, uint32_t x_min) {
    std::vector<uint32_t> tail_bins;
    uint64_t n_tail = 0;
    for (const auto& [k, c] : bins) {
        if (k < std::max(x_min, 1u)) continue;
        tail_bins.push_back(k);
        n_tail += c;
    }
    const double z0 = zeta(alpha, std::max(x_min, 1u), kGridZetaTerms);
    double worst = 0.0;
    for (uint32_t k : tail_bins) {
        uint64_t ge = 0;
        for (const auto& [kk, c] : bins) {
            if (kk >= k) ge += c;  // the naive inner loop, deliberately
        }
        const double emp = static_cast<double>(ge) / static_cast<double>(n_tail);
        const double model = zeta(alpha, k, kGridZetaTerms) / z0;
        worst = std::max(worst, std::abs(emp - model));
    }
    return worst;
}

std::vector<uint32_t> spike_bins(const std::map<uint32_t, uint64_t>& bins, double alpha,
                                 uint32_t x_min, uint64_t n_tail, double sigma_threshold,
                                 uint64_t min_count) {
    const double z0 = zeta(alpha, x_min, kGridZetaTerms);
    std::vector<uint32_t> out;
    for (const auto& [k, c] : bins) {
        if (k < x_min) continue;
        const double expected = static_cast<double>(n_tail) *
                                std::pow(static_cast<double>(k), -alpha) / z0;
        const double score =
            (static_cast<double>(c) - expected) / std::sqrt(std::max(expected, 1.0));
        if (c >= min_count && score >= sigma_threshold) out.push_back(k);
    }
    return out;
}

PowerLawSampler::PowerLawSampler(double alpha, uint32_t x_min)
    : alpha_(alpha), x_min_(x_min), norm_(zeta(alpha, x_min, 1'000'000)) {
    grow(64);
}

void PowerLawSampler::grow(size_t need) {
    const size_t old = cdf_.size();
    cdf_.resize(need);
    long double acc = old == 0 ? 0.0L : cdf_[old - 1];
    for (size_t i = old; i < need; ++i) {
        acc += powl(static_cast<long double>(x_min_ + i), static_cast<long double>(-alpha_)) /
               norm_;
        cdf_[i] = acc;
    }
}

uint32_t PowerLawSampler::draw(Rng& rng) {
    const long double u = static_cast<long double>(rng.open_unit());
    while (cdf_.back() < u && cdf_.size() < (size_t(1) << 24)) grow(cdf_.size() * 2);
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;  // astronomically deep tail; clamp
    return x_min_ + static_cast<uint32_t>(it - cdf_.begin());
}

}  // namespace botdet::ref
