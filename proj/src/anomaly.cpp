#include "botdet/anomaly.hpp"

#include <algorithm>
#include <cmath>

#include "botdet/rng.hpp"

namespace botdet {

const char* to_string(AnomalyKind kind) {
    switch (kind) {
        case AnomalyKind::periodic: return "periodic";
        case AnomalyKind::irregular: return "irregular";
        case AnomalyKind::unclassifiable: return "unclassifiable";
    }
    return "?";
}

double poisson_upper_tail(double lambda, uint64_t n) {
    if (n == 0) return 1.0;
    if (lambda <= 0.0) return 0.0;
    const double nd = static_cast<double>(n);
    // anchor term p(n) in log space, then sum in the numerically short direction
    const double log_pn = -lambda + nd * std::log(lambda) - std::lgamma(nd + 1.0);
    if (nd > lambda) {
        // P(N >= n): forward sum, terms decay geometrically
        double term = std::exp(log_pn);
        double sum = 0.0;
        double k = nd;
        while (term > 0.0) {
            sum += term;
            k += 1.0;
            const double next = term * lambda / k;
            if (next >= term) break;  // cannot happen for k > lambda; guard
            term = next;
            if (term < sum * 1e-18) break;
        }
        return std::min(1.0, sum);
    }
    // P(N >= n) = 1 - P(N <= n-1): backward sum from n-1 toward 0
    double term = std::exp(log_pn + std::log(nd) - std::log(lambda));  // p(n-1)
    double sum = 0.0;
    double k = nd - 1.0;
    while (k >= 0.0 && term > 0.0) {
        sum += term;
        if (k == 0.0) break;
        term = term * k / lambda;
        k -= 1.0;
        if (term < sum * 1e-18) break;
    }
    return std::max(0.0, 1.0 - sum);
}

std::vector<Spike> detect_spikes(const DeltaHistogram& histogram, const PowerLawFit& fit,
                                 const DetectParams& params) {
    std::vector<Spike> spikes;
    if (histogram.bins.empty()) return spikes;
    const std::vector<double> expected = expected_counts(fit, histogram.max_bin());
    for (auto it = histogram.bins.lower_bound(fit.x_min); it != histogram.bins.end(); ++it) {
        const uint32_t bin = it->first;
        const uint64_t obs = it->second;
        const double exp_count = expected[bin - fit.x_min];
        const double score =
            (static_cast<double>(obs) - exp_count) / std::sqrt(std::max(exp_count, 1.0));
        if (obs >= params.min_count && score >= params.sigma_threshold) {
            spikes.push_back(Spike{bin, obs, exp_count, score,
                                   poisson_upper_tail(exp_count, obs)});
        }
    }
    std::sort(spikes.begin(), spikes.end(), [](const Spike& a, const Spike& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.delta_minutes < b.delta_minutes;
    });
    return spikes;
}

DeltaHistogram windowed_histogram(const Dataset& ds, const TimelineSet& timelines,
                                  Interval window) {
    if (window.length() <= 0) throw std::invalid_argument("windowed_histogram: empty window");
    std::vector<DeltaRecord> records;
    for (WalletId w = 0; w < timelines.events.size(); ++w) {
        const auto& ev = timelines.events[w];
        if (ev.size() < 2) continue;
        // events are ascending in time; take the contiguous in-window slice.
        // Consecutive pairs of the slice are exactly the timeline-consecutive
        // pairs with both endpoints inside the window.
        auto first = std::lower_bound(ev.begin(), ev.end(), window.start,
                                      [&](uint32_t idx, int64_t t) { return ds.tx(idx).timestamp < t; });
        auto last = std::lower_bound(first, ev.end(), window.end,
                                     [&](uint32_t idx, int64_t t) { return ds.tx(idx).timestamp < t; });
        if (last - first < 2) continue;
        for (auto it = first + 1; it != last; ++it) {
            const int64_t gap = ds.tx(*it).timestamp - ds.tx(*(it - 1)).timestamp;
            records.push_back(
                DeltaRecord{w, static_cast<uint32_t>(gap / 60), *(it - 1), *it});
        }
    }
    return aggregate_histogram(std::move(records), window);
}

DeltaHistogram windowed_histogram(const Dataset& ds, ParticipationMode mode, Interval window) {
    return windowed_histogram(ds, build_timelines(ds, mode), window);
}

ClassificationResult classify_anomalies(const Dataset& ds, ParticipationMode mode,
                                        const std::vector<Spike>& spikes, const PowerLawFit& fit,
                                        const WindowConfig& wcfg, const DetectParams& params) {
    ClassificationResult result;
    if (spikes.empty()) return result;
    if (!ds.span()) throw std::invalid_argument("classify_anomalies: empty dataset");
    if (wcfg.window_length == 0 || wcfg.num_samples == 0) {
        throw std::invalid_argument("classify_anomalies: window_length and num_samples must be positive");
    }
    const Span span = *ds.span();
    const int64_t window_sec = static_cast<int64_t>(wcfg.window_length) * 60;
    if (window_sec > span.t_max - span.t_min) {
        throw std::invalid_argument("classify_anomalies: window longer than dataset span");
    }

    // spikes a window can never contain are reported, not classified
    std::vector<const Spike*> classifiable;
    for (const auto& s : spikes) {
        if (s.delta_minutes < wcfg.window_length) classifiable.push_back(&s);
    }

    // window starts are drawn up front so workers share no RNG state
    Rng rng(wcfg.rng_seed);
    std::vector<Interval> windows(classifiable.empty() ? 0 : wcfg.num_samples);
    const uint64_t start_range = static_cast<uint64_t>(span.t_max - window_sec - span.t_min) + 1;
    for (auto& w : windows) {
        const int64_t start = span.t_min + static_cast<int64_t>(rng.below(start_range));
        w = Interval{start, start + window_sec};
    }

    const TimelineSet timelines = build_timelines(ds, mode);
    const size_t n_spikes = classifiable.size();
    const size_t n_windows = windows.size();
    std::vector<uint8_t> qualifies(n_spikes * n_windows, 0);
    std::vector<uint64_t> observed(n_spikes * n_windows, 0);
    std::vector<double> scaled_expected(n_spikes * n_windows, 0.0);

    const double n_tail = static_cast<double>(fit.n_tail);

#pragma omp parallel for schedule(dynamic)
    for (size_t wi = 0; wi < n_windows; ++wi) {
        const DeltaHistogram hw = windowed_histogram(ds, timelines, windows[wi]);
        PowerLawFit wfit = fit;
        bool have_wfit = false;
        if (wcfg.refit_per_window) {
            try {
                wfit = fit_discrete_power_law(hw, FitOptions{1, std::max(fit.x_min, 1u), 50});
                have_wfit = true;
            } catch (const NoViableXminError&) {
                // fall back to the rescaled global fit
            }
        }
        uint64_t n_tail_w = 0;
        for (auto it = hw.bins.lower_bound(fit.x_min); it != hw.bins.end(); ++it) {
            n_tail_w += it->second;
        }
        const double ratio = n_tail > 0 ? static_cast<double>(n_tail_w) / n_tail : 0.0;
        const uint64_t min_count_w = std::max<uint64_t>(
            1, static_cast<uint64_t>(std::llround(static_cast<double>(params.min_count) * ratio)));
        for (size_t si = 0; si < n_spikes; ++si) {
            const uint32_t bin = classifiable[si]->delta_minutes;
            const uint64_t obs = hw.count(bin);
            double exp_w;
            if (have_wfit && bin >= wfit.x_min) {
                exp_w = static_cast<double>(wfit.n_tail) *
                        std::exp(-wfit.alpha * std::log(static_cast<double>(bin))) / wfit.zeta;
            } else {
                exp_w = classifiable[si]->expected * ratio;
            }
            const double score =
                (static_cast<double>(obs) - exp_w) / std::sqrt(std::max(exp_w, 1.0));
            const size_t cell = si * n_windows + wi;
            observed[cell] = obs;
            scaled_expected[cell] = exp_w;
            qualifies[cell] = obs >= min_count_w && score >= params.sigma_threshold;
        }
    }

    std::vector<SpikeClassification> classified(n_spikes);
    for (size_t si = 0; si < n_spikes; ++si) {
        const Spike& spike = *classifiable[si];
        std::vector<Interval> hits;
        uint32_t hit_count = 0;
        for (size_t wi = 0; wi < n_windows; ++wi) {
            const size_t cell = si * n_windows + wi;
            result.probes.push_back(WindowProbe{spike.delta_minutes, static_cast<uint32_t>(wi),
                                                windows[wi], observed[cell],
                                                scaled_expected[cell],
                                                qualifies[cell] != 0});
            if (qualifies[cell]) {
                ++hit_count;
                hits.push_back(windows[wi]);
            }
        }
        SpikeClassification sc;
        sc.spike = spike;
        sc.recurrence_rate = static_cast<double>(hit_count) / static_cast<double>(n_windows);
        if (hit_count == 0) {
            sc.kind = AnomalyKind::unclassifiable;
            sc.reason = "not reproducible in any sampled window";
        } else {
            sc.kind = sc.recurrence_rate >= wcfg.periodic_threshold ? AnomalyKind::periodic
                                                                    : AnomalyKind::irregular;
            // merge qualifying windows into maximal contiguous intervals
            std::sort(hits.begin(), hits.end(), [](const Interval& a, const Interval& b) {
                return a.start != b.start ? a.start < b.start : a.end < b.end;
            });
            for (const auto& h : hits) {
                if (!sc.occurrence_windows.empty() && h.start <= sc.occurrence_windows.back().end) {
                    sc.occurrence_windows.back().end =
                        std::max(sc.occurrence_windows.back().end, h.end);
                } else {
                    sc.occurrence_windows.push_back(h);
                }
            }
        }
        classified[si] = std::move(sc);
    }

    // emit in the order the spikes came in
    size_t next_classified = 0;
    for (const auto& s : spikes) {
        if (s.delta_minutes >= wcfg.window_length) {
            SpikeClassification sc;
            sc.spike = s;
            sc.kind = AnomalyKind::unclassifiable;
            sc.reason = "window of " + std::to_string(wcfg.window_length) +
                        " min cannot contain a " + std::to_string(s.delta_minutes) + "-min gap";
            result.classifications.push_back(std::move(sc));
        } else {
            result.classifications.push_back(std::move(classified[next_classified++]));
        }
    }
    return result;
}

}  // namespace botdet
