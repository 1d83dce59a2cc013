// Benchmark: OpenMP kernels against the serial reference implementations on
// a synthetic workload. Usage: botdet_bench [humans] [pools]

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include <omp.h>

#include "botdet/anomaly.hpp"
#include "botdet/powerlaw.hpp"
#include "botdet/reference.hpp"
#include "botdet/synth.hpp"
#include "botdet/timeline.hpp"

using namespace botdet;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <typename F>
double time_ms(F&& f) {
    const double t0 = now_ms();
    f();
    return now_ms() - t0;
}

void row(const char* name, double parallel_ms, double serial_ms) {
    std::printf("%-28s %10.1f ms %12.1f ms %8.2fx\n", name, parallel_ms, serial_ms,
                serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
    SynthConfig cfg;
    cfg.seed = 7;
    cfg.span = Interval{1514764800, 1514764800 + 60L * 86400};
    cfg.humans.count = argc > 1 ? static_cast<uint32_t>(std::atoi(argv[1])) : 400;
    cfg.humans.alpha = 2.5;
    cfg.humans.x_min = 30;
    cfg.humans.mean_events = 40;
    cfg.periodic_bots.count = argc > 2 ? static_cast<uint32_t>(std::atoi(argv[2])) : 10;
    cfg.periodic_bots.period_minutes = 1440;
    cfg.periodic_bots.jitter_minutes = 1;
    cfg.periodic_bots.payout_destinations = 60;
    cfg.periodic_bots.cadence_days_max = 6;
    cfg.burst_bots.wallet_count = 100;
    cfg.burst_bots.burst_day = 30;

    const SynthOutput synth = generate(cfg);
    const Dataset& ds = synth.dataset;
    std::printf("dataset: %zu transactions, %zu wallets, %d OpenMP threads\n\n", ds.size(),
                ds.wallet_count(), omp_get_max_threads());
    std::printf("%-28s %13s %15s %9s\n", "kernel", "parallel", "serial ref", "speedup");

    const TimelineSet timelines = build_timelines(ds, ParticipationMode::both);

    DeltaHistogram hist;
    std::vector<DeltaRecord> par_records, ser_records;
    const double t_par_deltas = time_ms([&] {
        par_records = all_deltas(ds, timelines);
        hist = aggregate_histogram(par_records);
    });
    std::map<uint32_t, uint64_t> ser_bins;
    const double t_ser_deltas = time_ms([&] {
        ser_records = ref::all_deltas(ds, ParticipationMode::both);
        ser_bins = ref::histogram_bins(ser_records);
    });
    row("deltas + histogram", t_par_deltas, t_ser_deltas);
    if (hist.bins != ser_bins) {
        std::fprintf(stderr, "MISMATCH: histogram differs from reference\n");
        return 1;
    }

    std::map<uint32_t, uint64_t> deg_par, deg_ser;
    const double t_par_deg = time_ms([&] { deg_par = degree_distribution(ds); });
    const double t_ser_deg = time_ms([&] { deg_ser = ref::degree_distribution(ds); });
    row("degree distribution", t_par_deg, t_ser_deg);
    if (deg_par != deg_ser) {
        std::fprintf(stderr, "MISMATCH: degree distribution differs from reference\n");
        return 1;
    }

    const Interval window{cfg.span.start + 5 * 86400, cfg.span.start + 7 * 86400};
    DeltaHistogram win_par;
    std::vector<DeltaRecord> win_ser;
    const double t_par_win = time_ms([&] { win_par = windowed_histogram(ds, timelines, window); });
    const double t_ser_win =
        time_ms([&] { win_ser = ref::windowed_deltas(ds, ParticipationMode::both, window); });
    row("windowed histogram", t_par_win, t_ser_win);
    if (win_par.total != win_ser.size()) {
        std::fprintf(stderr, "MISMATCH: windowed histogram differs from reference\n");
        return 1;
    }

    // the fit kernel parallelizes over x_min candidates; compare thread counts
    PowerLawFit fit;
    const double t_fit_par = time_ms([&] { fit = fit_discrete_power_law(hist); });
    const int max_threads = omp_get_max_threads();
    omp_set_num_threads(1);
    PowerLawFit fit1;
    const double t_fit_ser = time_ms([&] { fit1 = fit_discrete_power_law(hist); });
    omp_set_num_threads(max_threads);
    row("power-law fit (1 thread)", t_fit_par, t_fit_ser);
    if (fit.alpha != fit1.alpha || fit.x_min != fit1.x_min) {
        std::fprintf(stderr, "MISMATCH: fit depends on thread count\n");
        return 1;
    }

    std::printf("\nfit: alpha=%.4f x_min=%u n_tail=%llu ks=%.4f\n", fit.alpha, fit.x_min,
                static_cast<unsigned long long>(fit.n_tail), fit.ks);
    return 0;
}
