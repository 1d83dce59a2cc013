#include <doctest.h>

#include <set>

#include "botdet/exports.hpp"
#include "botdet/powerlaw.hpp"
#include "botdet/synth.hpp"
#include "botdet/timeline.hpp"

using namespace botdet;

namespace {

constexpr int64_t kDay = 86400;
constexpr int64_t kEpoch = 1514764800;

}  // namespace

TEST_CASE("generation is deterministic for a fixed config") {
    SynthConfig cfg;
    cfg.seed = 12345;
    cfg.span = Interval{kEpoch, kEpoch + 15 * kDay};
    cfg.humans.count = 30;
    cfg.humans.x_min = 3;
    cfg.humans.mean_events = 20;
    cfg.periodic_bots.count = 2;
    cfg.periodic_bots.payout_destinations = 6;
    cfg.periodic_bots.jitter_minutes = 2;
    cfg.burst_bots.wallet_count = 10;
    cfg.burst_bots.burst_day = 7;
    const SynthOutput a = generate(cfg);
    const SynthOutput b = generate(cfg);
    CHECK(dataset_csv(a.dataset) == dataset_csv(b.dataset));
    CHECK(truth_csv(a.truth) == truth_csv(b.truth));
}

TEST_CASE("a single jitter-free periodic bot emits exact period gaps") {
    SynthConfig cfg;
    cfg.seed = 9;
    cfg.span = Interval{kEpoch, kEpoch + 10 * kDay};
    cfg.periodic_bots.count = 1;
    cfg.periodic_bots.period_minutes = 1440;
    cfg.periodic_bots.jitter_minutes = 0;
    cfg.periodic_bots.payout_destinations = 1;
    const SynthOutput synth = generate(cfg);
    const Dataset& ds = synth.dataset;
    CHECK(ds.size() == 10);
    const TimelineSet tl = build_timelines(ds, ParticipationMode::sent);
    bool saw_pool = false;
    for (WalletId w = 0; w < tl.events.size(); ++w) {
        if (tl.events[w].empty()) continue;
        saw_pool = true;
        for (const auto& d : compute_deltas(ds, w, tl.events[w])) {
            CHECK(d.delta_minutes == 1440);
        }
    }
    CHECK(saw_pool);
}

TEST_CASE("burst wallets each land one record in the common bin, inside the burst day") {
    SynthConfig cfg;
    cfg.seed = 77;
    cfg.span = Interval{kEpoch, kEpoch + 20 * kDay};
    cfg.burst_bots.wallet_count = 50;
    cfg.burst_bots.burst_day = 11;
    cfg.burst_bots.common_gap_minutes = 1032;
    const SynthOutput synth = generate(cfg);
    const Dataset& ds = synth.dataset;
    const int64_t burst_start = kEpoch + 11 * kDay;
    for (const auto& tx : ds.transactions()) {
        if (tx.from_wallet[0] != 'b') continue;
        CHECK(tx.timestamp >= burst_start);
        CHECK(tx.timestamp < burst_start + kDay);
    }
    const TimelineSet tl = build_timelines(ds, ParticipationMode::sent);
    const DeltaHistogram h = aggregate_histogram(all_deltas(ds, tl));
    CHECK(h.count(1032) == 50);
    std::set<WalletId> wallets;
    for (const auto& r : h.membership.at(1032)) wallets.insert(r.wallet);
    CHECK(wallets.size() == 50);
    // shared destination and value by default
    for (const auto& r : h.membership.at(1032)) {
        CHECK(ds.tx(r.current_tx).to_wallet == "collector");
    }
}

TEST_CASE("humans-only synthesis closes the loop with the estimator") {
    SynthConfig cfg;
    cfg.seed = 4242;
    cfg.span = Interval{kEpoch, kEpoch + 60 * kDay};
    cfg.humans.count = 2000;
    cfg.humans.alpha = 2.5;
    cfg.humans.x_min = 1;
    cfg.humans.mean_events = 51;
    const SynthOutput synth = generate(cfg);
    const Dataset& ds = synth.dataset;
    const DeltaHistogram h =
        aggregate_histogram(all_deltas(ds, build_timelines(ds, ParticipationMode::both)));
    CHECK(h.total >= 99'000);  // 2000 wallets x 50 gaps, minus span truncation
    const PowerLawFit fit = fit_discrete_power_law(h, FitOptions{1, 50, 50});
    CHECK(fit.alpha > 2.4);
    CHECK(fit.alpha < 2.6);
    CHECK(fit.x_min <= 3);
}

TEST_CASE("generated datasets satisfy the ingest invariants") {
    SynthConfig cfg;
    cfg.seed = 31;
    cfg.span = Interval{kEpoch, kEpoch + 25 * kDay};
    cfg.humans.count = 50;
    cfg.humans.x_min = 5;
    cfg.humans.mean_events = 15;
    cfg.periodic_bots.count = 3;
    cfg.periodic_bots.payout_destinations = 12;
    cfg.periodic_bots.cadence_days_max = 3;
    cfg.burst_bots.wallet_count = 15;
    cfg.burst_bots.burst_day = 12;
    const SynthOutput synth = generate(cfg);
    const Dataset& ds = synth.dataset;

    const Dataset renorm = normalize(ds.transactions());
    CHECK(renorm.duplicates_dropped == 0);  // ids unique
    for (size_t i = 1; i < ds.size(); ++i) {
        const bool ordered =
            ds.tx(i - 1).timestamp < ds.tx(i).timestamp ||
            (ds.tx(i - 1).timestamp == ds.tx(i).timestamp && ds.tx(i - 1).tx_id < ds.tx(i).tx_id);
        CHECK(ordered);
    }

    // every wallet in the dataset is labeled exactly once
    for (const auto& w : ds.wallets()) {
        CHECK(synth.truth.count(w) == 1);
    }
    uint64_t pools = 0, members = 0, bursts = 0;
    for (const auto& [wallet, label] : synth.truth) {
        if (wallet[0] == 'p') ++pools;
        if (wallet[0] == 'm') ++members;
        if (wallet[0] == 'b') ++bursts;
        (void)label;
    }
    CHECK(pools == 3);
    CHECK(members == 36);
    CHECK(bursts == 15);
}

TEST_CASE("destination labeling flag switches member labels") {
    SynthConfig cfg;
    cfg.seed = 8;
    cfg.span = Interval{kEpoch, kEpoch + 10 * kDay};
    cfg.periodic_bots.count = 1;
    cfg.periodic_bots.payout_destinations = 4;
    const SynthOutput humans = generate(cfg);
    CHECK(humans.truth.at("m000000") == WalletLabel::human);
    cfg.periodic_bots.label_destinations_as_bots = true;
    const SynthOutput bots = generate(cfg);
    CHECK(bots.truth.at("m000000") == WalletLabel::periodic_bot);
    CHECK(bots.truth.at("p0000") == WalletLabel::periodic_bot);
}

TEST_CASE("impossible configs are rejected") {
    SynthConfig cfg;
    cfg.span = Interval{kEpoch, kEpoch + 2 * kDay};
    cfg.periodic_bots.count = 1;
    cfg.periodic_bots.period_minutes = 5000;  // longer than the span
    CHECK_THROWS_AS(generate(cfg), std::invalid_argument);

    cfg.periodic_bots.period_minutes = 1440;
    cfg.periodic_bots.jitter_minutes = 720;  // not below period/2
    CHECK_THROWS_AS(generate(cfg), std::invalid_argument);

    SynthConfig burst;
    burst.span = Interval{kEpoch, kEpoch + 5 * kDay};
    burst.burst_bots.wallet_count = 5;
    burst.burst_bots.burst_day = 9;  // outside the span
    CHECK_THROWS_AS(generate(burst), std::invalid_argument);

    SynthConfig empty_span;
    empty_span.span = Interval{kEpoch, kEpoch};
    CHECK_THROWS_AS(generate(empty_span), std::invalid_argument);

    SynthConfig wide_gap;
    wide_gap.span = Interval{kEpoch, kEpoch + 5 * kDay};
    wide_gap.burst_bots.wallet_count = 5;
    wide_gap.burst_bots.burst_day = 1;
    wide_gap.burst_bots.common_gap_minutes = 1500;  // does not fit in a day
    CHECK_THROWS_AS(generate(wide_gap), std::invalid_argument);
}
