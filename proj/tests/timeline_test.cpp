#include <doctest.h>

#include <algorithm>

#include "botdet/reference.hpp"
#include "botdet/rng.hpp"
#include "botdet/timeline.hpp"
#include "botdet/types.hpp"

using namespace botdet;

namespace {

struct Row {
    std::string id;
    int64_t ts;
    std::string from;
    std::string to;
    Wei value = 1;
};

Dataset make_dataset(const std::vector<Row>& rows) {
    std::vector<Transaction> txs;
    for (const auto& r : rows) {
        Transaction tx;
        tx.tx_id = r.id;
        tx.timestamp = r.ts;
        tx.from_wallet = r.from;
        tx.to_wallet = r.to;
        tx.value = r.value;
        txs.push_back(std::move(tx));
    }
    return normalize(std::move(txs));
}

Dataset random_dataset(uint64_t seed, size_t n_txs, size_t n_wallets) {
    Rng rng(seed);
    std::vector<Row> rows;
    for (size_t i = 0; i < n_txs; ++i) {
        Row r;
        r.id = "t" + std::to_string(i);
        r.ts = 1'000'000 + static_cast<int64_t>(rng.below(500'000));
        r.from = "w" + std::to_string(rng.below(n_wallets));
        r.to = rng.below(10) == 0 ? "" : "w" + std::to_string(rng.below(n_wallets));
        r.value = Wei(rng.below(50));
        rows.push_back(std::move(r));
    }
    return make_dataset(rows);
}

std::vector<std::tuple<WalletId, uint32_t, uint32_t, uint32_t>> canon(
    std::vector<DeltaRecord> records) {
    std::vector<std::tuple<WalletId, uint32_t, uint32_t, uint32_t>> out;
    for (const auto& r : records) {
        out.emplace_back(r.wallet, r.delta_minutes, r.prior_tx, r.current_tx);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("build_timelines on an empty dataset") {
    const Dataset ds = make_dataset({});
    const TimelineSet tl = build_timelines(ds, ParticipationMode::both);
    CHECK(tl.participating_wallets() == 0);
}

TEST_CASE("build_timelines participation by mode") {
    const Dataset ds = make_dataset({{"a", 1000, "A", "B"}});
    const WalletId A = 0, B = 1;  // wallet table is sorted

    const TimelineSet sent = build_timelines(ds, ParticipationMode::sent);
    CHECK(sent.events[A].size() == 1);
    CHECK(sent.events[B].empty());

    const TimelineSet received = build_timelines(ds, ParticipationMode::received);
    CHECK(received.events[A].empty());
    CHECK(received.events[B].size() == 1);

    const TimelineSet both = build_timelines(ds, ParticipationMode::both);
    CHECK(both.events[A].size() == 1);
    CHECK(both.events[B].size() == 1);
}

TEST_CASE("a self-transfer contributes one event, not two") {
    const Dataset ds = make_dataset({{"a", 1000, "A", "A"}, {"b", 2000, "A", "A"}});
    for (auto mode :
         {ParticipationMode::sent, ParticipationMode::received, ParticipationMode::both}) {
        const TimelineSet tl = build_timelines(ds, mode);
        REQUIRE(tl.events[0].size() == 2);
    }
    const TimelineSet tl = build_timelines(ds, ParticipationMode::both);
    const auto deltas = compute_deltas(ds, 0, tl.events[0]);
    REQUIRE(deltas.size() == 1);
    CHECK(deltas[0].delta_minutes == 16);  // floor(1000 / 60)
}

TEST_CASE("build_timelines matches the naive per-wallet filter oracle") {
    const Dataset ds = random_dataset(424242, 50, 8);
    for (auto mode :
         {ParticipationMode::sent, ParticipationMode::received, ParticipationMode::both}) {
        const TimelineSet tl = build_timelines(ds, mode);
        const auto expect = ref::build_timelines(ds, mode);
        REQUIRE(tl.events.size() == expect.size());
        for (size_t w = 0; w < expect.size(); ++w) {
            CHECK(tl.events[w] == expect[w]);
        }
    }
}

TEST_CASE("compute_deltas basics") {
    SUBCASE("single event yields nothing") {
        const Dataset ds = make_dataset({{"a", 1000, "A", "B"}});
        CHECK(compute_deltas(ds, 0, build_timelines(ds, ParticipationMode::sent).events[0])
                  .empty());
    }
    SUBCASE("floor semantics") {
        // gaps of 60 s and 3665 s -> 1 and 61 whole minutes
        const Dataset ds = make_dataset(
            {{"a", 1000, "A", "B"}, {"b", 1060, "A", "B"}, {"c", 4725, "A", "B"}});
        const auto deltas =
            compute_deltas(ds, 0, build_timelines(ds, ParticipationMode::sent).events[0]);
        REQUIRE(deltas.size() == 2);
        CHECK(deltas[0].delta_minutes == 1);
        CHECK(deltas[1].delta_minutes == 61);
        CHECK(deltas[0].prior_tx != deltas[0].current_tx);
    }
    SUBCASE("sub-minute gap floors to zero") {
        const Dataset ds = make_dataset({{"a", 1000, "A", "B"}, {"b", 1059, "A", "B"}});
        const auto deltas =
            compute_deltas(ds, 0, build_timelines(ds, ParticipationMode::sent).events[0]);
        REQUIRE(deltas.size() == 1);
        CHECK(deltas[0].delta_minutes == 0);
    }
    SUBCASE("equal timestamps are ordered by tx_id") {
        const Dataset ds = make_dataset({{"z", 1000, "A", "B"}, {"a", 1000, "A", "B"}});
        const auto ev = build_timelines(ds, ParticipationMode::sent).events[0];
        REQUIRE(ev.size() == 2);
        CHECK(ds.tx(ev[0]).tx_id == "a");
        CHECK(ds.tx(ev[1]).tx_id == "z");
        const auto deltas = compute_deltas(ds, 0, ev);
        REQUIRE(deltas.size() == 1);
        CHECK(deltas[0].delta_minutes == 0);
    }
}

TEST_CASE("timestamp shifts leave deltas unchanged") {
    Rng rng(11);
    std::vector<Row> rows;
    for (int i = 0; i < 40; ++i) {
        rows.push_back({"t" + std::to_string(i), 5000 + static_cast<int64_t>(rng.below(100'000)),
                        "w" + std::to_string(rng.below(5)), "w" + std::to_string(rng.below(5))});
    }
    std::vector<Row> shifted = rows;
    for (auto& r : shifted) r.ts += 987'654;
    const Dataset a = make_dataset(rows);
    const Dataset b = make_dataset(shifted);
    const auto da = all_deltas(a, build_timelines(a, ParticipationMode::both));
    const auto db = all_deltas(b, build_timelines(b, ParticipationMode::both));
    REQUIRE(da.size() == db.size());
    for (size_t i = 0; i < da.size(); ++i) {
        CHECK(da[i].delta_minutes == db[i].delta_minutes);
    }
}

TEST_CASE("delta record count equals total timeline length minus wallets") {
    const Dataset ds = random_dataset(99, 120, 10);
    const TimelineSet tl = build_timelines(ds, ParticipationMode::both);
    size_t expect = 0;
    for (const auto& ev : tl.events) {
        if (!ev.empty()) expect += ev.size() - 1;
    }
    CHECK(all_deltas(ds, tl).size() == expect);
}

TEST_CASE("aggregate_histogram counts and membership") {
    SUBCASE("empty") {
        const DeltaHistogram h = aggregate_histogram({});
        CHECK(h.total == 0);
        CHECK(h.bins.empty());
    }
    SUBCASE("simple tally") {
        std::vector<DeltaRecord> records{
            {0, 1, 0, 1}, {1, 1, 2, 3}, {0, 5, 1, 4}};
        const DeltaHistogram h = aggregate_histogram(records);
        CHECK(h.total == 3);
        CHECK(h.count(1) == 2);
        CHECK(h.count(5) == 1);
        CHECK(h.membership.at(1).size() == 2);
    }
    SUBCASE("random records match the brute-force tally") {
        Rng rng(5150);
        std::vector<DeltaRecord> records;
        for (int i = 0; i < 1000; ++i) {
            records.push_back(DeltaRecord{static_cast<WalletId>(rng.below(20)),
                                          static_cast<uint32_t>(rng.below(50)),
                                          static_cast<uint32_t>(i), static_cast<uint32_t>(i + 1)});
        }
        const DeltaHistogram h = aggregate_histogram(records);
        CHECK(h.bins == ref::histogram_bins(records));
        uint64_t members = 0;
        for (const auto& [bin, recs] : h.membership) {
            CHECK(recs.size() == h.count(bin));
            members += recs.size();
            CHECK(std::is_sorted(recs.begin(), recs.end(),
                                 [](const DeltaRecord& a, const DeltaRecord& b) {
                                     return std::tie(a.wallet, a.current_tx) <
                                            std::tie(b.wallet, b.current_tx);
                                 }));
        }
        CHECK(members == h.total);
    }
}

TEST_CASE("histograms of a partition merge to the histogram of the union") {
    const Dataset ds = random_dataset(31415, 200, 12);
    const auto records = all_deltas(ds, build_timelines(ds, ParticipationMode::both));
    Rng rng(8);
    std::vector<DeltaRecord> part1, part2;
    for (const auto& r : records) (rng.below(2) ? part1 : part2).push_back(r);
    const DeltaHistogram merged =
        merge_histograms(aggregate_histogram(part1), aggregate_histogram(part2));
    const DeltaHistogram whole = aggregate_histogram(records);
    CHECK(merged.total == whole.total);
    CHECK(merged.bins == whole.bins);
    REQUIRE(merged.membership.size() == whole.membership.size());
    for (const auto& [bin, recs] : whole.membership) {
        CHECK(merged.membership.at(bin) == recs);
    }
}

TEST_CASE("degree_distribution") {
    SUBCASE("star graph") {
        const Dataset ds = make_dataset(
            {{"1", 1000, "A", "B"}, {"2", 1001, "A", "C"}, {"3", 1002, "A", "D"}});
        const auto dist = degree_distribution(ds);
        CHECK(dist == std::map<uint32_t, uint64_t>{{1, 3}, {3, 1}});
    }
    SUBCASE("parallel and reverse edges collapse") {
        const Dataset ds = make_dataset({{"1", 1000, "A", "B"}, {"2", 1001, "B", "A"}});
        CHECK(degree_distribution(ds) == std::map<uint32_t, uint64_t>{{1, 2}});
    }
    SUBCASE("self-loops and absent counterparties are ignored") {
        const Dataset ds = make_dataset({{"1", 1000, "A", "A"}, {"2", 1001, "B", ""}});
        CHECK(degree_distribution(ds).empty());
    }
    SUBCASE("random graph matches the adjacency-set oracle") {
        for (uint64_t seed : {1ULL, 2ULL, 3ULL}) {
            const Dataset ds = random_dataset(seed, 30, 9);
            CHECK(degree_distribution(ds) == ref::degree_distribution(ds));
        }
    }
}

TEST_CASE("all_deltas equals the reference scan on random data") {
    for (uint64_t seed : {21ULL, 22ULL, 23ULL}) {
        const Dataset ds = random_dataset(seed, 80, 7);
        for (auto mode :
             {ParticipationMode::sent, ParticipationMode::received, ParticipationMode::both}) {
            CHECK(canon(all_deltas(ds, build_timelines(ds, mode))) ==
                  canon(ref::all_deltas(ds, mode)));
        }
    }
}
