#include "botdet/timeline.hpp"

#include <algorithm>
#include <stdexcept>

namespace botdet {

ParticipationMode participation_mode_from_string(const std::string& s) {
    if (s == "sent") return ParticipationMode::sent;
    if (s == "received") return ParticipationMode::received;
    if (s == "both") return ParticipationMode::both;
    throw std::invalid_argument("unknown participation mode: " + s);
}

const char* to_string(ParticipationMode mode) {
    switch (mode) {
        case ParticipationMode::sent: return "sent";
        case ParticipationMode::received: return "received";
        case ParticipationMode::both: return "both";
    }
    return "?";
}

TimelineSet build_timelines(const Dataset& ds, ParticipationMode mode) {
    TimelineSet tl;
    tl.mode = mode;
    tl.events.resize(ds.wallet_count());
    const bool take_sent = mode != ParticipationMode::received;
    const bool take_recv = mode != ParticipationMode::sent;
    for (uint32_t i = 0; i < ds.size(); ++i) {
        const WalletId from = ds.from_id(i);
        const WalletId to = ds.to_id(i);
        if (take_sent) tl.events[from].push_back(i);
        if (take_recv && to != kNoWallet && !(take_sent && to == from)) {
            tl.events[to].push_back(i);  // self-transfer contributes one event
        }
    }
    return tl;
}

std::vector<DeltaRecord> compute_deltas(const Dataset& ds, WalletId wallet,
                                        std::span<const uint32_t> tx_indices) {
    std::vector<DeltaRecord> out;
    if (tx_indices.size() < 2) return out;
    out.reserve(tx_indices.size() - 1);
    for (size_t i = 1; i < tx_indices.size(); ++i) {
        const int64_t gap = ds.tx(tx_indices[i]).timestamp - ds.tx(tx_indices[i - 1]).timestamp;
        out.push_back(DeltaRecord{wallet, static_cast<uint32_t>(gap / 60), tx_indices[i - 1],
                                  tx_indices[i]});
    }
    return out;
}

std::vector<DeltaRecord> all_deltas(const Dataset& ds, const TimelineSet& timelines) {
    const size_t n_wallets = timelines.events.size();
    std::vector<size_t> offsets(n_wallets + 1, 0);
    for (size_t w = 0; w < n_wallets; ++w) {
        const size_t len = timelines.events[w].size();
        offsets[w + 1] = offsets[w] + (len >= 2 ? len - 1 : 0);
    }
    std::vector<DeltaRecord> records(offsets[n_wallets]);
#pragma omp parallel for schedule(dynamic, 256)
    for (size_t w = 0; w < n_wallets; ++w) {
        const auto& ev = timelines.events[w];
        if (ev.size() < 2) continue;
        size_t pos = offsets[w];
        for (size_t i = 1; i < ev.size(); ++i) {
            const int64_t gap = ds.tx(ev[i]).timestamp - ds.tx(ev[i - 1]).timestamp;
            records[pos++] = DeltaRecord{static_cast<WalletId>(w),
                                         static_cast<uint32_t>(gap / 60), ev[i - 1], ev[i]};
        }
    }
    return records;
}

namespace {

// canonical membership order: by wallet, then current transaction
bool record_less(const DeltaRecord& a, const DeltaRecord& b) {
    if (a.wallet != b.wallet) return a.wallet < b.wallet;
    return a.current_tx < b.current_tx;
}

}  // namespace

DeltaHistogram aggregate_histogram(std::vector<DeltaRecord> records,
                                   std::optional<Interval> window) {
    DeltaHistogram h;
    h.window = window;
    h.total = records.size();
    std::sort(records.begin(), records.end(), [](const DeltaRecord& a, const DeltaRecord& b) {
        if (a.delta_minutes != b.delta_minutes) return a.delta_minutes < b.delta_minutes;
        return record_less(a, b);
    });
    for (auto& r : records) {
        h.bins[r.delta_minutes]++;
        h.membership[r.delta_minutes].push_back(r);
    }
    return h;
}

DeltaHistogram merge_histograms(const DeltaHistogram& a, const DeltaHistogram& b) {
    DeltaHistogram out;
    out.total = a.total + b.total;
    out.window = a.window;  // caller's responsibility that windows agree
    out.bins = a.bins;
    for (const auto& [bin, count] : b.bins) out.bins[bin] += count;
    out.membership = a.membership;
    for (const auto& [bin, records] : b.membership) {
        auto& dst = out.membership[bin];
        dst.insert(dst.end(), records.begin(), records.end());
        std::sort(dst.begin(), dst.end(), record_less);
    }
    return out;
}

std::map<uint32_t, uint64_t> degree_distribution(const Dataset& ds) {
    std::vector<std::pair<WalletId, WalletId>> edges;
    edges.reserve(ds.size());
    for (uint32_t i = 0; i < ds.size(); ++i) {
        const WalletId from = ds.from_id(i);
        const WalletId to = ds.to_id(i);
        if (to == kNoWallet || to == from) continue;  // no counterparty / self-loop
        edges.emplace_back(std::min(from, to), std::max(from, to));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::vector<uint32_t> degree(ds.wallet_count(), 0);
    for (const auto& [a, b] : edges) {
        ++degree[a];
        ++degree[b];
    }
    std::map<uint32_t, uint64_t> dist;
    for (uint32_t d : degree) {
        if (d > 0) ++dist[d];
    }
    return dist;
}

}  // namespace botdet
