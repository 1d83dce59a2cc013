#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "botdet/types.hpp"

namespace botdet {

/// Which side of a transaction puts a wallet on its own timeline.
enum class ParticipationMode { sent, received, both };

ParticipationMode participation_mode_from_string(const std::string& s);
const char* to_string(ParticipationMode mode);

/// Event lists per wallet, indexed by WalletId. Entries are indices into
/// Dataset::transactions(), ascending, so each wallet's events inherit the
/// dataset's (timestamp, tx_id) order. Wallets that do not participate
/// under the mode have empty lists.
struct TimelineSet {
    ParticipationMode mode = ParticipationMode::both;
    std::vector<std::vector<uint32_t>> events;  // [wallet id] -> tx indices

    size_t participating_wallets() const {
        size_t n = 0;
        for (const auto& e : events) n += !e.empty();
        return n;
    }
};

/// One inter-transaction gap of one wallet, in whole minutes (floored).
/// prior_tx/current_tx index into the dataset the record was built from.
struct DeltaRecord {
    WalletId wallet = kNoWallet;
    uint32_t delta_minutes = 0;
    uint32_t prior_tx = 0;
    uint32_t current_tx = 0;

    bool operator==(const DeltaRecord&) const = default;
};

/// delta bin -> count, with per-bin membership provenance.
struct DeltaHistogram {
    std::map<uint32_t, uint64_t> bins;
    std::map<uint32_t, std::vector<DeltaRecord>> membership;
    uint64_t total = 0;
    std::optional<Interval> window;

    uint64_t count(uint32_t bin) const {
        auto it = bins.find(bin);
        return it == bins.end() ? 0 : it->second;
    }
    uint32_t max_bin() const { return bins.empty() ? 0 : bins.rbegin()->first; }
};

TimelineSet build_timelines(const Dataset& ds, ParticipationMode mode);

/// Consecutive-pair gaps of one wallet's event list, in order.
std::vector<DeltaRecord> compute_deltas(const Dataset& ds, WalletId wallet,
                                        std::span<const uint32_t> tx_indices);

/// All delta records of all wallets under `mode`, wallet-major order.
std::vector<DeltaRecord> all_deltas(const Dataset& ds, const TimelineSet& timelines);

DeltaHistogram aggregate_histogram(std::vector<DeltaRecord> records,
                                   std::optional<Interval> window = std::nullopt);

/// Bin-wise sum; memberships are concatenated and canonically re-sorted.
DeltaHistogram merge_histograms(const DeltaHistogram& a, const DeltaHistogram& b);

/// degree -> number of wallets with that degree, over the undirected simple
/// graph of counterparties (parallel edges collapse, self-loops ignored).
/// Wallets of degree zero are not listed.
std::map<uint32_t, uint64_t> degree_distribution(const Dataset& ds);

}  // namespace botdet
