#include "botdet/attribution.hpp"

#include <algorithm>
#include <unordered_map>

namespace botdet {

double PropertyShares::max_share() const {
    return std::max({same_value_share, same_destination_share, same_source_share});
}

namespace {

struct WeiHash {
    size_t operator()(Wei v) const {
        const uint64_t lo = static_cast<uint64_t>(v);
        const uint64_t hi = static_cast<uint64_t>(v >> 64);
        return std::hash<uint64_t>{}(lo ^ (hi * 0x9e3779b97f4a7c15ULL));
    }
};

}  // namespace

PropertyShares score_properties(const std::vector<DeltaRecord>& records, const Dataset& ds) {
    if (records.empty()) throw std::invalid_argument("score_properties: no records");
    PropertyShares out;

    std::unordered_map<Wei, uint64_t, WeiHash> by_value;
    std::unordered_map<WalletId, uint64_t> by_dest;
    std::unordered_map<WalletId, uint64_t> by_source;
    uint64_t dest_population = 0;
    for (const auto& r : records) {
        if (r.current_tx >= ds.size()) {
            throw std::invalid_argument("score_properties: record references unknown transaction");
        }
        const Transaction& tx = ds.tx(r.current_tx);
        ++by_value[tx.value];
        ++by_source[ds.from_id(r.current_tx)];
        const WalletId dest = ds.to_id(r.current_tx);
        if (dest != kNoWallet) {
            ++by_dest[dest];
            ++dest_population;
        }
    }

    const double n = static_cast<double>(records.size());
    {
        Wei best_value = 0;
        uint64_t best = 0;
        for (const auto& [v, c] : by_value) {
            if (c > best || (c == best && v < best_value)) {
                best = c;
                best_value = v;
            }
        }
        out.same_value_share = static_cast<double>(best) / n;
        out.dominant_value = best_value;
    }
    auto pick_wallet = [&](const std::unordered_map<WalletId, uint64_t>& freqs,
                           uint64_t population) -> std::pair<double, std::optional<std::string>> {
        if (population == 0) return {0.0, std::nullopt};
        WalletId best_id = kNoWallet;
        uint64_t best = 0;
        for (const auto& [w, c] : freqs) {
            // wallet ids are in address order, so smaller id = smaller address
            if (c > best || (c == best && w < best_id)) {
                best = c;
                best_id = w;
            }
        }
        return {static_cast<double>(best) / static_cast<double>(population),
                ds.wallet_name(best_id)};
    };
    std::tie(out.same_destination_share, out.dominant_destination) =
        pick_wallet(by_dest, dest_population);
    std::tie(out.same_source_share, out.dominant_source) = pick_wallet(by_source, records.size());
    return out;
}

SpikeCluster extract_cluster(const Spike& spike, const DeltaHistogram& histogram,
                             const Dataset& ds) {
    auto it = histogram.membership.find(spike.delta_minutes);
    if (it == histogram.membership.end() || it->second.empty()) {
        throw std::invalid_argument("extract_cluster: histogram has no membership for bin " +
                                    std::to_string(spike.delta_minutes));
    }
    SpikeCluster cluster;
    cluster.delta_minutes = spike.delta_minutes;
    cluster.records = it->second;
    for (const auto& r : cluster.records) cluster.wallets.insert(r.wallet);
    cluster.shares = score_properties(cluster.records, ds);
    return cluster;
}

BotReport build_report(const std::vector<SpikeClassification>& classifications,
                       const std::vector<SpikeCluster>& clusters, const Dataset& ds,
                       const ReportParams& params) {
    if (classifications.size() != clusters.size()) {
        throw std::invalid_argument("build_report: classifications and clusters must pair up");
    }
    BotReport report;
    for (size_t i = 0; i < clusters.size(); ++i) {
        const SpikeCluster& cluster = clusters[i];
        const SpikeClassification& cls = classifications[i];
        if (cluster.delta_minutes != cls.spike.delta_minutes) {
            throw std::invalid_argument("build_report: cluster/classification bin mismatch");
        }
        std::unordered_map<WalletId, uint64_t> counts;
        for (const auto& r : cluster.records) ++counts[r.wallet];

        const bool shared_value = cluster.shares.same_value_share >= params.min_property_share;
        const bool shared_counterparty =
            std::max(cluster.shares.same_destination_share, cluster.shares.same_source_share) >=
            params.min_property_share;
        const bool property_ok = shared_value || shared_counterparty;

        for (const auto& [wallet, n_records] : counts) {
            WalletEvidence& entry = report.wallets[ds.wallet_name(wallet)];
            entry.spike_memberships.push_back(
                SpikeMembership{cluster.delta_minutes, cls.kind, n_records});
            if (n_records >= params.min_records_per_wallet && property_ok) {
                switch (cls.kind) {
                    case AnomalyKind::periodic:
                        entry.evidence.push_back("periodic-spike-membership");
                        break;
                    case AnomalyKind::irregular:
                        entry.evidence.push_back("irregular-spike-membership");
                        break;
                    case AnomalyKind::unclassifiable:
                        entry.evidence.push_back("spike-membership");
                        break;
                }
                if (shared_value) entry.evidence.push_back("shared-value");
                if (shared_counterparty) entry.evidence.push_back("shared-counterparty");
                entry.flagged = true;
            }
        }
    }
    for (auto& [wallet, entry] : report.wallets) {
        std::sort(entry.spike_memberships.begin(), entry.spike_memberships.end(),
                  [](const SpikeMembership& a, const SpikeMembership& b) {
                      return a.delta_minutes < b.delta_minutes;
                  });
        std::sort(entry.evidence.begin(), entry.evidence.end());
        entry.evidence.erase(std::unique(entry.evidence.begin(), entry.evidence.end()),
                             entry.evidence.end());
        if (entry.flagged) ++report.flagged_count;
    }
    return report;
}

}  // namespace botdet
