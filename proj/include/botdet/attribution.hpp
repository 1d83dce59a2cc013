#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "botdet/anomaly.hpp"
#include "botdet/timeline.hpp"

namespace botdet {

/// Frequency concentration of a transaction property within a cluster:
/// share = mode frequency / population, dominant = the mode itself.
struct PropertyShares {
    double same_value_share = 0.0;
    double same_destination_share = 0.0;
    double same_source_share = 0.0;
    std::optional<Wei> dominant_value;
    std::optional<std::string> dominant_destination;
    std::optional<std::string> dominant_source;

    double max_share() const;
};

/// The wallets behind one spike bin, with their property correlation.
struct SpikeCluster {
    uint32_t delta_minutes = 0;
    std::set<WalletId> wallets;
    std::vector<DeltaRecord> records;
    PropertyShares shares;
};

struct ReportParams {
    uint64_t min_records_per_wallet = 3;
    double min_property_share = 0.5;
};

struct SpikeMembership {
    uint32_t delta_minutes = 0;
    AnomalyKind kind = AnomalyKind::unclassifiable;
    uint64_t record_count = 0;
};

struct WalletEvidence {
    std::vector<SpikeMembership> spike_memberships;
    std::vector<std::string> evidence;  // satisfied rules; nonempty iff flagged
    bool flagged = false;
};

/// Per-wallet evidence for every wallet appearing in at least one cluster.
/// Wallets absent from all clusters are implicitly unflagged.
struct BotReport {
    std::map<std::string, WalletEvidence> wallets;  // keyed by address
    uint64_t flagged_count = 0;
};

/// Property shares over the CURRENT transaction of each record. Records with
/// absent to_wallet are excluded from the destination share entirely.
PropertyShares score_properties(const std::vector<DeltaRecord>& records, const Dataset& ds);

/// Assemble the cluster behind a spike from histogram membership.
/// Throws std::invalid_argument if the bin has no membership entry.
SpikeCluster extract_cluster(const Spike& spike, const DeltaHistogram& histogram,
                             const Dataset& ds);

/// Flag wallets with >= min_records_per_wallet records in some cluster whose
/// max property share reaches min_property_share.
BotReport build_report(const std::vector<SpikeClassification>& classifications,
                       const std::vector<SpikeCluster>& clusters, const Dataset& ds,
                       const ReportParams& params = {});

}  // namespace botdet
