#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "botdet/types.hpp"

namespace botdet {

enum class WalletLabel { human, periodic_bot, burst_bot };

const char* to_string(WalletLabel label);

/// wallet -> label, for every wallet the generator emitted.
using GroundTruth = std::map<std::string, WalletLabel>;

/// Seeded synthetic dataset: power-law humans, scheduled payout bots and a
/// one-day burst cohort, with labels for acceptance testing.
struct SynthConfig {
    uint64_t seed = 1;
    Interval span{0, 0};  // epoch seconds, [start, end)

    struct Humans {
        uint32_t count = 0;
        double alpha = 2.5;
        uint32_t x_min = 1;           // minutes
        uint32_t mean_events = 20;    // events per wallet
    } humans;

    struct PeriodicBots {
        uint32_t count = 0;
        uint32_t period_minutes = 1440;
        uint32_t jitter_minutes = 0;          // uniform +-jitter per payout batch
        uint32_t payout_destinations = 1;     // rotation pool size per bot
        uint32_t cadence_days_max = 1;        // destinations are paid every 1..max periods
        bool label_destinations_as_bots = false;
    } periodic_bots;

    struct BurstBots {
        uint32_t wallet_count = 0;
        uint32_t burst_day = 0;          // day index within the span
        uint32_t common_gap_minutes = 1032;
        bool common_destination = true;
        bool common_value = true;
        bool background_events = false;  // a stray event outside the burst day
    } burst_bots;

    void validate() const;  // throws std::invalid_argument
};

struct SynthOutput {
    Dataset dataset;
    GroundTruth truth;
};

SynthOutput generate(const SynthConfig& config);

}  // namespace botdet
