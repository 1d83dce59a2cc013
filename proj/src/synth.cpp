#include "botdet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "botdet/powerlaw.hpp"
#include "botdet/rng.hpp"

namespace botdet {

const char* to_string(WalletLabel label) {
    switch (label) {
        case WalletLabel::human: return "human";
        case WalletLabel::periodic_bot: return "periodic_bot";
        case WalletLabel::burst_bot: return "burst_bot";
    }
    return "?";
}

namespace {

constexpr int64_t kDay = 86400;
constexpr Wei kPayoutValue = Wei(1000000000000000000ULL);  // 1e18, shared payout amount
constexpr Wei kBurstValue = Wei(50000000000000000ULL);     // 5e16

std::string tag(const char* prefix, uint64_t n, int width) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%0*llu", prefix, width,
                  static_cast<unsigned long long>(n));
    return buf;
}

std::string hex_tx_id(uint64_t n) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%012llx", static_cast<unsigned long long>(n));
    return buf;
}

Wei dispersed_value(Rng& rng) {
    return Wei(1 + rng.below(1'000'000)) * Wei(1'000'000'000'000ULL);
}

/// Exact inverse-CDF sampler for the discrete power law. Keeps a growing
/// table of tail probabilities P(X >= x_min + i); draws binary-search it.
/// Beyond the table cap the tail is bisected analytically via zeta ratios.
class PowerLawSampler {
public:
    PowerLawSampler(double alpha, uint32_t x_min)
        : alpha_(alpha), x_min_(x_min), zeta_(hurwitz_zeta(alpha, x_min)) {
        tail_.reserve(1024);
        tail_.push_back(1.0);
    }

    uint32_t draw(Rng& rng) {
        const double u = rng.open_unit();
        while (tail_.back() >= u && tail_.size() < kMaxTable) grow_one();
        if (tail_.back() >= u) return analytic(u);
        const size_t idx =
            std::partition_point(tail_.begin(), tail_.end(), [&](double t) { return t >= u; }) -
            tail_.begin();
        return x_min_ + static_cast<uint32_t>(idx) - 1;
    }

private:
    static constexpr size_t kMaxTable = size_t(1) << 21;

    double prob(uint64_t k) const {
        return std::exp(-alpha_ * std::log(static_cast<double>(k))) / zeta_;
    }

    void grow_one() {
        const size_t i = tail_.size();
        if (i % 1024 == 0) {
            // re-anchor against a fresh zeta evaluation
            tail_.push_back(hurwitz_zeta(alpha_, x_min_ + static_cast<uint32_t>(i)) / zeta_);
        } else {
            tail_.push_back(tail_.back() - prob(x_min_ + i - 1));
        }
    }

    uint32_t analytic(double u) const {
        auto tail_cdf = [&](uint64_t k) { return hurwitz_zeta(alpha_, k) / zeta_; };
        uint64_t lo = x_min_ + kMaxTable - 1;  // tail(lo) >= u
        uint64_t hi = lo * 2;
        while (tail_cdf(hi) >= u && hi < (uint64_t(1) << 40)) {
            lo = hi;
            hi *= 2;
        }
        while (hi - lo > 1) {
            const uint64_t mid = lo + (hi - lo) / 2;
            (tail_cdf(mid) >= u ? lo : hi) = mid;
        }
        return static_cast<uint32_t>(std::min<uint64_t>(lo, UINT32_MAX));
    }

    double alpha_;
    uint32_t x_min_;
    double zeta_;
    std::vector<double> tail_;
};

}  // namespace

void SynthConfig::validate() const {
    if (span.length() <= 0) throw std::invalid_argument("synth: span is empty");
    if (humans.count > 0) {
        if (!(humans.alpha > 1.0 + kAlphaEps))
            throw std::invalid_argument("synth: humans.alpha must exceed 1");
        if (humans.x_min < 1) throw std::invalid_argument("synth: humans.x_min must be >= 1");
        if (humans.mean_events < 1)
            throw std::invalid_argument("synth: humans.mean_events must be >= 1");
    }
    if (periodic_bots.count > 0) {
        if (periodic_bots.period_minutes == 0)
            throw std::invalid_argument("synth: periodic period must be positive");
        const int64_t period_sec = int64_t(periodic_bots.period_minutes) * 60;
        if (period_sec > span.length())
            throw std::invalid_argument("synth: periodic period exceeds the span");
        if (periodic_bots.jitter_minutes * 2 >= periodic_bots.period_minutes)
            throw std::invalid_argument("synth: jitter must stay below period/2");
        if (periodic_bots.payout_destinations == 0)
            throw std::invalid_argument("synth: payout_destinations must be >= 1");
        if (periodic_bots.cadence_days_max == 0)
            throw std::invalid_argument("synth: cadence_days_max must be >= 1");
        if (int64_t(periodic_bots.cadence_days_max) * period_sec > span.length())
            throw std::invalid_argument("synth: payout cadence exceeds the span");
    }
    if (burst_bots.wallet_count > 0) {
        const int64_t burst_start = span.start + int64_t(burst_bots.burst_day) * kDay;
        if (burst_start + kDay > span.end)
            throw std::invalid_argument("synth: burst day outside the span");
        if (int64_t(burst_bots.common_gap_minutes) * 60 >= kDay)
            throw std::invalid_argument("synth: burst gap does not fit inside one day");
        if (burst_bots.common_gap_minutes == 0)
            throw std::invalid_argument("synth: burst gap must be positive");
    }
}

SynthOutput generate(const SynthConfig& config) {
    config.validate();

    std::vector<Transaction> txs;
    GroundTruth truth;
    uint64_t next_tx = 0;
    uint64_t next_sink = 0;

    auto emit = [&](int64_t ts, const std::string& from, const std::string& to, Wei value) {
        Transaction tx;
        tx.tx_id = hex_tx_id(next_tx++);
        tx.timestamp = ts;
        tx.from_wallet = from;
        tx.to_wallet = to;
        tx.value = value;
        txs.push_back(std::move(tx));
    };

    // humans: power-law renewal schedules; every payment goes to a fresh
    // counterparty so receipts never distort another schedule
    if (config.humans.count > 0) {
        PowerLawSampler sampler(config.humans.alpha, config.humans.x_min);
        for (uint32_t h = 0; h < config.humans.count; ++h) {
            Rng rng(substream_seed(config.seed, "human", h));
            const std::string wallet = tag("h", h, 6);
            truth.emplace(wallet, WalletLabel::human);
            int64_t t = config.span.start +
                        static_cast<int64_t>(rng.below(
                            std::max<uint64_t>(1, config.span.length() / 2))) +
                        static_cast<int64_t>(rng.below(60));
            for (uint32_t e = 0; e < config.humans.mean_events && t < config.span.end; ++e) {
                const std::string sink = tag("x", next_sink++, 8);
                truth.emplace(sink, WalletLabel::human);
                emit(t, wallet, sink, dispersed_value(rng));
                t += int64_t(sampler.draw(rng)) * 60;
            }
        }
    }

    // periodic bots: one payout batch per period; destination j is paid every
    // (j mod cadence_max)+1 periods, which spreads receiver-side gaps over
    // whole multiples of the period
    if (config.periodic_bots.count > 0) {
        const auto& pb = config.periodic_bots;
        const int64_t period_sec = int64_t(pb.period_minutes) * 60;
        for (uint32_t p = 0; p < pb.count; ++p) {
            Rng rng(substream_seed(config.seed, "pool", p));
            const std::string pool = tag("p", p, 4);
            truth.emplace(pool, WalletLabel::periodic_bot);
            std::vector<std::string> members(pb.payout_destinations);
            for (uint32_t j = 0; j < pb.payout_destinations; ++j) {
                members[j] = tag("m", uint64_t(p) * pb.payout_destinations + j, 6);
                truth.emplace(members[j], pb.label_destinations_as_bots
                                              ? WalletLabel::periodic_bot
                                              : WalletLabel::human);
            }
            const int64_t phase = static_cast<int64_t>(rng.below(period_sec));
            for (uint64_t k = 0;; ++k) {
                int64_t t = config.span.start + phase + int64_t(k) * period_sec;
                if (t >= config.span.end) break;
                if (pb.jitter_minutes > 0) {
                    t += rng.range(-int64_t(pb.jitter_minutes) * 60,
                                   int64_t(pb.jitter_minutes) * 60);
                }
                if (t < config.span.start || t >= config.span.end) continue;
                for (uint32_t j = 0; j < pb.payout_destinations; ++j) {
                    const uint64_t cadence = j % pb.cadence_days_max + 1;
                    const uint64_t offset = (j / pb.cadence_days_max) % cadence;
                    if (k % cadence == offset) {
                        emit(t, pool, members[j], kPayoutValue);
                    }
                }
            }
        }
    }

    // burst bots: a single pair of events exactly common_gap apart, inside
    // the burst day
    if (config.burst_bots.wallet_count > 0) {
        const auto& bb = config.burst_bots;
        const int64_t burst_start = config.span.start + int64_t(bb.burst_day) * kDay;
        const int64_t gap_sec = int64_t(bb.common_gap_minutes) * 60;
        if (bb.common_destination) truth.emplace("collector", WalletLabel::burst_bot);
        for (uint32_t w = 0; w < bb.wallet_count; ++w) {
            Rng rng(substream_seed(config.seed, "burst", w));
            const std::string wallet = tag("b", w, 6);
            truth.emplace(wallet, WalletLabel::burst_bot);
            std::string dest = "collector";
            if (!bb.common_destination) {
                dest = tag("d", w, 6);
                truth.emplace(dest, WalletLabel::human);
            }
            const Wei value = bb.common_value ? kBurstValue : dispersed_value(rng);
            const int64_t t0 =
                burst_start + static_cast<int64_t>(rng.below(kDay - gap_sec));
            emit(t0, wallet, dest, value);
            emit(t0 + gap_sec, wallet, dest, value);
            if (bb.background_events) {
                // one stray human-like event outside the burst day
                int64_t bg = config.span.start + static_cast<int64_t>(rng.below(config.span.length()));
                if (bg >= burst_start && bg < burst_start + kDay) {
                    bg = config.span.start +
                         (bg - config.span.start + kDay) % config.span.length();
                }
                const std::string sink = tag("x", next_sink++, 8);
                truth.emplace(sink, WalletLabel::human);
                emit(bg, wallet, sink, dispersed_value(rng));
            }
        }
    }

    SynthOutput out;
    out.dataset = normalize(std::move(txs));
    out.truth = std::move(truth);
    return out;
}

}  // namespace botdet
