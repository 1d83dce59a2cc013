#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace botdet {

/// Transaction value in the smallest currency unit (wei). 128 bits covers
/// the full range of on-chain amounts, which overflow uint64.
using Wei = unsigned __int128;

bool wei_from_string(std::string_view s, Wei& out);
std::string wei_to_string(Wei v);

/// Half-open time interval [start, end) in epoch seconds.
struct Interval {
    int64_t start = 0;
    int64_t end = 0;

    bool contains(int64_t t) const { return t >= start && t < end; }
    int64_t length() const { return end - start; }
    bool operator==(const Interval&) const = default;
};

/// Closed timestamp range of a dataset.
struct Span {
    int64_t t_min = 0;
    int64_t t_max = 0;
    bool operator==(const Span&) const = default;
};

/// One value transfer. to_wallet is empty for contract creations.
struct Transaction {
    std::string tx_id;
    int64_t timestamp = 0;  // epoch seconds, UTC
    std::string from_wallet;
    std::string to_wallet;  // empty = absent
    Wei value = 0;

    bool has_to() const { return !to_wallet.empty(); }
};

using WalletId = uint32_t;
inline constexpr WalletId kNoWallet = UINT32_MAX;

struct ParseStats {
    uint64_t rows_read = 0;
    uint64_t rows_skipped = 0;
};

/// Canonical in-memory dataset: transactions sorted by (timestamp, tx_id),
/// tx_ids unique, plus a sorted wallet table so the rest of the pipeline can
/// work with dense integer ids instead of address strings.
class Dataset {
public:
    Dataset() = default;

    const std::vector<Transaction>& transactions() const { return txs_; }
    const Transaction& tx(uint32_t idx) const { return txs_[idx]; }
    size_t size() const { return txs_.size(); }
    bool empty() const { return txs_.empty(); }

    /// Sorted unique addresses (senders and receivers).
    const std::vector<std::string>& wallets() const { return wallets_; }
    size_t wallet_count() const { return wallets_.size(); }
    const std::string& wallet_name(WalletId id) const { return wallets_[id]; }

    WalletId from_id(uint32_t tx_idx) const { return from_ids_[tx_idx]; }
    WalletId to_id(uint32_t tx_idx) const { return to_ids_[tx_idx]; }  // kNoWallet if absent

    std::optional<Span> span() const { return span_; }

    uint64_t rows_read = 0;
    uint64_t rows_skipped = 0;
    uint64_t duplicates_dropped = 0;

    friend Dataset normalize(std::vector<Transaction> txs, const ParseStats& stats);

private:
    std::vector<Transaction> txs_;
    std::vector<std::string> wallets_;
    std::vector<WalletId> from_ids_;
    std::vector<WalletId> to_ids_;
    std::optional<Span> span_;
};

/// Dedup by tx_id (first occurrence in input order wins), sort by
/// (timestamp, tx_id), index wallets and populate counters.
Dataset normalize(std::vector<Transaction> txs, const ParseStats& stats = {});

}  // namespace botdet
