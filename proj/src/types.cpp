#include "botdet/types.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace botdet {

bool wei_from_string(std::string_view s, Wei& out) {
    if (s.empty() || s.size() > 39) return false;
    Wei v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
        Wei next = v * 10 + static_cast<unsigned>(c - '0');
        if (next / 10 != v) return false;  // overflow
        v = next;
    }
    out = v;
    return true;
}

std::string wei_to_string(Wei v) {
    if (v == 0) return "0";
    char buf[40];
    int pos = 40;
    while (v > 0) {
        buf[--pos] = static_cast<char>('0' + static_cast<unsigned>(v % 10));
        v /= 10;
    }
    return std::string(buf + pos, buf + 40);
}

Dataset normalize(std::vector<Transaction> txs, const ParseStats& stats) {
    Dataset ds;
    ds.rows_read = stats.rows_read == 0 && stats.rows_skipped == 0
                       ? txs.size()
                       : stats.rows_read;
    ds.rows_skipped = stats.rows_skipped;

    // first occurrence in input order wins; kept is reserved up front so the
    // views in `seen` stay anchored to stable storage
    std::unordered_set<std::string_view> seen;
    seen.reserve(txs.size() * 2);
    std::vector<Transaction> kept;
    kept.reserve(txs.size());
    for (auto& tx : txs) {
        if (seen.contains(tx.tx_id)) {
            ++ds.duplicates_dropped;
            continue;
        }
        kept.push_back(std::move(tx));
        seen.insert(kept.back().tx_id);
    }

    std::stable_sort(kept.begin(), kept.end(), [](const Transaction& a, const Transaction& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.tx_id < b.tx_id;
    });

    std::vector<std::string> wallets;
    wallets.reserve(kept.size() * 2);
    for (const auto& tx : kept) {
        wallets.push_back(tx.from_wallet);
        if (tx.has_to()) wallets.push_back(tx.to_wallet);
    }
    std::sort(wallets.begin(), wallets.end());
    wallets.erase(std::unique(wallets.begin(), wallets.end()), wallets.end());

    std::unordered_map<std::string_view, WalletId> index;
    index.reserve(wallets.size() * 2);
    for (WalletId i = 0; i < wallets.size(); ++i) index.emplace(wallets[i], i);

    ds.from_ids_.reserve(kept.size());
    ds.to_ids_.reserve(kept.size());
    for (const auto& tx : kept) {
        ds.from_ids_.push_back(index.at(tx.from_wallet));
        ds.to_ids_.push_back(tx.has_to() ? index.at(tx.to_wallet) : kNoWallet);
    }

    if (!kept.empty()) {
        ds.span_ = Span{kept.front().timestamp, kept.back().timestamp};
    }
    ds.txs_ = std::move(kept);
    ds.wallets_ = std::move(wallets);
    return ds;
}

}  // namespace botdet
