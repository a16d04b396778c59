#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "fisc/core/amount.hpp"
#include "fisc/crypto/hash.hpp"

namespace fisc::ledger {

inline constexpr std::uint64_t kDefaultBlockWeightLimit = 4'000'000;

struct MempoolEntry {
    Hash256 txid{};
    Amount fee;
    std::uint64_t weight_units = 1;
};

namespace detail {

/// a.fee/a.weight > b.fee/b.weight, ties broken by lower txid first.
inline bool better_rate(const MempoolEntry& a, const MempoolEntry& b) {
    BigInt lhs = BigInt(a.fee.units()) * b.weight_units;
    BigInt rhs = BigInt(b.fee.units()) * a.weight_units;
    if (lhs != rhs) return lhs > rhs;
    return a.txid < b.txid;
}

}  // namespace detail

/// Greedy fee-per-weight packing: walk candidates by descending fee rate and
/// take every one that still fits. If a single admissible transaction pays
/// more than the whole greedy pick, that transaction alone is returned, which
/// bounds the result at half the optimum.
inline std::vector<MempoolEntry> build_block_template(std::span<const MempoolEntry> mempool,
                                                      std::uint64_t weight_limit = kDefaultBlockWeightLimit) {
    if (weight_limit == 0) fail(Errc::invalid_argument, "weight limit must be positive");
    std::vector<MempoolEntry> ranked(mempool.begin(), mempool.end());
    for (const auto& e : ranked)
        if (e.weight_units == 0) fail(Errc::invalid_argument, "mempool entry with zero weight");
    std::sort(ranked.begin(), ranked.end(), detail::better_rate);

    std::vector<MempoolEntry> picked;
    std::uint64_t used = 0;
    BigInt picked_fee = 0;
    const MempoolEntry* best_single = nullptr;
    for (const auto& e : ranked) {
        if (e.weight_units > weight_limit) continue;
        if (!best_single || e.fee.units() > best_single->fee.units() ||
            (e.fee.units() == best_single->fee.units() && e.txid < best_single->txid))
            best_single = &e;
        if (used + e.weight_units <= weight_limit) {
            used += e.weight_units;
            picked_fee += BigInt(e.fee.units());
            picked.push_back(e);
        }
    }
    if (best_single && BigInt(best_single->fee.units()) > picked_fee) return {*best_single};
    return picked;
}

}  // namespace fisc::ledger
