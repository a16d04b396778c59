#include <gtest/gtest.h>

#include <random>

#include "fisc/ledger/block.hpp"
#include "fisc/ledger/block_template.hpp"

using namespace fisc;
using namespace fisc::ledger;

namespace {

Hash256 leaf(std::string_view s) { return sha256(as_bytes(s)); }

Hash256 id_of(int n) {
    Hash256 h{};
    h[31] = static_cast<std::uint8_t>(n);
    h[30] = static_cast<std::uint8_t>(n >> 8);
    return h;
}

}  // namespace

TEST(Merkle, SingleLeafIsRoot) {
    Hash256 h = leaf("a");
    EXPECT_EQ(compute_merkle_root(std::vector{h}), h);
}

TEST(Merkle, MatchesIndependentSha256) {
    // Frozen from Python hashlib: dsha256(sha256("a") || sha256("b")).
    std::vector<Hash256> two{leaf("a"), leaf("b")};
    EXPECT_EQ(to_hex(compute_merkle_root(two)), "029fd80ca2dd66e7c527428fc148e812a9d99a5e41483f28892ef9013eee4a19");
    // Odd level duplicates the last node.
    std::vector<Hash256> three{leaf("a"), leaf("b"), leaf("c")};
    EXPECT_EQ(to_hex(compute_merkle_root(three)), "bd26024cc30d3da0b368d88e3183968d1da0f746bcb2c7e287499396f1e0267d");
}

TEST(Merkle, EmptyListIsAnError) { EXPECT_THROW(compute_merkle_root(std::vector<Hash256>{}), Error); }

TEST(Merkle, AnyBitFlipChangesRoot) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Hash256> leaves(1 + rng() % 9);
        for (auto& l : leaves)
            for (auto& b : l) b = static_cast<std::uint8_t>(rng());
        Hash256 before = compute_merkle_root(leaves);
        auto& victim = leaves[rng() % leaves.size()];
        victim[rng() % 32] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
        ASSERT_NE(compute_merkle_root(leaves), before);
    }
}

TEST(BlockHeader, SerializationMatchesGenesis) {
    BlockHeader h;
    h.version = 1;
    h.merkle_root = fixed_from_hex<32>("3ba3edfd7a7b12b27ac72c3e67768f617fc81bc3888a51323a9fb8aa4b1e5e4a");
    h.time = 1231006505;
    h.target = compact_to_target(0x1d00ffff);
    h.nonce = 2083236893;
    EXPECT_EQ(target_to_compact(h.target), 0x1d00ffffu);
    auto bytes = h.serialize();
    EXPECT_EQ(bytes.size(), 80u);
    Hash256 id = h.id();
    std::reverse(id.begin(), id.end());
    EXPECT_EQ(to_hex(id), "000000000019d6689c085ae165831e934ff763ae46a2a6c172b3f1b60a8ce26f");
}

TEST(BlockHeader, CompactRoundTripForPowersOfTwo) {
    for (unsigned e = 8; e < 255; e += 8) {
        Uint256 t = Uint256(1) << e;
        EXPECT_EQ(compact_to_target(target_to_compact(t)), t) << e;
    }
}

TEST(Pow, ExtremeTargets) {
    BlockHeader h;
    h.target = max_target();
    EXPECT_TRUE(verify_pow(h));
    h.target = 0;
    EXPECT_FALSE(verify_pow(h));
}

TEST(Pow, MineNonce) {
    BlockHeader prefix;
    prefix.time = 1700000000;
    EXPECT_EQ(mine_nonce(prefix, max_target(), 10), 0u);
    EXPECT_EQ(mine_nonce(prefix, 0, 1), std::nullopt);
    EXPECT_THROW(mine_nonce(prefix, 0, 0), Error);

    Uint256 target = Uint256(1) << 248;
    auto nonce = mine_nonce(prefix, target, 10'000);
    ASSERT_TRUE(nonce.has_value());
    prefix.target = target;
    prefix.nonce = *nonce;
    EXPECT_TRUE(verify_pow(prefix));
    // Smallest: no earlier nonce works.
    for (std::uint32_t n = 0; n < *nonce; ++n) {
        prefix.nonce = n;
        ASSERT_FALSE(verify_pow(prefix));
    }
}

TEST(BlockTemplate, SmallerTxWinsAtEqualFee) {
    std::vector<MempoolEntry> pool{{id_of(1), Amount(Int(1000), 8), 900}, {id_of(2), Amount(Int(1000), 8), 400}};
    auto t = build_block_template(pool);
    ASSERT_EQ(t.size(), 2u);
    EXPECT_EQ(t[0].weight_units, 400u);
}

TEST(BlockTemplate, EmptyMempool) { EXPECT_TRUE(build_block_template({}, 1000).empty()); }

TEST(BlockTemplate, TieBreakByTxid) {
    std::vector<MempoolEntry> pool{{id_of(7), Amount(Int(10), 8), 10}, {id_of(3), Amount(Int(10), 8), 10}};
    auto t = build_block_template(pool);
    EXPECT_EQ(t[0].txid, id_of(3));
}

TEST(BlockTemplate, FallsBackToBestSingleTransaction) {
    // Greedy takes the dense 1-weight tx and then cannot fit the big one.
    std::vector<MempoolEntry> pool{{id_of(1), Amount(Int(2), 8), 1}, {id_of(2), Amount(Int(150), 8), 100}};
    auto t = build_block_template(pool, 100);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t[0].txid, id_of(2));
}

// Brute-force knapsack oracle over <= 12 transactions.
TEST(BlockTemplate, AgainstExhaustiveKnapsack) {
    std::mt19937_64 rng(12);
    double worst_ratio = 1.0;
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<MempoolEntry> pool;
        const int n = 1 + static_cast<int>(rng() % 12);
        for (int i = 0; i < n; ++i)
            pool.push_back({id_of(i), Amount(Int(1 + rng() % 500), 8), 1 + rng() % 400});
        const std::uint64_t limit = 200 + rng() % 1200;

        auto t = build_block_template(pool, limit);
        std::uint64_t weight = 0;
        long long fee = 0;
        for (const auto& e : t) {
            weight += e.weight_units;
            fee += static_cast<long long>(e.fee.units());
        }
        ASSERT_LE(weight, limit);

        long long best = 0;
        long long best_single = 0;
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            std::uint64_t w = 0;
            long long f = 0;
            for (int i = 0; i < n; ++i)
                if (mask >> i & 1) {
                    w += pool[i].weight_units;
                    f += static_cast<long long>(pool[i].fee.units());
                }
            if (w <= limit) best = std::max(best, f);
        }
        for (const auto& e : pool)
            if (e.weight_units <= limit) best_single = std::max(best_single, static_cast<long long>(e.fee.units()));

        ASSERT_LE(fee, best);
        ASSERT_GE(fee, best_single);
        ASSERT_GE(2 * fee, best);  // greedy + best-single is a 1/2-approximation
        if (best > 0) worst_ratio = std::min(worst_ratio, static_cast<double>(fee) / best);
    }
    RecordProperty("worst_greedy_to_optimal_ratio", std::to_string(worst_ratio));
}
