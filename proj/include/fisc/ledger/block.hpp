#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "fisc/crypto/hash.hpp"

namespace fisc::ledger {

using Uint256 = boost::multiprecision::uint256_t;

inline const Uint256& max_target() {
    static const Uint256 kMax = ~Uint256(0);
    return kMax;
}

/// Big-endian interpretation of a 32-byte hash.
inline Uint256 hash_to_uint(const Hash256& h) {
    Uint256 v = 0;
    for (std::uint8_t b : h) v = (v << 8) | b;
    return v;
}

/// Compact "nBits" form: 1-byte exponent, 3-byte mantissa.
inline std::uint32_t target_to_compact(const Uint256& target) {
    unsigned size = static_cast<unsigned>((boost::multiprecision::msb(target | 1) + 8) / 8);
    if (target == 0) size = 0;
    std::uint32_t compact = 0;
    if (size <= 3) {
        compact = static_cast<std::uint32_t>(target << (8 * (3 - size)));
    } else {
        compact = static_cast<std::uint32_t>(target >> (8 * (size - 3)));
    }
    if (compact & 0x00800000) {
        compact >>= 8;
        ++size;
    }
    return compact | (size << 24);
}

inline Uint256 compact_to_target(std::uint32_t compact) {
    unsigned size = compact >> 24;
    Uint256 word = compact & 0x007fffff;
    if (size <= 3) return word >> (8 * (3 - size));
    if (size > 34) return max_target();
    return word << (8 * (size - 3));
}

struct BlockHeader {
    std::int32_t version = 1;
    Hash256 prev_hash{};
    Hash256 merkle_root{};
    std::uint32_t time = 0;
    Uint256 target = max_target();
    std::uint32_t nonce = 0;

    static constexpr std::size_t kSerializedSize = 80;

    /// Fixed 80-byte layout: version, prev hash, merkle root, time, compact
    /// target, nonce. Integers little-endian; hashes as stored.
    std::array<std::uint8_t, kSerializedSize> serialize() const {
        std::array<std::uint8_t, kSerializedSize> out{};
        std::size_t pos = 0;
        auto put_u32 = [&](std::uint32_t v) {
            for (int i = 0; i < 4; ++i) out[pos++] = static_cast<std::uint8_t>(v >> (8 * i));
        };
        put_u32(static_cast<std::uint32_t>(version));
        for (auto b : prev_hash) out[pos++] = b;
        for (auto b : merkle_root) out[pos++] = b;
        put_u32(time);
        put_u32(target_to_compact(target));
        put_u32(nonce);
        return out;
    }

    Hash256 id() const {
        auto bytes = serialize();
        return dsha256(bytes);
    }
};

inline Hash256 merkle_parent(const Hash256& left, const Hash256& right) {
    std::array<std::uint8_t, 64> buf{};
    std::copy(left.begin(), left.end(), buf.begin());
    std::copy(right.begin(), right.end(), buf.begin() + 32);
    return dsha256(buf);
}

/// Pairwise double-SHA256 reduction; an odd level pairs its last node with
/// itself. A single leaf is its own root.
inline Hash256 compute_merkle_root(std::span<const Hash256> tx_ids) {
    if (tx_ids.empty()) fail(Errc::empty_input, "merkle root of an empty list");
    std::vector<Hash256> level(tx_ids.begin(), tx_ids.end());
    while (level.size() > 1) {
        if (level.size() % 2 == 1) level.push_back(level.back());
        std::vector<Hash256> next;
        next.reserve(level.size() / 2);
        for (std::size_t i = 0; i < level.size(); i += 2) next.push_back(merkle_parent(level[i], level[i + 1]));
        level = std::move(next);
    }
    return level.front();
}

inline bool verify_pow(const BlockHeader& header) { return hash_to_uint(header.id()) < header.target; }

/// Smallest nonce in [0, max_iters) whose header hash falls below `target`;
/// nullopt when the range is exhausted.
inline std::optional<std::uint32_t> mine_nonce(BlockHeader prefix, const Uint256& target, std::uint64_t max_iters) {
    if (max_iters == 0) fail(Errc::invalid_argument, "max_iters must be positive");
    prefix.target = target;
    const std::uint64_t limit = std::min<std::uint64_t>(max_iters, std::uint64_t{1} << 32);
    for (std::uint64_t n = 0; n < limit; ++n) {
        prefix.nonce = static_cast<std::uint32_t>(n);
        if (verify_pow(prefix)) return prefix.nonce;
    }
    return std::nullopt;
}

}  // namespace fisc::ledger
