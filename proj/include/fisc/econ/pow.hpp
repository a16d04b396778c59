#pragma once

// Proof-of-work economics: subsidy schedule, difficulty retargeting, solo
// miner expectations, pool shares and the brute-force collision horizon.

#include <cstdint>

#include "fisc/core/amount.hpp"
#include "fisc/ledger/block.hpp"

namespace fisc::econ {

using ledger::Uint256;

enum class SubsidyRounding {
    /// Each block pays floor(E(h+1)) - floor(E(h)) where E is the exact
    /// cumulative geometric issuance, so cumulative issuance never drifts
    /// more than one base unit from the exact curve.
    carry,
    /// Bitcoin consensus: initial subsidy right-shifted once per era.
    per_block_truncate,
};

struct RewardSchedule {
    Amount initial_subsidy = Amount(Int(50) * Int(100'000'000), kBtcDecimals);
    std::uint64_t halving_interval_blocks = 210'000;
    Amount supply_cap = Amount(Int(21'000'000) * Int(100'000'000), kBtcDecimals);
    SubsidyRounding rounding = SubsidyRounding::carry;

    void validate() const {
        if (halving_interval_blocks == 0) fail(Errc::invalid_argument, "halving interval must be positive");
        if (initial_subsidy.decimals() != supply_cap.decimals())
            fail(Errc::decimals_mismatch, "subsidy and cap use different decimals");
        // Geometric sum over all eras: 2 x initial x interval.
        BigInt ceiling = BigInt(initial_subsidy.units()) * halving_interval_blocks * 2;
        if (ceiling > BigInt(supply_cap.units()))
            fail(Errc::invalid_argument, "schedule would exceed the supply cap");
    }
};

namespace detail {

/// floor of exact issuance over blocks [0, height).
inline BigInt floor_cumulative_issuance(std::uint64_t height, const RewardSchedule& s) {
    const BigInt subsidy = BigInt(s.initial_subsidy.units());
    const std::uint64_t era = height / s.halving_interval_blocks;
    const std::uint64_t pos = height % s.halving_interval_blocks;
    if (era > 4096) return subsidy * s.halving_interval_blocks * 2 - 1;
    // E * 2^era = S*I*(2^(era+1) - 2) + pos*S
    BigInt scale = BigInt(1) << era;
    BigInt numer = subsidy * s.halving_interval_blocks * (2 * scale - 2) + subsidy * pos;
    return numer / scale;
}

}  // namespace detail

inline Amount block_subsidy(std::uint64_t height, const RewardSchedule& schedule = {}) {
    if (schedule.halving_interval_blocks == 0) fail(Errc::invalid_argument, "halving interval must be positive");
    const unsigned dec = schedule.initial_subsidy.decimals();
    if (schedule.rounding == SubsidyRounding::per_block_truncate) {
        const std::uint64_t halvings = height / schedule.halving_interval_blocks;
        if (halvings >= 127) return Amount::zero(dec);
        return Amount(schedule.initial_subsidy.units() >> static_cast<unsigned>(halvings), dec);
    }
    BigInt diff = detail::floor_cumulative_issuance(height + 1, schedule) -
                  detail::floor_cumulative_issuance(height, schedule);
    return Amount(narrow(diff), dec);
}

/// Sum of block_subsidy over [0, height).
inline Amount cumulative_subsidy(std::uint64_t height, const RewardSchedule& schedule = {}) {
    const unsigned dec = schedule.initial_subsidy.decimals();
    if (schedule.rounding == SubsidyRounding::carry)
        return Amount(narrow(detail::floor_cumulative_issuance(height, schedule)), dec);
    BigInt total = 0;
    const std::uint64_t interval = schedule.halving_interval_blocks;
    for (std::uint64_t era = 0; era * interval < height && era < 127; ++era) {
        std::uint64_t blocks = std::min(interval, height - era * interval);
        total += BigInt(schedule.initial_subsidy.units() >> static_cast<unsigned>(era)) * blocks;
    }
    return Amount(narrow(total), dec);
}

struct IssuanceSummary {
    Amount total;
    std::uint64_t era_count = 0;  // eras that issue at least one base unit
};

/// Total issuance across every era that pays anything.
inline IssuanceSummary total_issuance(const RewardSchedule& schedule = {}) {
    schedule.validate();
    const std::uint64_t interval = schedule.halving_interval_blocks;
    const BigInt subsidy = BigInt(schedule.initial_subsidy.units());
    IssuanceSummary out{Amount::zero(schedule.initial_subsidy.decimals()), 0};
    if (schedule.rounding == SubsidyRounding::per_block_truncate) {
        for (std::uint64_t era = 0; (subsidy >> era) > 0; ++era) out.era_count = era + 1;
        out.total = cumulative_subsidy(out.era_count * interval, schedule);
        return out;
    }
    // Exact issuance approaches 2*S*I from below, so its floor tops out one
    // base unit short.
    const BigInt final_total = subsidy * interval * 2 - 1;
    BigInt before = 0;
    for (std::uint64_t era = 0; before < final_total; ++era) {
        BigInt after = detail::floor_cumulative_issuance((era + 1) * interval, schedule);
        if (after > before) out.era_count = era + 1;
        before = after;
    }
    out.total = Amount(narrow(before), schedule.initial_subsidy.decimals());
    return out;
}

struct RetargetRule {
    std::uint64_t window_blocks = 2016;
    std::uint64_t target_block_interval_seconds = 600;
    Rational clamp_factor = 4;

    std::uint64_t expected_timespan() const { return window_blocks * target_block_interval_seconds; }
};

/// new = old x actual / expected, clamped to [old/clamp, old*clamp] and to
/// the maximum representable target. Lower target means higher difficulty.
inline Uint256 retarget_difficulty(const Uint256& old_target, std::int64_t actual_timespan_seconds,
                                   const RetargetRule& rule = {}) {
    if (actual_timespan_seconds <= 0) fail(Errc::non_positive_timespan, "timespan must be positive");
    if (rule.window_blocks == 0 || rule.target_block_interval_seconds == 0)
        fail(Errc::invalid_argument, "retarget window and interval must be positive");
    if (rule.clamp_factor < 1) fail(Errc::invalid_argument, "clamp factor must be >= 1");

    const BigInt old_v = BigInt(old_target);
    BigInt next = old_v * actual_timespan_seconds / rule.expected_timespan();
    const BigInt lo = floor(Rational(old_v) / rule.clamp_factor);
    const BigInt hi = floor(Rational(old_v) * rule.clamp_factor);
    if (next < lo) next = lo;
    if (next > hi) next = hi;
    if (next > BigInt(ledger::max_target())) next = BigInt(ledger::max_target());
    return Uint256(next);
}

struct MiningExpectation {
    Rational expected_blocks;
    Rational expected_weeks;
};

/// A miner with `hash_share` of network power expects one block in
/// 1/hash_share blocks; at the rule's block interval that is a wait in weeks.
inline MiningExpectation mining_expectation(const Rational& hash_share, const RetargetRule& rule = {}) {
    if (hash_share <= 0) fail(Errc::zero_share, "hash share must be positive");
    if (hash_share > 1) fail(Errc::invalid_argument, "hash share cannot exceed 1");
    Rational blocks = 1 / hash_share;
    Rational weeks = blocks * Rational(rule.target_block_interval_seconds) / Rational(7 * 24 * 3600);
    return {blocks, weeks};
}

/// Expected years to find a SHA-256 collision by brute force: 2^128 hashes
/// at `hashes_per_second`, with 365-day years.
inline double collision_time_years(const BigInt& hashes_per_second) {
    if (hashes_per_second <= 0) fail(Errc::zero_rate, "hash rate must be positive");
    Rational years(BigInt(1) << 128, hashes_per_second * 365 * 86400);
    return static_cast<double>(years);
}

/// Pool share acceptance: hash below k x network target. Any full block
/// solution is also a share.
inline bool pool_share_valid(const ledger::BlockHeader& header, const Uint256& network_target, std::uint64_t k) {
    if (k < 1) fail(Errc::invalid_argument, "share multiplier must be >= 1");
    BigInt share_target = BigInt(network_target) * k;
    return BigInt(ledger::hash_to_uint(header.id())) < share_target;
}

inline bool is_block_solution(const ledger::BlockHeader& header, const Uint256& network_target) {
    return ledger::hash_to_uint(header.id()) < network_target;
}

}  // namespace fisc::econ
