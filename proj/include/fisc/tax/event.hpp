#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "fisc/core/amount.hpp"

namespace fisc::tax {

enum class EventKind {
    purchase,
    mining_reward,
    pool_payout,
    staking_reward,
    airdrop,
    fork_receipt,
    ico_allocation,
    nft_royalty,
    lp_deposit,
    lp_withdrawal,
    vault_liquidation,
    mev_payout,
    sale,
    swap,
    spend,
    gift,
    self_transfer,
    // Costs consumed from holdings: mining expenses, validator penalties.
    expense,
    slashing_penalty,
};

inline constexpr std::array<std::pair<EventKind, std::string_view>, 19> kEventKindNames{{
    {EventKind::purchase, "purchase"},
    {EventKind::mining_reward, "mining_reward"},
    {EventKind::pool_payout, "pool_payout"},
    {EventKind::staking_reward, "staking_reward"},
    {EventKind::airdrop, "airdrop"},
    {EventKind::fork_receipt, "fork_receipt"},
    {EventKind::ico_allocation, "ico_allocation"},
    {EventKind::nft_royalty, "nft_royalty"},
    {EventKind::lp_deposit, "lp_deposit"},
    {EventKind::lp_withdrawal, "lp_withdrawal"},
    {EventKind::vault_liquidation, "vault_liquidation"},
    {EventKind::mev_payout, "mev_payout"},
    {EventKind::sale, "sale"},
    {EventKind::swap, "swap"},
    {EventKind::spend, "spend"},
    {EventKind::gift, "gift"},
    {EventKind::self_transfer, "self_transfer"},
    {EventKind::expense, "expense"},
    {EventKind::slashing_penalty, "slashing_penalty"},
}};

inline std::string_view to_string(EventKind k) {
    for (const auto& [kind, name] : kEventKindNames)
        if (kind == k) return name;
    return "?";
}

inline EventKind parse_event_kind(std::string_view text) {
    for (const auto& [kind, name] : kEventKindNames)
        if (name == text) return kind;
    fail(Errc::unknown_kind, "unknown event kind '" + std::string(text) + "'");
}

/// Unix seconds, UTC.
using Timestamp = std::int64_t;

inline constexpr Timestamp kSecondsPerDay = 86'400;

inline std::chrono::year_month_day civil_date(Timestamp t) {
    auto days = std::chrono::floor<std::chrono::days>(std::chrono::sys_seconds{std::chrono::seconds{t}});
    return std::chrono::year_month_day{days};
}

inline std::string format_date(Timestamp t) {
    auto ymd = civil_date(t);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

inline Timestamp timestamp_of(int year, unsigned month, unsigned day) {
    std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
    if (!ymd.ok()) fail(Errc::invalid_argument, "invalid calendar date");
    return std::chrono::sys_days{ymd}.time_since_epoch().count() * kSecondsPerDay;
}

struct ChainEventRecord {
    std::uint64_t seq = 0;
    Timestamp timestamp = 0;
    EventKind kind = EventKind::purchase;
    std::string asset;
    Amount quantity = Amount::zero(8);
    Rational fmv_unit = 0;  // reference currency per whole unit
    std::optional<std::string> counterparty_address;
    std::optional<std::string> specid_lot;
    std::map<std::string, std::string> metadata;

    std::optional<std::string> meta(const std::string& key) const {
        auto it = metadata.find(key);
        if (it == metadata.end()) return std::nullopt;
        return it->second;
    }
};

}  // namespace fisc::tax
