#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "fisc/core/amount.hpp"

namespace fisc::ledger {

struct ForkSpec {
    std::uint64_t fork_height = 0;
    std::string parent_asset;
    std::string child_asset;
    Rational ratio = 1;  // child units per parent unit
};

/// Balances snapshotted at fork_height - 1, keyed by address text.
using Holdings = std::map<std::string, Amount>;

/// Child-chain balances credited by a hard fork: ratio x parent balance,
/// floored to the child's base unit. The parent holdings are not touched.
inline Holdings apply_hard_fork(const Holdings& parent, const ForkSpec& spec, std::optional<unsigned> child_decimals = {}) {
    if (spec.fork_height == 0) fail(Errc::invalid_argument, "fork height must be positive");
    if (spec.ratio <= 0) fail(Errc::non_positive_ratio, "fork ratio must be positive");
    Holdings child;
    for (const auto& [addr, bal] : parent) {
        unsigned dec = child_decimals.value_or(bal.decimals());
        Rational scaled = Rational(BigInt(bal.units())) * spec.ratio * Rational(pow10(dec), pow10(bal.decimals()));
        child.emplace(addr, Amount(narrow(floor(scaled)), dec));
    }
    return child;
}

}  // namespace fisc::ledger
