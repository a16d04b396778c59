#pragma once

#include <vector>

#include "fisc/core/amount.hpp"

namespace fisc::econ {

/// Payment flows around one builder-produced block, all in wei.
struct MevBlockAccounting {
    Amount block_reward_to_builder = Amount::zero(kEthDecimals);
    std::vector<Amount> searcher_payments;
    Amount proposer_payout = Amount::zero(kEthDecimals);
};

/// block reward + searcher payments - proposer payout. Negative when the
/// builder paid the proposer more than the block earned it.
inline SignedAmount mev_net_builder_fee(const MevBlockAccounting& acc) {
    const unsigned dec = acc.block_reward_to_builder.decimals();
    Int net = acc.block_reward_to_builder.units();
    for (const auto& p : acc.searcher_payments) {
        if (p.decimals() != dec) fail(Errc::decimals_mismatch, "searcher payment decimals differ");
        net += p.units();
    }
    if (acc.proposer_payout.decimals() != dec) fail(Errc::decimals_mismatch, "proposer payout decimals differ");
    net -= acc.proposer_payout.units();
    return SignedAmount{net, dec};
}

}  // namespace fisc::econ
