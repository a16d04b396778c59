#pragma once

#include "fisc/core/config.hpp"
#include "fisc/econ/pos.hpp"
#include "fisc/econ/pow.hpp"

namespace fisc::econ {

/// Documented keys (amounts in whole units):
///   slot_seconds, slots_per_epoch, sync_committee_size,
///   sync_committee_period_epochs, subnets, inactivity_leak_epochs,
///   activation_stake, issuance_coefficient, return_coefficient,
///   base_reward, source_weight, target_weight, head_weight, sync_reward,
///   slash_fraction
inline PosParams load_pos_params(const KeyValueConfig& cfg, PosParams p = {}) {
    cfg.read("slot_seconds", p.slot_seconds);
    cfg.read("slots_per_epoch", p.slots_per_epoch);
    cfg.read("sync_committee_size", p.sync_committee_size);
    cfg.read("sync_committee_period_epochs", p.sync_committee_period_epochs);
    cfg.read("subnets", p.subnets);
    cfg.read("inactivity_leak_epochs", p.inactivity_leak_epochs);
    cfg.read("activation_stake", p.activation_stake);
    cfg.read("issuance_coefficient", p.issuance_coefficient);
    cfg.read("return_coefficient", p.return_coefficient);
    cfg.read("base_reward", p.base_reward);
    cfg.read("source_weight", p.source_weight);
    cfg.read("target_weight", p.target_weight);
    cfg.read("head_weight", p.head_weight);
    cfg.read("sync_reward", p.sync_reward);
    cfg.read("slash_fraction", p.slash_fraction);
    p.validate();
    return p;
}

/// Keys: initial_subsidy, halving_interval_blocks, supply_cap,
/// subsidy_rounding (carry | per_block_truncate), retarget_window_blocks,
/// target_block_interval_seconds, retarget_clamp_factor.
inline RewardSchedule load_reward_schedule(const KeyValueConfig& cfg, RewardSchedule s = {}) {
    cfg.read("initial_subsidy", s.initial_subsidy);
    cfg.read("halving_interval_blocks", s.halving_interval_blocks);
    cfg.read("supply_cap", s.supply_cap);
    cfg.with("subsidy_rounding", [&](const std::string& v) {
        if (v == "carry")
            s.rounding = SubsidyRounding::carry;
        else if (v == "per_block_truncate")
            s.rounding = SubsidyRounding::per_block_truncate;
        else
            fail(Errc::parse_error, "expected carry or per_block_truncate");
    });
    s.validate();
    return s;
}

inline RetargetRule load_retarget_rule(const KeyValueConfig& cfg, RetargetRule r = {}) {
    cfg.read("retarget_window_blocks", r.window_blocks);
    cfg.read("target_block_interval_seconds", r.target_block_interval_seconds);
    cfg.read("retarget_clamp_factor", r.clamp_factor);
    if (r.window_blocks == 0 || r.target_block_interval_seconds == 0 || r.clamp_factor < 1)
        fail(Errc::schema_violation, cfg.source() + ": invalid retarget rule");
    return r;
}

}  // namespace fisc::econ
