#pragma once

// Proof-of-stake validator economics: issuance scaling, attestation
// timeliness, penalties, slashing and the inactivity leak.

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fisc/core/amount.hpp"

namespace fisc::econ {

inline Amount eth(long long whole) { return Amount(Int(whole) * Int(BigInt(pow10(kEthDecimals))), kEthDecimals); }
inline Amount gwei(long long n) { return Amount(Int(n) * Int(1'000'000'000), kEthDecimals); }

struct PosParams {
    std::uint32_t slot_seconds = 12;
    std::uint32_t slots_per_epoch = 32;
    std::uint32_t sync_committee_size = 512;
    std::uint32_t sync_committee_period_epochs = 256;
    std::uint32_t subnets = 128;
    std::uint32_t inactivity_leak_epochs = 4;
    Amount activation_stake = eth(32);

    /// annual issuance = issuance_coefficient * sqrt(N)
    Rational issuance_coefficient = 1;
    /// per-validator annual return = return_coefficient / sqrt(N)
    Rational return_coefficient = 1;

    // Duty rewards are fractions of base_reward; missed source/target duties
    // cost the same fraction, a missed head vote costs nothing.
    Amount base_reward = gwei(16'000);
    Rational source_weight{14, 64};
    Rational target_weight{26, 64};
    Rational head_weight{14, 64};
    Amount sync_reward = gwei(1'000);
    Rational slash_fraction{1, 32};

    void validate() const {
        if (slot_seconds == 0 || slots_per_epoch == 0 || sync_committee_size == 0 ||
            sync_committee_period_epochs == 0 || subnets == 0 || inactivity_leak_epochs == 0)
            fail(Errc::invalid_argument, "PoS parameters must be positive");
        if (issuance_coefficient <= 0 || return_coefficient <= 0)
            fail(Errc::invalid_argument, "issuance coefficients must be positive");
        if (slash_fraction <= 0 || slash_fraction > 1) fail(Errc::invalid_argument, "slash fraction must be in (0,1]");
    }

    std::uint64_t epoch_seconds() const { return std::uint64_t{slot_seconds} * slots_per_epoch; }
};

/// Finality needs strictly more than two thirds of active stake.
inline bool finality_quorum(const Amount& voting_stake, const Amount& active_stake) {
    return BigInt(voting_stake.units()) * 3 > BigInt(active_stake.units()) * 2;
}

struct IssuanceAndReturn {
    double annual_issuance = 0;
    double per_validator_return = 0;
};

/// Issuance grows with sqrt(N) while each validator's return shrinks with
/// 1/sqrt(N). sqrt(4N) == 2*sqrt(N) holds bit-exactly in IEEE doubles, so the
/// scaling ratios come out exact.
inline IssuanceAndReturn pos_issuance_and_return(std::uint64_t validator_count, const PosParams& params = {}) {
    if (validator_count < 1) fail(Errc::invalid_argument, "validator count must be >= 1");
    const double root = std::sqrt(static_cast<double>(validator_count));
    return {static_cast<double>(params.issuance_coefficient) * root,
            static_cast<double>(params.return_coefficient) / root};
}

struct AttestationVote {
    bool source_correct = false;
    bool target_correct = false;
    bool head_correct = false;
    std::uint32_t inclusion_delay = 1;  // slots
};

struct RewardedComponents {
    bool source = false;
    bool target = false;
    bool head = false;

    bool empty() const { return !source && !target && !head; }
    friend bool operator==(const RewardedComponents&, const RewardedComponents&) = default;
};

/// Timeliness tiers: correct source within 5 slots; correct source and
/// target within 32; correct source, target and head within 1.
inline RewardedComponents attestation_score(const AttestationVote& v) {
    if (v.inclusion_delay < 1) fail(Errc::invalid_argument, "inclusion delay must be >= 1");
    RewardedComponents r;
    if (v.source_correct && v.target_correct && v.inclusion_delay <= 32) {
        r.source = true;
        r.target = true;
    } else if (v.source_correct && v.inclusion_delay <= 5) {
        r.source = true;
    }
    r.head = v.source_correct && v.target_correct && v.head_correct && v.inclusion_delay <= 1;
    return r;
}

enum class ValidatorStatus { active, exiting, slashed };

struct Validator {
    std::string id;
    Amount stake = eth(32);
    bool effective = true;
    ValidatorStatus status = ValidatorStatus::active;
};

inline Validator activate_validator(std::string id, const Amount& deposit, const PosParams& params = {}) {
    if (deposit < params.activation_stake)
        fail(Errc::invalid_argument, "deposit below the activation stake of " + params.activation_stake.to_string());
    return Validator{std::move(id), deposit, true, ValidatorStatus::active};
}

enum class DutyEvent { missed_source, missed_target, missed_head, missed_sync, double_proposal, double_vote };

inline bool is_slashable(DutyEvent e) { return e == DutyEvent::double_proposal || e == DutyEvent::double_vote; }

namespace detail {

inline Amount fraction_of(const Amount& a, const Rational& f) {
    return Amount(narrow(floor(Rational(BigInt(a.units())) * f)), a.decimals());
}

inline Amount saturating_sub(const Amount& a, const Amount& b) { return b > a ? Amount::zero(a.decimals()) : a - b; }

}  // namespace detail

/// Deduction a duty event costs the validator (before clamping to stake).
inline Amount penalty_for(const Validator& v, DutyEvent event, const PosParams& params = {}) {
    switch (event) {
        case DutyEvent::missed_source: return detail::fraction_of(params.base_reward, params.source_weight);
        case DutyEvent::missed_target: return detail::fraction_of(params.base_reward, params.target_weight);
        case DutyEvent::missed_head: return Amount::zero(v.stake.decimals());
        case DutyEvent::missed_sync: return params.sync_reward;
        case DutyEvent::double_proposal:
        case DutyEvent::double_vote: return detail::fraction_of(v.stake, params.slash_fraction);
    }
    return Amount::zero(v.stake.decimals());
}

inline Validator apply_penalty_or_slash(Validator v, DutyEvent event, const PosParams& params = {}) {
    if (v.status == ValidatorStatus::slashed) fail(Errc::validator_slashed, "validator " + v.id + " is slashed");
    if (v.status != ValidatorStatus::active) fail(Errc::invalid_argument, "validator " + v.id + " is not active");
    v.stake = detail::saturating_sub(v.stake, penalty_for(v, event, params));
    if (is_slashable(event)) {
        v.status = ValidatorStatus::slashed;
        v.effective = false;
    }
    return v;
}

/// Reward for the components an attestation earned. Slashed or ineffective
/// validators earn nothing.
inline Amount attestation_reward(const Validator& v, const RewardedComponents& c, const PosParams& params = {}) {
    Amount zero = Amount::zero(params.base_reward.decimals());
    if (v.status == ValidatorStatus::slashed || !v.effective) return zero;
    Rational weight = 0;
    if (c.source) weight += params.source_weight;
    if (c.target) weight += params.target_weight;
    if (c.head) weight += params.head_weight;
    return detail::fraction_of(params.base_reward, weight);
}

inline bool inactivity_leak_active(std::uint64_t epochs_since_finality, const PosParams& params = {}) {
    return epochs_since_finality > params.inactivity_leak_epochs;
}

/// Validators keyed by id; slashing removes a validator from the active set
/// for good.
class ValidatorSet {
public:
    void add(Validator v) {
        std::string id = v.id;
        if (!validators_.emplace(id, std::move(v)).second) fail(Errc::invalid_argument, "duplicate validator " + id);
    }

    const Validator& get(const std::string& id) const {
        auto it = validators_.find(id);
        if (it == validators_.end()) fail(Errc::invalid_argument, "unknown validator " + id);
        return it->second;
    }

    const Validator& apply(const std::string& id, DutyEvent event, const PosParams& params = {}) {
        auto it = validators_.find(id);
        if (it == validators_.end()) fail(Errc::invalid_argument, "unknown validator " + id);
        it->second = apply_penalty_or_slash(it->second, event, params);
        return it->second;
    }

    Amount credit(const std::string& id, const RewardedComponents& c, const PosParams& params = {}) {
        auto it = validators_.find(id);
        if (it == validators_.end()) fail(Errc::invalid_argument, "unknown validator " + id);
        Amount r = attestation_reward(it->second, c, params);
        it->second.stake += r;
        return r;
    }

    std::vector<std::string> active_ids() const {
        std::vector<std::string> ids;
        for (const auto& [id, v] : validators_)
            if (v.status == ValidatorStatus::active) ids.push_back(id);
        return ids;
    }

    Amount active_stake() const {
        Amount total = Amount::zero(kEthDecimals);
        for (const auto& [id, v] : validators_)
            if (v.status == ValidatorStatus::active) total += v.stake;
        return total;
    }

    auto begin() const { return validators_.begin(); }
    auto end() const { return validators_.end(); }

private:
    std::map<std::string, Validator> validators_;
};

}  // namespace fisc::econ
