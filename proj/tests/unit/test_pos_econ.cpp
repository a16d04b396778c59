#include <gtest/gtest.h>

#include "fisc/econ/config.hpp"
#include "fisc/econ/pos.hpp"

using namespace fisc;
using namespace fisc::econ;

namespace {

AttestationVote vote(bool s, bool t, bool h, std::uint32_t delay) { return {s, t, h, delay}; }

RewardedComponents comps(bool s, bool t, bool h) { return {s, t, h}; }

}  // namespace

TEST(PosParams, Defaults) {
    PosParams p;
    EXPECT_EQ(p.slot_seconds, 12u);
    EXPECT_EQ(p.slots_per_epoch, 32u);
    EXPECT_EQ(p.epoch_seconds(), 384u);
    EXPECT_EQ(p.sync_committee_size, 512u);
    EXPECT_EQ(p.subnets, 128u);
    EXPECT_EQ(p.activation_stake, eth(32));
    EXPECT_NO_THROW(p.validate());
}

TEST(Activation, RequiresFullStake) {
    EXPECT_EQ(activate_validator("v", eth(32)).status, ValidatorStatus::active);
    EXPECT_THROW(activate_validator("v", eth(31)), Error);
}

TEST(Finality, StrictTwoThirds) {
    EXPECT_FALSE(finality_quorum(eth(2), eth(3)));
    EXPECT_TRUE(finality_quorum(Amount(eth(2).units() + 1, 18), eth(3)));
}

TEST(Issuance, SquareRootScaling) {
    for (std::uint64_t n : {1ull, 2ull, 10ull, 777ull, 10'000ull, 1'000'003ull}) {
        auto a = pos_issuance_and_return(n);
        auto b = pos_issuance_and_return(4 * n);
        EXPECT_EQ(b.annual_issuance, 2 * a.annual_issuance) << n;
        EXPECT_EQ(b.per_validator_return, a.per_validator_return / 2) << n;
    }
    PosParams p;
    p.issuance_coefficient = Rational(7, 2);
    EXPECT_EQ(pos_issuance_and_return(1, p).annual_issuance, 3.5);
    EXPECT_THROW(pos_issuance_and_return(0), Error);
}

TEST(Attestation, TableRows) {
    EXPECT_EQ(attestation_score(vote(true, true, true, 1)), comps(true, true, true));
    EXPECT_EQ(attestation_score(vote(true, false, false, 6)), comps(false, false, false));
    EXPECT_EQ(attestation_score(vote(true, true, false, 32)), comps(true, true, false));
}

TEST(Attestation, Boundaries) {
    EXPECT_EQ(attestation_score(vote(true, false, false, 5)), comps(true, false, false));
    EXPECT_EQ(attestation_score(vote(true, false, false, 6)), comps(false, false, false));
    EXPECT_EQ(attestation_score(vote(true, true, false, 33)), comps(false, false, false));
    EXPECT_EQ(attestation_score(vote(true, true, true, 2)), comps(true, true, false));
    // Head alone never counts.
    EXPECT_EQ(attestation_score(vote(false, false, true, 1)), comps(false, false, false));
    EXPECT_EQ(attestation_score(vote(true, false, true, 1)), comps(true, false, false));
    EXPECT_THROW(attestation_score(vote(true, true, true, 0)), Error);
}

TEST(Attestation, MonotoneInDelay) {
    for (int bits = 0; bits < 8; ++bits) {
        for (std::uint32_t d = 2; d <= 40; ++d) {
            auto later = attestation_score(vote(bits & 1, bits & 2, bits & 4, d));
            auto sooner = attestation_score(vote(bits & 1, bits & 2, bits & 4, d - 1));
            ASSERT_TRUE(!later.source || sooner.source);
            ASSERT_TRUE(!later.target || sooner.target);
            ASSERT_TRUE(!later.head || sooner.head);
        }
    }
}

TEST(Penalty, MissedHeadIsFree) {
    Validator v = activate_validator("a", eth(32));
    EXPECT_EQ(apply_penalty_or_slash(v, DutyEvent::missed_head).stake, eth(32));
}

TEST(Penalty, MissedSyncCostsTheReward) {
    PosParams p;
    Validator v = activate_validator("a", eth(32));
    Validator after = apply_penalty_or_slash(v, DutyEvent::missed_sync, p);
    EXPECT_EQ(after.stake + p.sync_reward, eth(32));
    EXPECT_EQ(after.status, ValidatorStatus::active);
}

TEST(Penalty, MissedSourceAndTargetUseWeights) {
    PosParams p;
    Validator v = activate_validator("a", eth(32));
    EXPECT_EQ(eth(32) - apply_penalty_or_slash(v, DutyEvent::missed_source, p).stake, gwei(3'500));
    EXPECT_EQ(eth(32) - apply_penalty_or_slash(v, DutyEvent::missed_target, p).stake, gwei(6'500));
}

TEST(Slashing, DoubleVote) {
    ValidatorSet set;
    set.add(activate_validator("a", eth(32)));
    set.add(activate_validator("b", eth(32)));
    const Validator& a = set.apply("a", DutyEvent::double_vote);
    EXPECT_EQ(a.status, ValidatorStatus::slashed);
    EXPECT_EQ(a.stake, eth(31));
    EXPECT_EQ(set.active_ids(), std::vector<std::string>{"b"});
    EXPECT_EQ(set.active_stake(), eth(32));
    try {
        set.apply("a", DutyEvent::missed_head);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::validator_slashed);
    }
}

TEST(Slashing, NeverRewardedAgain) {
    ValidatorSet set;
    set.add(activate_validator("a", eth(32)));
    set.apply("a", DutyEvent::double_proposal);
    Amount before = set.get("a").stake;
    EXPECT_TRUE(set.credit("a", comps(true, true, true)).is_zero());
    EXPECT_EQ(set.get("a").stake, before);
}

TEST(Rewards, WeightedByComponents) {
    PosParams p;
    Validator v = activate_validator("a", eth(32));
    EXPECT_EQ(attestation_reward(v, comps(true, true, true), p), gwei(13'500));
    EXPECT_EQ(attestation_reward(v, comps(true, false, false), p), gwei(3'500));
    EXPECT_TRUE(attestation_reward(v, {}, p).is_zero());
}

TEST(InactivityLeak, MoreThanFourEpochs) {
    EXPECT_FALSE(inactivity_leak_active(0));
    EXPECT_FALSE(inactivity_leak_active(4));
    EXPECT_TRUE(inactivity_leak_active(5));
}

TEST(PosConfig, Overrides) {
    auto cfg = KeyValueConfig::parse("base_reward = 0.00002\nslash_fraction = 1/64\nsync_reward = 0.000002\n", "pos.cfg");
    PosParams p = load_pos_params(cfg);
    EXPECT_EQ(p.base_reward, gwei(20'000));
    EXPECT_EQ(p.slash_fraction, Rational(1, 64));
    Validator v = activate_validator("a", eth(32));
    EXPECT_EQ(apply_penalty_or_slash(v, DutyEvent::double_vote, p).stake, eth(32) - Amount::parse("0.5", 18));
}

TEST(PosConfig, RejectsBadFraction) {
    auto cfg = KeyValueConfig::parse("slash_fraction = 3/2\n", "pos.cfg");
    EXPECT_THROW(load_pos_params(cfg), Error);
}
