#pragma once

// Scenario replays behind `fisc simulate`. Each runner returns its output
// files as (name, content) pairs so callers decide where they go.

#include <cstdio>
#include <random>
#include <sstream>

#include "fisc/core/json_doc.hpp"
#include "fisc/defi/amm.hpp"
#include "fisc/econ/config.hpp"
#include "fisc/econ/pos.hpp"
#include "fisc/econ/pow.hpp"
#include "fisc/ledger/block.hpp"
#include "fisc/tax/io.hpp"

namespace fisc::cli {

using OutputFiles = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline tax::Timestamp read_time(const JsonObject& o, const std::string& key, tax::Timestamp fallback) {
    if (!o.has(key)) return fallback;
    try {
        return tax::detail::parse_timestamp(o.raw(key));
    } catch (const Error& e) {
        o.error(key, e.what());
    }
}

inline Amount read_amount(const JsonObject& o, const std::string& key, unsigned decimals) {
    try {
        return Amount::parse(o.str(key), decimals);
    } catch (const Error& e) {
        o.error(key, e.what());
    }
}

inline std::string events_text(const tax::EventFile& f) {
    std::ostringstream os;
    tax::write_events(os, f);
    return os.str();
}

/// Uniform draw in [0, 1) that does not depend on the standard library's
/// distribution implementation.
inline double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

// ---------------------------------------------------------------------------
// pool
//
//   {"pool": {"asset_x": "X", "asset_y": "Y", "decimals_x": 18, "decimals_y": 18,
//             "reserve_x": "40", "reserve_y": "40", "fee": "0.3%"},
//    "prices": {"X": "1", "Y": "1"}, "start": "2021-01-01", "step_seconds": 60,
//    "ops": [{"op": "swap", "actor": "t1", "in": "10", "direction": "x_to_y"},
//            {"op": "add", "actor": "lp1", "x": "4", "y": "4"},
//            {"op": "remove", "actor": "lp1"},
//            {"op": "price", "asset": "X", "value": "2"}]}

inline OutputFiles simulate_pool(const Json& doc, const std::string& source) {
    JsonObject root(doc, source);
    JsonObject p = root.object("pool");
    defi::LiquidityPool pool;
    pool.asset_x = p.str("asset_x");
    pool.asset_y = p.str("asset_y");
    if (pool.asset_x == pool.asset_y) p.error("asset_y", "pool needs two distinct assets");
    const auto dx = static_cast<unsigned>(p.u64("decimals_x", 18));
    const auto dy = static_cast<unsigned>(p.u64("decimals_y", 18));
    if (dx > 30 || dy > 30) p.error("decimals_x", "decimals must be at most 30");
    pool.reserve_x = detail::read_amount(p, "reserve_x", dx);
    pool.reserve_y = detail::read_amount(p, "reserve_y", dy);
    pool.fee_rate = p.rational("fee", defi::kFeeTierMid);
    p.done();
    try {
        pool.validate_fee();
    } catch (const Error& e) {
        p.error("fee", e.what());
    }
    if (!pool.live()) p.error("reserve_x", "both reserves must be positive");
    pool.total_lp_units =
        narrow(boost::multiprecision::sqrt(BigInt(pool.reserve_x.units()) * BigInt(pool.reserve_y.units())));
    std::map<std::string, defi::LpPosition> positions;
    positions["genesis"] = {"genesis", pool.total_lp_units, pool.reserve_x, pool.reserve_y, 0};

    std::map<std::string, Rational> prices{{pool.asset_x, 1}, {pool.asset_y, 1}};
    if (root.has("prices")) {
        JsonObject pr = root.object("prices");
        for (const auto& k : pr.keys()) {
            if (!prices.contains(k)) pr.error(k, "not an asset of this pool");
            prices[k] = pr.rational(k);
            if (prices[k] <= 0) pr.error(k, "price must be positive");
        }
    }
    tax::Timestamp t = detail::read_time(root, "start", 0);
    const auto step = static_cast<tax::Timestamp>(root.u64("step_seconds", 60));

    tax::EventFile out;
    out.asset_decimals = {{pool.asset_x, dx}, {pool.asset_y, dy}};
    std::uint64_t seq = 0;
    auto emit = [&](tax::EventKind kind, const std::string& asset, const Amount& qty, const std::string& actor,
                    std::map<std::string, std::string> meta) {
        tax::ChainEventRecord e;
        e.seq = ++seq;
        e.timestamp = t;
        e.kind = kind;
        e.asset = asset;
        e.quantity = qty;
        e.fmv_unit = prices.at(asset);
        e.metadata = std::move(meta);
        e.metadata["actor"] = actor;
        out.events.push_back(std::move(e));
    };

    std::ostringstream swaps;
    swaps << "seq,actor,direction,amount_in,amount_out,reserve_x,reserve_y\n";
    for (const auto& op : root.objects("ops")) {
        const std::string kind = op.str("op");
        const std::string actor = op.str("actor", "trader");
        try {
            if (kind == "swap") {
                const std::string dir_s = op.str("direction", "x_to_y");
                if (dir_s != "x_to_y" && dir_s != "y_to_x") op.error("direction", "expected x_to_y or y_to_x");
                const auto dir = dir_s == "x_to_y" ? defi::SwapDirection::x_to_y : defi::SwapDirection::y_to_x;
                const bool xy = dir == defi::SwapDirection::x_to_y;
                Amount in = detail::read_amount(op, "in", xy ? dx : dy);
                auto r = defi::swap_exact_in(pool, in, dir);
                pool = r.pool;
                const std::string& from = xy ? pool.asset_x : pool.asset_y;
                const std::string& to = xy ? pool.asset_y : pool.asset_x;
                emit(tax::EventKind::swap, from, in, actor,
                     {{"to_asset", to}, {"to_qty", r.amount_out.units().str()}});
                swaps << seq << ',' << actor << ',' << dir_s << ',' << in.to_string() << ','
                      << r.amount_out.to_string() << ',' << pool.reserve_x.to_string() << ','
                      << pool.reserve_y.to_string() << '\n';
            } else if (kind == "add") {
                Amount x = detail::read_amount(op, "x", dx);
                Amount y = detail::read_amount(op, "y", dy);
                auto r = defi::add_liquidity(pool, actor, x, y, prices.at(pool.asset_x), prices.at(pool.asset_y), t);
                pool = r.pool;
                auto& pos = positions[actor];
                pos.owner = actor;
                pos.lp_units += r.position.lp_units;
                const std::string units = r.position.lp_units.str();
                emit(tax::EventKind::lp_deposit, pool.asset_x, x, actor, {{"lp_units", units}});
                emit(tax::EventKind::lp_deposit, pool.asset_y, y, actor, {{"lp_units", units}});
            } else if (kind == "remove") {
                auto it = positions.find(actor);
                if (it == positions.end() || it->second.lp_units == 0) op.error("actor", actor + " holds no position");
                auto r = defi::remove_liquidity(pool, it->second);
                pool = r.pool;
                const std::string units = it->second.lp_units.str();
                positions.erase(it);
                if (!r.x_out.is_zero())
                    emit(tax::EventKind::lp_withdrawal, pool.asset_x, r.x_out, actor, {{"lp_units", units}});
                if (!r.y_out.is_zero())
                    emit(tax::EventKind::lp_withdrawal, pool.asset_y, r.y_out, actor, {{"lp_units", units}});
            } else if (kind == "price") {
                const std::string asset = op.str("asset");
                if (!prices.contains(asset)) op.error("asset", "not an asset of this pool");
                Rational v = op.rational("value");
                if (v <= 0) op.error("value", "price must be positive");
                prices[asset] = v;
            } else {
                op.error("op", "expected swap, add, remove or price");
            }
        } catch (const Error& e) {
            if (e.code() == Errc::schema_violation) throw;
            fail(e.code(), source + ": op at seq " + std::to_string(seq + 1) + ": " + e.what());
        }
        op.done();
        t += step;
    }
    root.done();

    nlohmann::ordered_json state;
    state["asset_x"] = pool.asset_x;
    state["asset_y"] = pool.asset_y;
    state["reserve_x"] = pool.reserve_x.to_string();
    state["reserve_y"] = pool.reserve_y.to_string();
    state["k_units"] = (BigInt(pool.reserve_x.units()) * BigInt(pool.reserve_y.units())).str();
    state["fee"] = pool.fee_rate.str();
    state["total_lp_units"] = pool.total_lp_units.str();
    state["positions"] = nlohmann::ordered_json::object();
    for (const auto& [owner, pos] : positions) state["positions"][owner] = pos.lp_units.str();

    return {{"events.jsonl", detail::events_text(out)},
            {"swaps.csv", swaps.str()},
            {"pool_state.json", state.dump(2) + "\n"}};
}

// ---------------------------------------------------------------------------
// chain
//
//   {"asset": "BTC", "start_height": 209990, "blocks": 20, "start": "2012-11-28",
//    "block_seconds": [600], "bits": "1d00ffff", "fmv_unit": "12",
//    "hash_share": "0.25"}            or  "mined_heights": [209995, 210001]
//
// Block times cycle through block_seconds. Heights before start_height are
// taken to have arrived on schedule, which anchors the first retarget.

inline OutputFiles simulate_chain(const Json& doc, const std::string& source, const econ::RewardSchedule& schedule,
                                  const econ::RetargetRule& rule, std::uint64_t seed) {
    JsonObject root(doc, source);
    const std::string asset = root.str("asset", "BTC");
    const std::uint64_t start = root.u64("start_height", 0);
    const std::uint64_t count = root.u64("blocks");
    if (count > 1'000'000) root.error("blocks", "at most 1000000 blocks per run");
    tax::Timestamp t0 = detail::read_time(root, "start", 0);
    std::vector<std::uint64_t> gaps;
    for (const auto& g : root.raw("block_seconds")) {
        if (!g.is_number_unsigned() || g.get<std::uint64_t>() == 0) root.error("block_seconds", "expected positive integers");
        gaps.push_back(g.get<std::uint64_t>());
    }
    if (gaps.empty()) root.error("block_seconds", "at least one interval is required");
    std::uint32_t bits = 0x1d00ffff;
    if (root.has("bits")) {
        const std::string s = root.str("bits");
        if (s.size() != 8 || s.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos)
            root.error("bits", "expected 8 hex digits");
        bits = static_cast<std::uint32_t>(std::stoul(s, nullptr, 16));
    }
    ledger::Uint256 target = ledger::compact_to_target(bits);
    if (target == 0) root.error("bits", "target is zero");
    const Rational fmv = root.rational("fmv_unit", 0);
    std::set<std::uint64_t> mined;
    std::optional<Rational> share;
    if (root.has("mined_heights")) {
        for (const auto& h : root.raw("mined_heights")) {
            if (!h.is_number_unsigned()) root.error("mined_heights", "expected block heights");
            mined.insert(h.get<std::uint64_t>());
        }
    } else {
        share = root.rational("hash_share", 0);
        if (*share < 0 || *share > 1) root.error("hash_share", "must be in [0, 1]");
    }
    root.done();

    std::mt19937_64 rng(seed);
    const double share_d = share ? static_cast<double>(*share) : 0.0;
    const tax::Timestamp nominal = static_cast<tax::Timestamp>(rule.target_block_interval_seconds);
    std::map<std::uint64_t, tax::Timestamp> times;  // height -> timestamp
    auto time_of = [&](std::uint64_t h) {
        auto it = times.find(h);
        if (it != times.end()) return it->second;
        return t0 - static_cast<tax::Timestamp>(start - h) * nominal;
    };

    tax::EventFile out;
    out.asset_decimals = {{asset, schedule.initial_subsidy.decimals()}};
    std::ostringstream blocks;
    blocks << "height,timestamp,subsidy,bits,mined\n";
    std::uint64_t seq = 0;
    tax::Timestamp t = t0;
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t h = start + i;
        if (i > 0) t += static_cast<tax::Timestamp>(gaps[(i - 1) % gaps.size()]);
        times[h] = t;
        if (h >= rule.window_blocks && h % rule.window_blocks == 0) {
            const tax::Timestamp span = time_of(h - 1) - time_of(h - rule.window_blocks);
            target = econ::retarget_difficulty(target, span, rule);
        }
        const Amount subsidy = econ::block_subsidy(h, schedule);
        const bool ours = share ? detail::unit_draw(rng) < share_d : mined.contains(h);
        char bits_hex[9];
        std::snprintf(bits_hex, sizeof bits_hex, "%08x", ledger::target_to_compact(target));
        blocks << h << ',' << t << ',' << subsidy.to_string() << ',' << bits_hex << ',' << (ours ? 1 : 0) << '\n';
        if (ours && !subsidy.is_zero()) {
            tax::ChainEventRecord e;
            e.seq = ++seq;
            e.timestamp = t;
            e.kind = tax::EventKind::mining_reward;
            e.asset = asset;
            e.quantity = subsidy;
            e.fmv_unit = fmv;
            e.metadata = {{"height", std::to_string(h)}};
            out.events.push_back(std::move(e));
        }
        // Keep only what a future retarget can look back to.
        if (times.size() > rule.window_blocks + 2) times.erase(times.begin());
    }
    return {{"events.jsonl", detail::events_text(out)}, {"blocks.csv", blocks.str()}};
}

// ---------------------------------------------------------------------------
// validators
//
//   {"asset": "ETH", "fmv_unit": "2000", "start": "2023-01-01",
//    "validators": [{"id": "v1", "deposit": "32"}],
//    "epochs": [{"attest": [{"validator": "v1", "source": true, "target": true, "head": true, "delay": 1}],
//                "duties": [{"validator": "v2", "event": "missed_target"}]}]}

inline econ::DutyEvent parse_duty(const std::string& s) {
    static const std::pair<const char*, econ::DutyEvent> kNames[] = {
        {"missed_source", econ::DutyEvent::missed_source}, {"missed_target", econ::DutyEvent::missed_target},
        {"missed_head", econ::DutyEvent::missed_head},     {"missed_sync", econ::DutyEvent::missed_sync},
        {"double_proposal", econ::DutyEvent::double_proposal}, {"double_vote", econ::DutyEvent::double_vote}};
    for (const auto& [n, e] : kNames)
        if (s == n) return e;
    fail(Errc::schema_violation, "unknown duty event '" + s + "'");
}

inline OutputFiles simulate_validators(const Json& doc, const std::string& source, const econ::PosParams& params) {
    JsonObject root(doc, source);
    const std::string asset = root.str("asset", "ETH");
    const Rational fmv = root.rational("fmv_unit", 0);
    const tax::Timestamp t0 = detail::read_time(root, "start", 0);
    econ::ValidatorSet set;
    for (const auto& v : root.objects("validators")) {
        try {
            set.add(econ::activate_validator(v.str("id"), detail::read_amount(v, "deposit", kEthDecimals),
                                             params));
        } catch (const Error& e) {
            if (e.code() == Errc::schema_violation) throw;
            fail(e.code(), source + ": validators: " + e.what());
        }
        v.done();
    }

    tax::EventFile out;
    out.asset_decimals = {{asset, kEthDecimals}};
    std::uint64_t seq = 0;
    auto emit = [&](tax::EventKind kind, tax::Timestamp t, const Amount& qty, const std::string& id,
                    std::map<std::string, std::string> meta) {
        tax::ChainEventRecord e;
        e.seq = ++seq;
        e.timestamp = t;
        e.kind = kind;
        e.asset = asset;
        e.quantity = qty;
        e.fmv_unit = fmv;
        e.metadata = std::move(meta);
        e.metadata["validator"] = id;
        out.events.push_back(std::move(e));
    };

    std::ostringstream epochs;
    epochs << "epoch,active_stake,target_votes,finalized,inactivity_leak\n";
    std::uint64_t epoch = 0, since_final = 0;
    for (const auto& ep : root.objects("epochs")) {
        const tax::Timestamp t = t0 + static_cast<tax::Timestamp>(epoch * params.epoch_seconds());
        const Amount active_before = set.active_stake();
        Amount voting = Amount::zero(kEthDecimals);
        for (const auto& a : ep.objects("attest")) {
            econ::AttestationVote vote{a.boolean("source", false), a.boolean("target", false),
                                       a.boolean("head", false), static_cast<std::uint32_t>(a.u64("delay", 1))};
            const std::string id = a.str("validator");
            a.done();
            try {
                const auto& v = set.get(id);
                if (vote.target_correct && v.status == econ::ValidatorStatus::active) voting += v.stake;
                Amount r = set.credit(id, econ::attestation_score(vote), params);
                if (!r.is_zero()) emit(tax::EventKind::staking_reward, t, r, id, {{"epoch", std::to_string(epoch)}});
            } catch (const Error& e) {
                fail(e.code(), source + ": epoch " + std::to_string(epoch) + ": " + e.what());
            }
        }
        for (const auto& d : ep.objects("duties")) {
            const std::string id = d.str("validator");
            econ::DutyEvent event;
            try {
                event = parse_duty(d.str("event"));
            } catch (const Error& e) {
                d.error("event", e.what());
            }
            d.done();
            try {
                const Amount before = set.get(id).stake;
                const Amount after = set.apply(id, event, params).stake;
                if (before > after)
                    emit(tax::EventKind::slashing_penalty, t, before - after, id,
                         {{"epoch", std::to_string(epoch)}, {"duty", d.str("event")}});
            } catch (const Error& e) {
                fail(e.code(), source + ": epoch " + std::to_string(epoch) + ": " + e.what());
            }
        }
        ep.done();
        const bool finalized = econ::finality_quorum(voting, active_before);
        since_final = finalized ? 0 : since_final + 1;
        epochs << epoch << ',' << active_before.to_string() << ',' << voting.to_string() << ',' << (finalized ? 1 : 0)
               << ',' << (econ::inactivity_leak_active(since_final, params) ? 1 : 0) << '\n';
        ++epoch;
    }
    root.done();

    std::ostringstream vals;
    vals << "validator,stake,status\n";
    for (const auto& [id, v] : set) {
        const char* status = v.status == econ::ValidatorStatus::active    ? "active"
                             : v.status == econ::ValidatorStatus::slashed ? "slashed"
                                                                          : "exiting";
        vals << id << ',' << v.stake.to_string() << ',' << status << '\n';
    }
    return {{"events.jsonl", detail::events_text(out)}, {"epochs.csv", epochs.str()}, {"validators.csv", vals.str()}};
}

}  // namespace fisc::cli
