#pragma once

// Constant-product pools with full-range LP units. All reserve arithmetic
// is on integer base units; every rounding step favors the pool.

#include <cmath>
#include <string>

#include "fisc/core/amount.hpp"

namespace fisc::defi {

inline const Rational kFeeTierLow{5, 10'000};
inline const Rational kFeeTierMid{3, 1'000};
inline const Rational kFeeTierHigh{1, 100};

/// Default tolerance on the value mismatch of a two-sided deposit.
inline const Rational kDepositTolerance{1, 1'000};

enum class SwapDirection { x_to_y, y_to_x };

struct LiquidityPool {
    std::string asset_x;
    std::string asset_y;
    Amount reserve_x = Amount::zero(18);
    Amount reserve_y = Amount::zero(18);
    Rational fee_rate = kFeeTierMid;
    Int total_lp_units = 0;

    BigInt k() const { return BigInt(reserve_x.units()) * BigInt(reserve_y.units()); }
    bool live() const { return !reserve_x.is_zero() && !reserve_y.is_zero(); }

    void validate_fee() const {
        if (fee_rate < 0 || fee_rate >= 1) fail(Errc::invalid_argument, "fee rate must be in [0, 1)");
    }
};

struct SwapResult {
    Amount amount_out;
    LiquidityPool pool;
};

namespace detail {

struct Sides {
    const Amount& in_reserve;
    const Amount& out_reserve;
};

inline Sides sides(const LiquidityPool& p, SwapDirection d) {
    if (d == SwapDirection::x_to_y) return {p.reserve_x, p.reserve_y};
    return {p.reserve_y, p.reserve_x};
}

/// Exact output before rounding: r_out * e / (r_in + e), e = in * (1 - fee).
inline Rational exact_out(const LiquidityPool& p, const Amount& in, SwapDirection d) {
    auto [rin, rout] = sides(p, d);
    Rational effective = Rational(BigInt(in.units())) * (1 - p.fee_rate);
    return Rational(BigInt(rout.units())) * effective / (Rational(BigInt(rin.units())) + effective);
}

}  // namespace detail

/// Sell `amount_in` of one side, receive the other. The pool keeps the whole
/// input, fee included, so K never decreases.
inline SwapResult swap_exact_in(const LiquidityPool& pool, const Amount& amount_in,
                                SwapDirection dir = SwapDirection::x_to_y) {
    pool.validate_fee();
    if (!pool.live()) fail(Errc::pool_empty, "pool has no liquidity");
    auto [rin, rout] = detail::sides(pool, dir);
    if (amount_in.decimals() != rin.decimals()) fail(Errc::decimals_mismatch, "input decimals differ from reserve");
    if (amount_in.is_zero()) fail(Errc::zero_input, "swap input must be positive");

    Amount out(narrow(floor(detail::exact_out(pool, amount_in, dir))), rout.decimals());
    if (out.is_zero()) fail(Errc::dust_output, "swap output rounds to zero");

    SwapResult r{out, pool};
    if (dir == SwapDirection::x_to_y) {
        r.pool.reserve_x += amount_in;
        r.pool.reserve_y -= out;
    } else {
        r.pool.reserve_y += amount_in;
        r.pool.reserve_x -= out;
    }
    return r;
}

/// Effective price over marginal price, minus one. Uses the unrounded
/// output so tiny trades converge to zero instead of hitting dust.
inline Rational quote_slippage(const LiquidityPool& pool, const Amount& amount_in,
                               SwapDirection dir = SwapDirection::x_to_y) {
    pool.validate_fee();
    if (!pool.live()) fail(Errc::pool_empty, "pool has no liquidity");
    if (amount_in.is_zero()) fail(Errc::zero_input, "swap input must be positive");
    auto [rin, rout] = detail::sides(pool, dir);
    Rational effective = detail::exact_out(pool, amount_in, dir) / Rational(BigInt(amount_in.units()));
    Rational marginal(BigInt(rout.units()), BigInt(rin.units()));
    return effective / marginal - 1;
}

struct LpPosition {
    std::string owner;
    Int lp_units = 0;
    Amount x_in = Amount::zero(18);
    Amount y_in = Amount::zero(18);
    std::int64_t timestamp = 0;
};

struct AddLiquidityResult {
    LpPosition position;
    LiquidityPool pool;
};

/// Two-sided deposit at equal value. Prices are per whole unit in a common
/// currency. The first deposit mints isqrt(x * y) units; later deposits mint
/// the smaller of their two reserve shares.
inline AddLiquidityResult add_liquidity(const LiquidityPool& pool, std::string owner, const Amount& x_in,
                                        const Amount& y_in, const Rational& price_x, const Rational& price_y,
                                        std::int64_t timestamp = 0, const Rational& tolerance = kDepositTolerance) {
    if (x_in.decimals() != pool.reserve_x.decimals() || y_in.decimals() != pool.reserve_y.decimals())
        fail(Errc::decimals_mismatch, "deposit decimals differ from reserves");
    if (x_in.is_zero() || y_in.is_zero()) fail(Errc::zero_input, "both sides of a deposit must be positive");
    if (price_x <= 0 || price_y <= 0) fail(Errc::invalid_argument, "prices must be positive");

    Rational vx = to_rational(x_in) * price_x;
    Rational vy = to_rational(y_in) * price_y;
    Rational gap = vx > vy ? vx - vy : vy - vx;
    if (gap > tolerance * (vx > vy ? vx : vy))
        fail(Errc::unequal_deposit, "deposit sides differ in value by more than the tolerance");

    BigInt minted;
    if (pool.total_lp_units == 0) {
        minted = boost::multiprecision::sqrt(BigInt(x_in.units()) * BigInt(y_in.units()));
    } else {
        if (!pool.live()) fail(Errc::pool_empty, "pool has units but no reserves");
        const BigInt total = BigInt(pool.total_lp_units);
        BigInt by_x = BigInt(x_in.units()) * total / BigInt(pool.reserve_x.units());
        BigInt by_y = BigInt(y_in.units()) * total / BigInt(pool.reserve_y.units());
        minted = by_x < by_y ? by_x : by_y;
    }
    if (minted == 0) fail(Errc::dust_output, "deposit mints no LP units");

    AddLiquidityResult r{{std::move(owner), narrow(minted), x_in, y_in, timestamp}, pool};
    r.pool.reserve_x += x_in;
    r.pool.reserve_y += y_in;
    r.pool.total_lp_units = narrow(BigInt(pool.total_lp_units) + minted);
    return r;
}

struct RemoveLiquidityResult {
    Amount x_out;
    Amount y_out;
    LiquidityPool pool;
};

/// Burns the position for its pro-rata share of current reserves, fees
/// included. The last LP out receives the reserves exactly.
inline RemoveLiquidityResult remove_liquidity(const LiquidityPool& pool, const LpPosition& position) {
    if (position.lp_units <= 0) fail(Errc::invalid_argument, "position holds no units");
    if (position.lp_units > pool.total_lp_units)
        fail(Errc::over_redemption, "position redeems more units than the pool issued");
    const BigInt units = BigInt(position.lp_units);
    const BigInt total = BigInt(pool.total_lp_units);
    Amount x_out(narrow(BigInt(pool.reserve_x.units()) * units / total), pool.reserve_x.decimals());
    Amount y_out(narrow(BigInt(pool.reserve_y.units()) * units / total), pool.reserve_y.decimals());
    RemoveLiquidityResult r{x_out, y_out, pool};
    r.pool.reserve_x -= x_out;
    r.pool.reserve_y -= y_out;
    r.pool.total_lp_units -= position.lp_units;
    return r;
}

/// Value of an LP position relative to holding, for price ratio p
/// (now / at deposit): 2 sqrt(p) / (1 + p) - 1.
inline double divergence_loss(double p) {
    if (!(p > 0) || !std::isfinite(p)) fail(Errc::non_positive_ratio, "price ratio must be positive");
    return 2.0 * std::sqrt(p) / (1.0 + p) - 1.0;
}

}  // namespace fisc::defi
