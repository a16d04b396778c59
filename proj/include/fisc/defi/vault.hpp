#pragma once

// Collateralized debt positions: borrowing limit, stability-fee accrual,
// the liquidation trigger and liquidation settlement.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <string>
#include <vector>

#include "fisc/core/amount.hpp"
#include "fisc/tax/event.hpp"

namespace fisc::defi {

inline const Rational kEthLiquidationRatio{3, 2};
inline const Rational kBatLiquidationRatio{7, 4};
inline constexpr std::int64_t kSecondsPerYear = 365LL * 86'400;

enum class FeeCompounding { continuous, simple };

struct PriceQuote {
    std::string asset;
    Rational unit_price;
    std::int64_t timestamp = 0;

    void validate() const {
        if (unit_price <= 0) fail(Errc::invalid_argument, "oracle price for " + asset + " must be positive");
    }
};

struct Vault {
    std::string owner;
    std::string collateral_asset = "ETH";
    Amount collateral_amount = Amount::zero(kEthDecimals);
    Amount debt = Amount::zero(18);  // stablecoin base units
    Rational liquidation_ratio = kEthLiquidationRatio;
    Rational stability_fee_rate = 0;  // annual
    std::int64_t last_accrual = 0;
    FeeCompounding compounding = FeeCompounding::continuous;
    bool closed = false;

    void validate() const {
        if (liquidation_ratio <= 1) fail(Errc::invalid_argument, "liquidation ratio must exceed 1");
        if (stability_fee_rate < 0) fail(Errc::invalid_argument, "stability fee must be non-negative");
    }

    /// Collateral value in stablecoin whole units.
    Rational collateral_value(const Rational& price) const { return to_rational(collateral_amount) * price; }
};

/// Largest debt the collateral supports, rounded down to a base unit.
inline Amount vault_max_debt(const Amount& collateral, const Rational& price, const Rational& liquidation_ratio,
                             unsigned debt_decimals = 18) {
    if (price <= 0) fail(Errc::invalid_argument, "price must be positive");
    if (liquidation_ratio <= 1) fail(Errc::invalid_argument, "liquidation ratio must exceed 1");
    Rational max_debt = to_rational(collateral) * price / liquidation_ratio;
    return Amount(narrow(floor(max_debt * Rational(pow10(debt_decimals)))), debt_decimals);
}

inline bool vault_unsafe(const Vault& v, const Rational& price) {
    if (v.debt.is_zero()) return false;
    return v.collateral_value(price) < v.liquidation_ratio * to_rational(v.debt);
}

struct AccrualResult {
    Vault vault;
    bool liquidation_flag = false;
};

/// Grows debt by the stability fee since the last accrual (rounded up in
/// base units) and checks the collateral ratio at `price`. A vault sitting
/// exactly at its ratio is safe.
inline AccrualResult vault_accrue_and_check(Vault v, std::int64_t now, const Rational& price) {
    v.validate();
    if (price <= 0) fail(Errc::invalid_argument, "price must be positive");
    if (now < v.last_accrual) fail(Errc::time_regression, "accrual time moved backwards");
    const std::int64_t elapsed = now - v.last_accrual;
    if (elapsed > 0 && v.stability_fee_rate > 0 && !v.debt.is_zero()) {
        Rational years{BigInt(elapsed), BigInt(kSecondsPerYear)};
        Rational factor;
        if (v.compounding == FeeCompounding::simple) {
            factor = 1 + v.stability_fee_rate * years;
        } else {
            using Float = boost::multiprecision::cpp_bin_float_50;
            Float exponent = Float(v.stability_fee_rate) * Float(years);
            factor = Rational(boost::multiprecision::exp(exponent));
        }
        v.debt = Amount(narrow(ceil(Rational(BigInt(v.debt.units())) * factor)), v.debt.decimals());
    }
    v.last_accrual = now;
    return {v, vault_unsafe(v, price)};
}

/// Settlement values in stablecoin whole units. repaid + penalty + returned
/// value always equals the collateral value at the liquidation price.
struct LiquidationResult {
    Rational debt_repaid;
    Rational penalty;
    Rational returned_value;
    Rational protocol_debt;  // shortfall when collateral cannot cover debt
    Amount collateral_seized;
    Amount collateral_returned;
    Vault vault;
    std::vector<tax::ChainEventRecord> events;
};

/// Sells collateral at `price` to repay debt plus penalty_rate x debt; the
/// borrower gets the rest. Returned collateral is rounded down to a base
/// unit and the rounding dust stays with the penalty.
inline LiquidationResult liquidate_vault(const Vault& v, const Rational& price, const Rational& penalty_rate,
                                         std::uint64_t seq = 0, std::int64_t timestamp = 0) {
    v.validate();
    if (v.closed) fail(Errc::invalid_argument, "vault already closed");
    if (price <= 0) fail(Errc::invalid_argument, "price must be positive");
    if (penalty_rate < 0) fail(Errc::invalid_argument, "penalty rate must be non-negative");
    if (!vault_unsafe(v, price)) fail(Errc::healthy_vault, "vault is not below its liquidation ratio");

    const unsigned cdec = v.collateral_amount.decimals();
    const Rational value = v.collateral_value(price);
    const Rational debt = to_rational(v.debt);
    const Rational penalty = penalty_rate * debt;

    LiquidationResult r{0, 0, 0, 0, v.collateral_amount, Amount::zero(cdec), v, {}};
    if (value < debt) {
        r.debt_repaid = value;
        r.protocol_debt = debt - value;
    } else {
        r.debt_repaid = debt;
        Rational surplus = value - debt - penalty;
        if (surplus > 0) {
            Amount back(narrow(floor(surplus / price * Rational(pow10(cdec)))), cdec);
            r.collateral_returned = back;
            r.collateral_seized = v.collateral_amount - back;
            r.returned_value = to_rational(back) * price;
        }
        r.penalty = value - r.debt_repaid - r.returned_value;
    }

    r.vault.collateral_amount = Amount::zero(cdec);
    r.vault.debt = Amount::zero(v.debt.decimals());
    r.vault.closed = true;

    if (!r.collateral_seized.is_zero()) {
        tax::ChainEventRecord e;
        e.seq = seq;
        e.timestamp = timestamp;
        e.kind = tax::EventKind::vault_liquidation;
        e.asset = v.collateral_asset;
        e.quantity = r.collateral_seized;
        e.fmv_unit = price;
        e.metadata["debt_repaid"] = format_rational(r.debt_repaid, v.debt.decimals());
        e.metadata["penalty"] = format_rational(r.penalty, v.debt.decimals());
        if (r.protocol_debt > 0) e.metadata["protocol_debt"] = format_rational(r.protocol_debt, v.debt.decimals());
        r.events.push_back(std::move(e));
    }
    return r;
}

}  // namespace fisc::defi
