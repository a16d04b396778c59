#pragma once

// Lot bookkeeping and the cost-basis methods. Basis is carried as exact
// rationals in the reference currency; rounding happens only when a
// report is rendered.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fisc/core/amount.hpp"
#include "fisc/tax/event.hpp"
#include "fisc/tax/policy.hpp"

namespace fisc::tax {

struct Lot {
    std::string lot_id;
    std::string asset;
    Amount remaining_qty = Amount::zero(8);
    Rational basis = 0;  // total remaining cost
    Timestamp acquired_at = 0;
    EventKind source = EventKind::purchase;

    Rational unit_basis() const {
        if (remaining_qty.is_zero()) return 0;
        return basis / to_rational(remaining_qty);
    }
};

/// Part of one lot consumed by a disposal.
struct LotSlice {
    std::string lot_id;
    Amount qty;
    Rational basis;
    Timestamp acquired_at = 0;
};

struct DisposalResult {
    std::string asset;
    Amount qty = Amount::zero(8);
    Rational proceeds = 0;
    Rational basis = 0;
    std::vector<LotSlice> slices;

    Rational gain() const { return proceeds - basis; }
};

/// All holdings of one portfolio: lots per asset plus the state some
/// methods need (last seen prices, the global PVCT cost pool, the year
/// average used by AvgTotal).
class LotStore {
public:
    using LotList = std::vector<Lot>;

    const LotList& lots(const std::string& asset) const {
        static const LotList kEmpty;
        auto it = lots_.find(asset);
        return it == lots_.end() ? kEmpty : it->second;
    }

    const std::map<std::string, LotList>& all() const { return lots_; }
    std::map<std::string, LotList>& all_mutable() { return lots_; }

    std::optional<Amount> holding(const std::string& asset) const {
        auto it = lots_.find(asset);
        if (it == lots_.end() || it->second.empty()) return std::nullopt;
        Amount total = Amount::zero(it->second.front().remaining_qty.decimals());
        for (const auto& l : it->second) total += l.remaining_qty;
        return total;
    }

    Rational total_basis(const std::string& asset) const {
        Rational b = 0;
        for (const auto& l : lots(asset)) b += l.basis;
        return b;
    }

    void add(Lot lot) {
        if (lot.remaining_qty.is_zero()) return;
        if (pvct_mode_) {
            pvct_cost_ += lot.basis;
            lot.basis = 0;
        }
        lots_[lot.asset].push_back(std::move(lot));
    }

    void observe_price(const std::string& asset, const Rational& price) {
        if (price > 0) prices_[asset] = price;
    }

    std::optional<Rational> last_price(const std::string& asset) const {
        auto it = prices_.find(asset);
        if (it == prices_.end()) return std::nullopt;
        return it->second;
    }

    // PVCT keeps one cost pool for the whole portfolio; lots then carry
    // quantities only.
    void enable_pvct() {
        if (pvct_mode_) return;
        pvct_mode_ = true;
        for (auto& [asset, list] : lots_)
            for (auto& l : list) {
                pvct_cost_ += l.basis;
                l.basis = 0;
            }
    }
    bool pvct_mode() const { return pvct_mode_; }
    const Rational& pvct_cost() const { return pvct_cost_; }
    void set_pvct_cost(Rational c) { pvct_cost_ = std::move(c); }

    // Outside holdings that still count toward the PVCT portfolio value,
    // such as assets parked in a liquidity pool.
    void set_external_value(Rational v) { external_value_ = std::move(v); }

    /// Portfolio value at last seen prices, with `asset` priced at `price`.
    Rational portfolio_value(const std::string& asset, const Rational& price) const {
        Rational v = external_value_;
        for (const auto& [a, list] : lots_) {
            Amount qty = Amount::zero(list.empty() ? 8 : list.front().remaining_qty.decimals());
            for (const auto& l : list) qty += l.remaining_qty;
            if (qty.is_zero()) continue;
            if (a == asset) {
                v += to_rational(qty) * price;
            } else if (auto p = last_price(a)) {
                v += to_rational(qty) * *p;
            }
        }
        return v;
    }

    void set_year_average(const std::string& asset, Rational unit) { year_average_[asset] = std::move(unit); }
    void clear_year_averages() { year_average_.clear(); }
    std::optional<Rational> year_average(const std::string& asset) const {
        auto it = year_average_.find(asset);
        if (it == year_average_.end()) return std::nullopt;
        return it->second;
    }

    /// Merge every lot of `asset` into one pooled lot whose acquisition
    /// time is the quantity-weighted mean.
    void pool(const std::string& asset) {
        auto it = lots_.find(asset);
        if (it == lots_.end() || it->second.size() <= 1) return;
        auto& list = it->second;
        Lot merged{"POOL:" + asset, asset, Amount::zero(list.front().remaining_qty.decimals()), 0, 0,
                   list.front().source};
        BigInt weighted_time = 0;
        for (const auto& l : list) {
            merged.remaining_qty += l.remaining_qty;
            merged.basis += l.basis;
            weighted_time += BigInt(l.remaining_qty.units()) * l.acquired_at;
        }
        if (!merged.remaining_qty.is_zero())
            merged.acquired_at =
                static_cast<Timestamp>(floor_div(weighted_time, BigInt(merged.remaining_qty.units())));
        list.assign(1, std::move(merged));
    }

    /// Re-base every lot to the last seen price, if any.
    void rebase_to_last_prices() {
        for (auto& [asset, list] : lots_) {
            auto p = last_price(asset);
            if (!p) continue;
            for (auto& l : list) l.basis = to_rational(l.remaining_qty) * *p;
        }
    }

    /// Closes an AvgTotal year: what is left is carried at the year's
    /// average, so consumed plus remaining basis equals the pool exactly.
    void rebase_to_year_averages() {
        for (auto& [asset, list] : lots_) {
            auto avg = year_average(asset);
            if (!avg) continue;
            for (auto& l : list) l.basis = to_rational(l.remaining_qty) * *avg;
        }
    }

    void erase_empty(const std::string& asset) {
        auto it = lots_.find(asset);
        if (it == lots_.end()) return;
        std::erase_if(it->second, [](const Lot& l) { return l.remaining_qty.is_zero(); });
    }

private:
    std::map<std::string, LotList> lots_;
    std::map<std::string, Rational> prices_;
    std::map<std::string, Rational> year_average_;
    Rational pvct_cost_ = 0;
    Rational external_value_ = 0;
    bool pvct_mode_ = false;
};

namespace detail {

inline std::vector<std::string> split_ids(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

/// Lot indices in consumption order for the lot-picking methods.
inline std::vector<std::size_t> consumption_order(const LotStore::LotList& lots, AccountingMethod method,
                                                  const std::optional<std::string>& specid) {
    std::vector<std::size_t> order(lots.size());
    std::iota(order.begin(), order.end(), 0);
    auto by_time = [&](std::size_t a, std::size_t b) { return lots[a].acquired_at < lots[b].acquired_at; };
    switch (method) {
        case AccountingMethod::LIFO:
            std::stable_sort(order.begin(), order.end(), by_time);
            std::reverse(order.begin(), order.end());
            break;
        case AccountingMethod::HIFO:
            std::stable_sort(order.begin(), order.end(), by_time);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return lots[a].unit_basis() > lots[b].unit_basis();
            });
            break;
        case AccountingMethod::SpecID: {
            if (!specid || specid->empty()) fail(Errc::missing_specid, "SpecID disposal without a lot reference");
            order.clear();
            for (const auto& id : split_ids(*specid)) {
                auto it = std::find_if(lots.begin(), lots.end(), [&](const Lot& l) { return l.lot_id == id; });
                if (it == lots.end()) fail(Errc::missing_specid, "referenced lot " + id + " is not held");
                const auto idx = static_cast<std::size_t>(it - lots.begin());
                if (std::find(order.begin(), order.end(), idx) == order.end()) order.push_back(idx);
            }
            break;
        }
        default:  // FIFO and the methods that take quantities FIFO
            std::stable_sort(order.begin(), order.end(), by_time);
    }
    return order;
}

}  // namespace detail

/// Removes `qty` of `asset` from the store under `method` and prices the
/// disposal at `unit_proceeds` per whole unit.
inline DisposalResult dispose(LotStore& store, const std::string& asset, const Amount& qty,
                              const Rational& unit_proceeds, AccountingMethod method,
                              const std::optional<std::string>& specid_lot = std::nullopt) {
    if (unit_proceeds < 0) fail(Errc::invalid_argument, "proceeds must be non-negative");
    auto held = store.holding(asset);
    if (!held || held->decimals() != qty.decimals() || *held < qty)
        fail(Errc::insufficient_quantity, "disposing " + qty.to_string() + " " + asset + " but holding " +
                                              (held ? held->to_string() : std::string("nothing")));

    DisposalResult r{asset, qty, to_rational(qty) * unit_proceeds, 0, {}};
    if (qty.is_zero()) return r;

    // PVCT prices against the portfolio as it stood before the sale.
    const Rational pvct_value = store.pvct_mode() ? store.portfolio_value(asset, unit_proceeds) : Rational(0);
    const bool averaged = method == AccountingMethod::AvgMoving || method == AccountingMethod::AvgTotal;
    if (averaged) store.pool(asset);
    auto& lots = store.all_mutable().at(asset);
    const auto year_avg = method == AccountingMethod::AvgTotal ? store.year_average(asset) : std::nullopt;

    const auto order = detail::consumption_order(lots, method, specid_lot);
    Amount covered = Amount::zero(qty.decimals());
    for (std::size_t idx : order) covered += lots[idx].remaining_qty;
    if (covered < qty) fail(Errc::insufficient_quantity, "referenced lots hold less than " + qty.to_string());

    Amount left = qty;
    for (std::size_t idx : order) {
        if (left.is_zero()) break;
        Lot& lot = lots[idx];
        Amount take = std::min(left, lot.remaining_qty);
        if (take.is_zero()) continue;
        Rational slice_basis;
        if (year_avg)
            slice_basis = to_rational(take) * *year_avg;
        else if (take == lot.remaining_qty)
            slice_basis = lot.basis;
        else
            slice_basis = lot.basis * Rational(BigInt(take.units()), BigInt(lot.remaining_qty.units()));
        lot.remaining_qty -= take;
        lot.basis -= slice_basis;
        left -= take;
        r.basis += slice_basis;
        r.slices.push_back({lot.lot_id, take, slice_basis, lot.acquired_at});
    }
    if (store.pvct_mode()) {
        // Basis is the share of global acquisition cost matching the share
        // of portfolio value sold.
        Rational consumed = pvct_value > 0 ? store.pvct_cost() * r.proceeds / pvct_value : Rational(0);
        if (consumed > store.pvct_cost()) consumed = store.pvct_cost();
        store.set_pvct_cost(store.pvct_cost() - consumed);
        r.basis = consumed;
        // Spread over slices by quantity for term bookkeeping.
        for (auto& s : r.slices) s.basis = consumed * Rational(BigInt(s.qty.units()), BigInt(qty.units()));
    }
    store.erase_empty(asset);
    return r;
}

}  // namespace fisc::tax
