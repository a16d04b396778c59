#pragma once

// Event ingestion and report assembly.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fisc/tax/event.hpp"
#include "fisc/tax/lots.hpp"
#include "fisc/tax/policy.hpp"

namespace fisc::tax {

struct IncomeEntry {
    std::uint64_t seq = 0;
    Timestamp timestamp = 0;
    EventKind kind = EventKind::mining_reward;
    std::string asset;
    Amount qty = Amount::zero(8);
    Rational amount = 0;
};

struct DeductionEntry {
    std::uint64_t seq = 0;
    Timestamp timestamp = 0;
    EventKind kind = EventKind::expense;
    std::string asset;
    Amount qty = Amount::zero(8);
    Rational amount = 0;
};

enum class DisposalTreatment {
    capital,    // gain or loss is taxable
    exempt,     // leaves the portfolio without a taxable gain
    forfeited,  // lost without proceeds, e.g. slashed stake
};

struct DisposalEntry {
    std::uint64_t seq = 0;
    Timestamp timestamp = 0;
    EventKind kind = EventKind::sale;
    DisposalTreatment treatment = DisposalTreatment::capital;
    DisposalResult result;
    std::optional<AttributionResult> attribution;
};

struct IngestResult {
    std::vector<IncomeEntry> income;
    std::vector<DisposalEntry> disposals;
    std::vector<DeductionEntry> deductions;
    std::vector<Lot> acquired;  // newly created lots, not returns from escrow
};

/// Everything the engine tracks for one portfolio between events.
struct Portfolio {
    LotStore lots;
    std::map<std::string, LotStore::LotList> escrow;  // assets deposited into liquidity pools
    std::map<std::string, unsigned> asset_decimals;
    Rational hobby_pending_basis = 0;
    std::optional<std::uint64_t> last_seq;
    std::optional<Timestamp> last_timestamp;
    std::optional<int> current_tax_year;

    Amount escrowed(const std::string& asset, unsigned decimals) const {
        Amount total = Amount::zero(decimals);
        auto it = escrow.find(asset);
        if (it != escrow.end())
            for (const auto& l : it->second) total += l.remaining_qty;
        return total;
    }
};

namespace detail {

/// Lot consumption without pricing. Shares the method's ordering with
/// dispose but never touches the PVCT cost pool.
inline std::vector<LotSlice> take_lots(Portfolio& pf, const std::string& asset, const Amount& qty,
                                       AccountingMethod method, const std::optional<std::string>& specid) {
    LotStore& store = pf.lots;
    const bool pvct = store.pvct_mode();
    // Reuse dispose's ordering and averaging by disposing at zero proceeds
    // with the PVCT pool parked.
    Rational parked = store.pvct_cost();
    DisposalResult r = dispose(store, asset, qty, 0, method, specid);
    if (pvct) store.set_pvct_cost(parked);
    return r.slices;
}

inline void update_external_value(Portfolio& pf) {
    Rational v = 0;
    for (const auto& [asset, list] : pf.escrow) {
        auto p = pf.lots.last_price(asset);
        if (!p) continue;
        for (const auto& l : list) v += to_rational(l.remaining_qty) * *p;
    }
    pf.lots.set_external_value(v);
}

}  // namespace detail

/// Applies one event. Acquisitions create lots (with income when policy
/// says so), disposals consume lots under `method`.
inline IngestResult ingest_event(const ChainEventRecord& ev, const JurisdictionPolicy& policy, Portfolio& pf,
                                 AccountingMethod method = AccountingMethod::FIFO) {
    if (!policy.allowed_methods.contains(method))
        fail(Errc::disallowed_method, std::string(to_string(method)) + " is not allowed under policy " + policy.name);
    if (pf.last_seq && ev.seq <= *pf.last_seq)
        fail(Errc::out_of_order, "event seq " + std::to_string(ev.seq) + " does not follow " +
                                     std::to_string(*pf.last_seq));
    if (pf.last_timestamp && ev.timestamp < *pf.last_timestamp)
        fail(Errc::out_of_order, "event " + std::to_string(ev.seq) + " moves time backwards");
    if (ev.asset.empty()) fail(Errc::schema_violation, "event " + std::to_string(ev.seq) + " has no asset");
    if (ev.quantity.is_zero() && ev.kind != EventKind::self_transfer)
        fail(Errc::invalid_argument, "event " + std::to_string(ev.seq) + " has zero quantity");
    if (ev.fmv_unit < 0) fail(Errc::invalid_argument, "fair market value must be non-negative");
    pf.asset_decimals.try_emplace(ev.asset, ev.quantity.decimals());

    if (method == AccountingMethod::PVCT) pf.lots.enable_pvct();
    const int year = policy.tax_year_of(ev.timestamp);
    if (pf.current_tax_year && year > *pf.current_tax_year && method == AccountingMethod::Periodic)
        pf.lots.rebase_to_last_prices();
    pf.current_tax_year = year;
    pf.last_seq = ev.seq;
    pf.last_timestamp = ev.timestamp;

    IngestResult out;
    const Rational value = to_rational(ev.quantity) * ev.fmv_unit;
    const std::string lot_id = ev.meta("lot_id").value_or("L" + std::to_string(ev.seq));
    std::optional<AttributionResult> attribution;
    if (auto a = ev.meta("attribution")) {
        if (*a == "affirmed")
            attribution = AttributionResult::affirmed;
        else if (*a == "unaffirmed")
            attribution = AttributionResult::unaffirmed;
        else
            fail(Errc::schema_violation, "attribution must be affirmed or unaffirmed");
    }

    auto acquire = [&](const std::string& asset, const Amount& qty, Rational basis, const std::string& id) {
        Lot lot{id, asset, qty, std::move(basis), ev.timestamp, ev.kind};
        out.acquired.push_back(lot);
        pf.lots.add(std::move(lot));
    };
    auto income = [&](const Rational& amount, const Amount& qty) {
        out.income.push_back({ev.seq, ev.timestamp, ev.kind, ev.asset, qty, amount});
    };
    auto capital = [&](DisposalTreatment treatment, const Rational& unit_proceeds) {
        if (pf.lots.pvct_mode()) detail::update_external_value(pf);
        DisposalResult r = dispose(pf.lots, ev.asset, ev.quantity, unit_proceeds, method, ev.specid_lot);
        if (treatment == DisposalTreatment::exempt) r.proceeds = r.basis;
        out.disposals.push_back({ev.seq, ev.timestamp, ev.kind, treatment, std::move(r), attribution});
    };
    auto treat_acquisition = [&](AcquisitionTreatment t) {
        if (t == AcquisitionTreatment::fmv_income) {
            income(value, ev.quantity);
            acquire(ev.asset, ev.quantity, value, lot_id);
        } else {
            acquire(ev.asset, ev.quantity, 0, lot_id);
        }
    };

    switch (ev.kind) {
        case EventKind::purchase:
        case EventKind::ico_allocation:
            pf.lots.observe_price(ev.asset, ev.fmv_unit);
            acquire(ev.asset, ev.quantity, value, lot_id);
            break;

        case EventKind::mining_reward:
        case EventKind::pool_payout:
            pf.lots.observe_price(ev.asset, ev.fmv_unit);
            if (!policy.mining_income_exempt()) {
                treat_acquisition(AcquisitionTreatment::fmv_income);
            } else if (policy.hobby_miner == HobbyMinerRule::exempt_with_cost_basis) {
                acquire(ev.asset, ev.quantity, pf.hobby_pending_basis, lot_id);
                pf.hobby_pending_basis = 0;
            } else {
                acquire(ev.asset, ev.quantity, 0, lot_id);
            }
            break;

        case EventKind::staking_reward:
        case EventKind::nft_royalty:
        case EventKind::mev_payout:
            pf.lots.observe_price(ev.asset, ev.fmv_unit);
            treat_acquisition(AcquisitionTreatment::fmv_income);
            break;

        case EventKind::airdrop:
            pf.lots.observe_price(ev.asset, ev.fmv_unit);
            treat_acquisition(policy.airdrop_treatment);
            break;

        case EventKind::fork_receipt:
            pf.lots.observe_price(ev.asset, ev.fmv_unit);
            treat_acquisition(policy.fork_treatment);
            break;

        case EventKind::sale:
        case EventKind::spend:
        case EventKind::vault_liquidation:
            pf.lots.observe_price(ev.asset, ev.fmv_unit);
            capital(DisposalTreatment::capital, ev.fmv_unit);
            break;

        case EventKind::gift:
            pf.lots.observe_price(ev.asset, ev.fmv_unit);
            capital(policy.gifts_exempt ? DisposalTreatment::exempt : DisposalTreatment::capital, ev.fmv_unit);
            break;

        case EventKind::swap: {
            auto to_asset = ev.meta("to_asset");
            auto to_qty = ev.meta("to_qty");
            if (!to_asset || !to_qty) fail(Errc::schema_violation, "swap needs to_asset and to_qty metadata");
            auto dec = pf.asset_decimals.find(*to_asset);
            if (dec == pf.asset_decimals.end())
                fail(Errc::schema_violation, "swap target " + *to_asset + " has no declared decimals");
            BigInt units;
            try {
                units = BigInt(*to_qty);
            } catch (const std::exception&) {
                fail(Errc::parse_error, "to_qty must be integer base units");
            }
            Amount received(narrow(units), dec->second);
            if (received.is_zero()) fail(Errc::invalid_argument, "swap receives nothing");
            pf.lots.observe_price(ev.asset, ev.fmv_unit);
            capital(DisposalTreatment::capital, ev.fmv_unit);
            // The received asset costs what was given up.
            pf.lots.observe_price(*to_asset, value / to_rational(received));
            acquire(*to_asset, received, value, lot_id);
            break;
        }

        case EventKind::lp_deposit:
            pf.lots.observe_price(ev.asset, ev.fmv_unit);
            if (policy.lp_deposit_is_disposal) {
                capital(DisposalTreatment::capital, ev.fmv_unit);
            } else {
                for (auto& s : detail::take_lots(pf, ev.asset, ev.quantity, method, ev.specid_lot))
                    pf.escrow[ev.asset].push_back({s.lot_id, ev.asset, s.qty, s.basis, s.acquired_at, ev.kind});
            }
            break;

        case EventKind::lp_withdrawal: {
            pf.lots.observe_price(ev.asset, ev.fmv_unit);
            if (policy.lp_deposit_is_disposal) {
                acquire(ev.asset, ev.quantity, value, lot_id);
                break;
            }
            // Escrowed lots come back with their basis; anything beyond the
            // deposit is fee income.
            Amount left = ev.quantity;
            auto& parked = pf.escrow[ev.asset];
            for (auto& l : parked) {
                if (left.is_zero()) break;
                Amount take = std::min(left, l.remaining_qty);
                Rational basis = take == l.remaining_qty
                                     ? l.basis
                                     : l.basis * Rational(BigInt(take.units()), BigInt(l.remaining_qty.units()));
                l.remaining_qty -= take;
                l.basis -= basis;
                left -= take;
                Lot back{l.lot_id, ev.asset, take, basis, l.acquired_at, l.source};
                pf.lots.add(std::move(back));
            }
            std::erase_if(parked, [](const Lot& l) { return l.remaining_qty.is_zero(); });
            if (!left.is_zero()) {
                Rational fee_value = to_rational(left) * ev.fmv_unit;
                income(fee_value, left);
                acquire(ev.asset, left, fee_value, lot_id);
            }
            break;
        }

        case EventKind::self_transfer: {
            auto held = pf.lots.holding(ev.asset);
            if (!ev.quantity.is_zero() && (!held || *held < ev.quantity))
                fail(Errc::insufficient_quantity, "self transfer exceeds holdings of " + ev.asset);
            break;
        }

        case EventKind::expense:
            if (policy.mining_income_exempt()) {
                if (policy.hobby_miner == HobbyMinerRule::exempt_with_cost_basis) pf.hobby_pending_basis += value;
            } else {
                out.deductions.push_back({ev.seq, ev.timestamp, ev.kind, ev.asset, ev.quantity, value});
            }
            break;

        case EventKind::slashing_penalty: {
            if (pf.lots.pvct_mode()) detail::update_external_value(pf);
            DisposalResult r = dispose(pf.lots, ev.asset, ev.quantity, 0, method, ev.specid_lot);
            if (policy.slashing_deductible)
                out.deductions.push_back({ev.seq, ev.timestamp, ev.kind, ev.asset, ev.quantity, r.basis});
            out.disposals.push_back({ev.seq, ev.timestamp, ev.kind, DisposalTreatment::forfeited, std::move(r), {}});
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Report

enum class LineTerm { short_term, long_term, income, deduction, exempt, forfeited };

inline std::string_view to_string(LineTerm t) {
    switch (t) {
        case LineTerm::short_term: return "short";
        case LineTerm::long_term: return "long";
        case LineTerm::income: return "income";
        case LineTerm::deduction: return "deduction";
        case LineTerm::exempt: return "exempt";
        case LineTerm::forfeited: return "forfeited";
    }
    return "?";
}

/// One CSV row. Income rows carry the income in `proceeds`; deduction rows
/// carry the deductible amount in `basis`; `gain` is non-zero only on
/// short/long rows.
struct ReportLine {
    std::uint64_t seq = 0;
    Timestamp timestamp = 0;
    EventKind kind = EventKind::sale;
    std::string asset;
    Amount qty = Amount::zero(8);
    Money proceeds;
    Money basis;
    Money gain;
    LineTerm term = LineTerm::short_term;
    int tax_year = 0;
    Money withholding;
};

struct YearTotals {
    Money ordinary_income;
    Money short_term_gain;
    Money long_term_gain;
    Money deductible_expenses;
    Money withholding;

    friend bool operator==(const YearTotals&, const YearTotals&) = default;
};

struct TaxReport {
    AccountingMethod method = AccountingMethod::FIFO;
    std::string policy_name;
    std::vector<ReportLine> lines;
    std::map<int, YearTotals> years;
    Portfolio closing;
};

namespace detail {

/// Turns exact amounts into Money so that each column's running total is
/// always the floor of the exact running total.
class CarryColumn {
public:
    Money next(const Rational& exact) {
        exact_ += exact;
        BigInt now = floor(exact_ * Rational(pow10(Money::kDecimals)));
        Money m{narrow(now - emitted_)};
        emitted_ = now;
        return m;
    }

private:
    Rational exact_ = 0;
    BigInt emitted_ = 0;
};

struct ReportBuilder {
    const JurisdictionPolicy& policy;
    TaxReport& report;
    CarryColumn proceeds, basis, income, deduction;

    void push(ReportLine line) {
        line.tax_year = policy.tax_year_of(line.timestamp);
        YearTotals& y = report.years[line.tax_year];
        switch (line.term) {
            case LineTerm::short_term: y.short_term_gain += line.gain; break;
            case LineTerm::long_term: y.long_term_gain += line.gain; break;
            case LineTerm::income: y.ordinary_income += line.proceeds; break;
            case LineTerm::deduction: y.deductible_expenses += line.basis; break;
            default: break;
        }
        y.withholding += line.withholding;
        report.lines.push_back(std::move(line));
    }

    void add(const IngestResult& r) {
        for (const auto& e : r.income)
            push({e.seq, e.timestamp, e.kind, e.asset, e.qty, income.next(e.amount), {}, {}, LineTerm::income, 0, {}});
        for (const auto& d : r.disposals) add_disposal(d);
        for (const auto& e : r.deductions)
            push({e.seq, e.timestamp, e.kind, e.asset, e.qty, {}, deduction.next(e.amount), {}, LineTerm::deduction, 0,
                  {}});
    }

    void add_disposal(const DisposalEntry& d) {
        const DisposalResult& r = d.result;
        auto withhold = [&](const Money& p) {
            return d.attribution ? withholding_amount(p, *d.attribution, policy) : Money{};
        };
        if (d.treatment != DisposalTreatment::capital) {
            LineTerm term = d.treatment == DisposalTreatment::exempt ? LineTerm::exempt : LineTerm::forfeited;
            push({d.seq, d.timestamp, d.kind, r.asset, r.qty, proceeds.next(r.proceeds), basis.next(r.basis), {},
                  term, 0, {}});
            return;
        }
        // Split by holding period; proceeds follow quantity.
        const Timestamp threshold = static_cast<Timestamp>(policy.long_term_days) * kSecondsPerDay;
        struct Part {
            Amount qty;
            Rational basis = 0;
        };
        std::optional<Part> parts[2];
        for (const auto& s : r.slices) {
            int idx = d.timestamp - s.acquired_at > threshold ? 1 : 0;
            if (!parts[idx]) parts[idx] = Part{Amount::zero(s.qty.decimals())};
            parts[idx]->qty += s.qty;
            parts[idx]->basis += s.basis;
        }
        for (int idx = 0; idx < 2; ++idx) {
            if (!parts[idx]) continue;
            Rational share(BigInt(parts[idx]->qty.units()), BigInt(r.qty.units()));
            Money p = proceeds.next(r.proceeds * share);
            Money b = basis.next(parts[idx]->basis);
            push({d.seq, d.timestamp, d.kind, r.asset, parts[idx]->qty, p, b, p - b,
                  idx ? LineTerm::long_term : LineTerm::short_term, 0, withhold(p)});
        }
    }
};

}  // namespace detail

/// Replays events in order and aggregates per tax year. AvgTotal makes two
/// passes over each year: a dry run to learn the year's acquisitions, then
/// the real run pricing every disposal at the year's average.
inline TaxReport compute_report(const std::vector<ChainEventRecord>& events, const JurisdictionPolicy& policy,
                                AccountingMethod method, const std::map<std::string, unsigned>& asset_decimals = {}) {
    policy.validate();
    if (!policy.allowed_methods.contains(method))
        fail(Errc::disallowed_method, std::string(to_string(method)) + " is not allowed under policy " + policy.name);

    TaxReport report;
    report.method = method;
    report.policy_name = policy.name;
    Portfolio& pf = report.closing;
    pf.asset_decimals = asset_decimals;
    detail::ReportBuilder builder{policy, report, {}, {}, {}, {}};

    std::size_t i = 0;
    while (i < events.size()) {
        const int year = policy.tax_year_of(events[i].timestamp);
        std::size_t end = i;
        while (end < events.size() && policy.tax_year_of(events[end].timestamp) == year) ++end;

        if (method == AccountingMethod::AvgTotal) {
            pf.lots.clear_year_averages();
            Portfolio dry = pf;
            std::map<std::string, std::pair<Rational, Rational>> pool;  // asset -> (qty, basis)
            for (const auto& [asset, list] : pf.lots.all()) {
                for (const auto& l : list) {
                    pool[asset].first += to_rational(l.remaining_qty);
                    pool[asset].second += l.basis;
                }
            }
            for (std::size_t j = i; j < end; ++j)
                for (const auto& lot : ingest_event(events[j], policy, dry, method).acquired) {
                    pool[lot.asset].first += to_rational(lot.remaining_qty);
                    pool[lot.asset].second += lot.basis;
                }
            for (const auto& [asset, qb] : pool)
                if (qb.first > 0) pf.lots.set_year_average(asset, qb.second / qb.first);
        }
        for (std::size_t j = i; j < end; ++j) builder.add(ingest_event(events[j], policy, pf, method));
        if (method == AccountingMethod::AvgTotal) pf.lots.rebase_to_year_averages();
        i = end;
    }
    pf.lots.clear_year_averages();
    return report;
}

}  // namespace fisc::tax
