#pragma once

#include <set>
#include <sstream>
#include <string>

#include "fisc/core/amount.hpp"
#include "fisc/core/config.hpp"
#include "fisc/tax/event.hpp"

namespace fisc::tax {

enum class AccountingMethod { FIFO, LIFO, HIFO, SpecID, AvgTotal, AvgMoving, Periodic, PVCT };

inline constexpr std::array<std::pair<AccountingMethod, std::string_view>, 8> kMethodNames{{
    {AccountingMethod::FIFO, "FIFO"},
    {AccountingMethod::LIFO, "LIFO"},
    {AccountingMethod::HIFO, "HIFO"},
    {AccountingMethod::SpecID, "SpecID"},
    {AccountingMethod::AvgTotal, "AvgTotal"},
    {AccountingMethod::AvgMoving, "AvgMoving"},
    {AccountingMethod::Periodic, "Periodic"},
    {AccountingMethod::PVCT, "PVCT"},
}};

inline std::string_view to_string(AccountingMethod m) {
    for (const auto& [method, name] : kMethodNames)
        if (method == m) return name;
    return "?";
}

inline AccountingMethod parse_method(std::string_view text) {
    for (const auto& [method, name] : kMethodNames)
        if (name == text) return method;
    fail(Errc::parse_error, "unknown accounting method '" + std::string(text) + "'");
}

enum class AcquisitionTreatment { fmv_income, zero_basis };
enum class HobbyMinerRule { exempt_with_cost_basis, zero_basis_no_deduction, none };
enum class AttributionResult { affirmed, unaffirmed };

struct JurisdictionPolicy {
    std::string name = "default";
    AcquisitionTreatment fork_treatment = AcquisitionTreatment::zero_basis;
    AcquisitionTreatment airdrop_treatment = AcquisitionTreatment::fmv_income;
    /// Only consulted when mining is not a business.
    HobbyMinerRule hobby_miner = HobbyMinerRule::none;
    bool mining_is_business = true;
    std::set<AccountingMethod> allowed_methods{AccountingMethod::FIFO,     AccountingMethod::LIFO,
                                               AccountingMethod::HIFO,     AccountingMethod::SpecID,
                                               AccountingMethod::AvgTotal, AccountingMethod::AvgMoving,
                                               AccountingMethod::Periodic, AccountingMethod::PVCT};
    Rational standard_withholding = 0;
    Rational elevated_withholding = 0;
    unsigned tax_year_start_month = 1;
    unsigned tax_year_start_day = 1;
    bool slashing_deductible = false;
    /// Held strictly longer than this many days is long-term.
    std::uint32_t long_term_days = 365;
    bool gifts_exempt = false;
    bool lp_deposit_is_disposal = false;

    void validate() const {
        if (allowed_methods.empty()) fail(Errc::schema_violation, "policy allows no accounting method");
        if (standard_withholding < 0 || standard_withholding > 1 || elevated_withholding > 1)
            fail(Errc::schema_violation, "withholding rates must be in [0, 1]");
        if (elevated_withholding < standard_withholding)
            fail(Errc::schema_violation, "elevated withholding is below the standard rate");
        std::chrono::month_day md{std::chrono::month{tax_year_start_month}, std::chrono::day{tax_year_start_day}};
        if (!md.ok() || (tax_year_start_month == 2 && tax_year_start_day == 29))
            fail(Errc::schema_violation, "invalid tax year start");
    }

    bool mining_income_exempt() const { return !mining_is_business && hobby_miner != HobbyMinerRule::none; }

    Timestamp tax_year_start(int year) const { return timestamp_of(year, tax_year_start_month, tax_year_start_day); }

    /// Tax years are labelled by the calendar year they start in.
    int tax_year_of(Timestamp t) const {
        int y = static_cast<int>(civil_date(t).year());
        return t >= tax_year_start(y) ? y : y - 1;
    }
};

/// proceeds x standard rate when the beneficiary's authority affirmed
/// ownership, proceeds x elevated rate otherwise. Rounded down.
inline Money withholding_amount(const Money& proceeds, AttributionResult result, const JurisdictionPolicy& policy) {
    if (proceeds.units < 0) fail(Errc::invalid_argument, "proceeds must be non-negative");
    const Rational& rate =
        result == AttributionResult::affirmed ? policy.standard_withholding : policy.elevated_withholding;
    return Money::floor_of(proceeds.to_rational() * rate);
}

namespace detail {

template <class Enum, std::size_t N>
Enum parse_choice(const std::string& v, const std::array<std::pair<Enum, std::string_view>, N>& names) {
    for (const auto& [e, n] : names)
        if (n == v) return e;
    std::string expected;
    for (const auto& [e, n] : names) expected += (expected.empty() ? "" : " | ") + std::string(n);
    fail(Errc::parse_error, "expected one of " + expected);
}

inline constexpr std::array<std::pair<AcquisitionTreatment, std::string_view>, 2> kTreatmentNames{{
    {AcquisitionTreatment::fmv_income, "fmv_income"},
    {AcquisitionTreatment::zero_basis, "zero_basis"},
}};

inline constexpr std::array<std::pair<HobbyMinerRule, std::string_view>, 3> kHobbyNames{{
    {HobbyMinerRule::exempt_with_cost_basis, "exempt_with_cost_basis"},
    {HobbyMinerRule::zero_basis_no_deduction, "zero_basis_no_deduction"},
    {HobbyMinerRule::none, "none"},
}};

}  // namespace detail

/// Keys mirror the field names; allowed_methods is a comma list and
/// tax_year_start is MM-DD.
inline JurisdictionPolicy load_policy(const KeyValueConfig& cfg, JurisdictionPolicy p = {}) {
    cfg.read("name", p.name);
    cfg.with("fork_treatment",
             [&](const std::string& v) { p.fork_treatment = detail::parse_choice(v, detail::kTreatmentNames); });
    cfg.with("airdrop_treatment",
             [&](const std::string& v) { p.airdrop_treatment = detail::parse_choice(v, detail::kTreatmentNames); });
    cfg.with("hobby_miner", [&](const std::string& v) { p.hobby_miner = detail::parse_choice(v, detail::kHobbyNames); });
    cfg.read("mining_is_business", p.mining_is_business);
    cfg.with("allowed_methods", [&](const std::string& v) {
        p.allowed_methods.clear();
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) p.allowed_methods.insert(parse_method(item));
        }
    });
    cfg.read("standard_withholding", p.standard_withholding);
    cfg.read("elevated_withholding", p.elevated_withholding);
    cfg.with("tax_year_start", [&](const std::string& v) {
        unsigned m = 0, d = 0;
        char dash = 0;
        std::istringstream in(v);
        if (!(in >> m >> dash >> d) || dash != '-' || !in.eof()) fail(Errc::parse_error, "expected MM-DD");
        p.tax_year_start_month = m;
        p.tax_year_start_day = d;
    });
    cfg.read("slashing_deductible", p.slashing_deductible);
    cfg.read("long_term_days", p.long_term_days);
    cfg.read("gifts_exempt", p.gifts_exempt);
    cfg.read("lp_deposit_is_disposal", p.lp_deposit_is_disposal);
    try {
        p.validate();
    } catch (const Error& e) {
        fail(e.code(), cfg.source() + ": " + e.what());
    }
    return p;
}

}  // namespace fisc::tax
