#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fisc {

enum class Errc {
    invalid_argument,
    overflow,
    decimals_mismatch,
    // ledger
    bad_payload_length,
    bad_encoding,
    unknown_outpoint,
    owner_mismatch,
    bad_signature,
    overspend,
    duplicate_input,
    empty_input,
    no_outputs,
    // econ
    non_positive_timespan,
    zero_share,
    zero_rate,
    validator_slashed,
    // defi
    zero_input,
    dust_output,
    unequal_deposit,
    over_redemption,
    non_positive_ratio,
    time_regression,
    healthy_vault,
    pool_empty,
    // tax
    out_of_order,
    unknown_kind,
    insufficient_quantity,
    disallowed_method,
    missing_specid,
    // attribution
    duplicate_tin,
    unknown_tin,
    address_conflict,
    unregistered_origin,
    incomplete_travel_record,
    unknown_jurisdiction,
    // io
    parse_error,
    schema_violation,
};

std::string_view to_string(Errc code);

/// Domain error carrying a stable code alongside the message.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

inline std::string_view to_string(Errc code) {
    switch (code) {
        case Errc::invalid_argument: return "invalid-argument";
        case Errc::overflow: return "overflow";
        case Errc::decimals_mismatch: return "decimals-mismatch";
        case Errc::bad_payload_length: return "bad-payload-length";
        case Errc::bad_encoding: return "bad-encoding";
        case Errc::unknown_outpoint: return "unknown-outpoint";
        case Errc::owner_mismatch: return "owner-mismatch";
        case Errc::bad_signature: return "bad-signature";
        case Errc::overspend: return "overspend";
        case Errc::duplicate_input: return "duplicate-input";
        case Errc::empty_input: return "empty-input";
        case Errc::no_outputs: return "no-outputs";
        case Errc::non_positive_timespan: return "non-positive-timespan";
        case Errc::zero_share: return "zero-share";
        case Errc::zero_rate: return "zero-rate";
        case Errc::validator_slashed: return "validator-slashed";
        case Errc::zero_input: return "zero-input";
        case Errc::dust_output: return "dust-output";
        case Errc::unequal_deposit: return "unequal-deposit";
        case Errc::over_redemption: return "over-redemption";
        case Errc::non_positive_ratio: return "non-positive-ratio";
        case Errc::time_regression: return "time-regression";
        case Errc::healthy_vault: return "healthy-vault";
        case Errc::pool_empty: return "pool-empty";
        case Errc::out_of_order: return "out-of-order";
        case Errc::unknown_kind: return "unknown-kind";
        case Errc::insufficient_quantity: return "insufficient-quantity";
        case Errc::disallowed_method: return "disallowed-method";
        case Errc::missing_specid: return "missing-specid";
        case Errc::duplicate_tin: return "duplicate-tin";
        case Errc::unknown_tin: return "unknown-tin";
        case Errc::address_conflict: return "address-conflict";
        case Errc::unregistered_origin: return "unregistered-origin";
        case Errc::incomplete_travel_record: return "incomplete-travel-record";
        case Errc::unknown_jurisdiction: return "unknown-jurisdiction";
        case Errc::parse_error: return "parse-error";
        case Errc::schema_violation: return "schema-violation";
    }
    return "unknown";
}

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace fisc
