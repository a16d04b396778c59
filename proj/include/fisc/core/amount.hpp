#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include "fisc/core/numeric.hpp"

namespace fisc {

inline constexpr unsigned kBtcDecimals = 8;
inline constexpr unsigned kEthDecimals = 18;

/// Non-negative fixed-point quantity of one asset, counted in base units
/// (satoshi, wei). Arithmetic is checked; mixing scales throws.
class Amount {
public:
    Amount() = default;
    Amount(Int units, unsigned decimals) : units_(units), decimals_(decimals) {
        if (units_ < 0) fail(Errc::invalid_argument, "negative amount");
    }

    static Amount parse(std::string_view text, unsigned decimals) {
        return Amount(narrow(parse_scaled(text, decimals)), decimals);
    }
    static Amount zero(unsigned decimals) { return Amount(0, decimals); }

    const Int& units() const { return units_; }
    unsigned decimals() const { return decimals_; }
    bool is_zero() const { return units_ == 0; }

    std::string to_string() const { return format_scaled(BigInt(units_), decimals_); }

    Amount& operator+=(const Amount& o) {
        check_scale(o);
        units_ += o.units_;
        return *this;
    }
    Amount& operator-=(const Amount& o) {
        check_scale(o);
        if (o.units_ > units_) fail(Errc::overflow, "amount underflow");
        units_ -= o.units_;
        return *this;
    }
    friend Amount operator+(Amount a, const Amount& b) { return a += b; }
    friend Amount operator-(Amount a, const Amount& b) { return a -= b; }

    friend bool operator==(const Amount& a, const Amount& b) {
        return a.decimals_ == b.decimals_ && a.units_ == b.units_;
    }
    friend std::strong_ordering operator<=>(const Amount& a, const Amount& b) {
        a.check_scale(b);
        if (a.units_ < b.units_) return std::strong_ordering::less;
        if (a.units_ > b.units_) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Amount& a) { return os << a.to_string(); }

private:
    void check_scale(const Amount& o) const {
        if (o.decimals_ != decimals_)
            fail(Errc::decimals_mismatch,
                 "decimals mismatch: " + std::to_string(decimals_) + " vs " + std::to_string(o.decimals_));
    }

    Int units_ = 0;
    unsigned decimals_ = 0;
};

/// Signed counterpart of Amount for results that may legitimately go negative.
struct SignedAmount {
    Int units = 0;
    unsigned decimals = 0;

    std::string to_string() const { return format_scaled(BigInt(units), decimals); }
    friend bool operator==(const SignedAmount& a, const SignedAmount& b) {
        return a.decimals == b.decimals && a.units == b.units;
    }
};

/// Reference-currency value as a fixed-point integer with 8 fractional digits.
struct Money {
    static constexpr unsigned kDecimals = 8;

    Int units = 0;

    static Money parse(std::string_view text) { return Money{narrow(parse_scaled(text, kDecimals))}; }
    static Money from_whole(long long v) { return Money{Int(v) * Int(100'000'000)}; }
    /// Floors an exact reference-currency value to the money grid.
    static Money floor_of(const Rational& value) { return Money{narrow(fisc::floor(value * Rational(pow10(kDecimals))))}; }

    Rational to_rational() const { return Rational(BigInt(units), pow10(kDecimals)); }
    std::string to_string() const { return format_scaled(BigInt(units), kDecimals); }

    Money& operator+=(const Money& o) {
        units += o.units;
        return *this;
    }
    Money& operator-=(const Money& o) {
        units -= o.units;
        return *this;
    }
    friend Money operator+(Money a, const Money& b) { return a += b; }
    friend Money operator-(Money a, const Money& b) { return a -= b; }
    friend Money operator-(const Money& a) { return Money{-a.units}; }
    friend bool operator==(const Money& a, const Money& b) { return a.units == b.units; }
    friend std::strong_ordering operator<=>(const Money& a, const Money& b) {
        if (a.units < b.units) return std::strong_ordering::less;
        if (a.units > b.units) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }
    friend std::ostream& operator<<(std::ostream& os, const Money& m) { return os << m.to_string(); }
};

/// Reference-currency value of `qty` at `unit_price` (price per whole unit),
/// floored to the money grid.
inline Money value_of(const Amount& qty, const Rational& unit_price) {
    Rational v = Rational(BigInt(qty.units()), pow10(qty.decimals())) * unit_price;
    return Money::floor_of(v);
}

inline Rational to_rational(const Amount& a) { return Rational(BigInt(a.units()), pow10(a.decimals())); }

}  // namespace fisc
