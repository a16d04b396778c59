#pragma once

// Exact integer and rational helpers shared by every module. Ledger paths never
// touch floating point; doubles only appear in closed-form estimators.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

#include "fisc/core/error.hpp"

namespace fisc {

/// 128-bit signed integer that throws on overflow instead of wrapping.
using Int = boost::multiprecision::checked_int128_t;
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt pow10(unsigned n) {
    BigInt r = 1;
    for (unsigned i = 0; i < n; ++i) r *= 10;
    return r;
}

inline Int narrow(const BigInt& v) {
    static const BigInt kMax = BigInt(std::numeric_limits<Int>::max());
    static const BigInt kMin = BigInt(std::numeric_limits<Int>::min());
    if (v > kMax || v < kMin) fail(Errc::overflow, "value exceeds 128-bit range: " + v.str());
    return Int(v);
}

/// Floor division for arbitrary signs (cpp_int '/' truncates toward zero).
inline BigInt floor_div(const BigInt& a, const BigInt& b) {
    if (b == 0) fail(Errc::invalid_argument, "division by zero");
    BigInt q = a / b;
    BigInt r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

inline BigInt ceil_div(const BigInt& a, const BigInt& b) { return -floor_div(-a, b); }

inline BigInt floor(const Rational& r) {
    return floor_div(boost::multiprecision::numerator(r), boost::multiprecision::denominator(r));
}

inline BigInt ceil(const Rational& r) {
    return ceil_div(boost::multiprecision::numerator(r), boost::multiprecision::denominator(r));
}

inline Rational make_rational(const BigInt& num, const BigInt& den = 1) {
    if (den == 0) fail(Errc::invalid_argument, "zero denominator");
    return Rational(num, den);
}

/// Parses "123", "-4.5", "0.0005" into an exact rational. No exponents.
inline Rational parse_decimal(std::string_view text) {
    if (text.empty()) fail(Errc::parse_error, "empty decimal");
    bool negative = false;
    std::size_t i = 0;
    if (text[0] == '-' || text[0] == '+') {
        negative = text[0] == '-';
        ++i;
    }
    BigInt digits = 0;
    unsigned frac = 0;
    bool seen_point = false;
    bool any_digit = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.') {
            if (seen_point) fail(Errc::parse_error, "malformed decimal: " + std::string(text));
            seen_point = true;
            continue;
        }
        if (c == '_') continue;
        if (c < '0' || c > '9') fail(Errc::parse_error, "malformed decimal: " + std::string(text));
        digits = digits * 10 + (c - '0');
        any_digit = true;
        if (seen_point) ++frac;
    }
    if (!any_digit) fail(Errc::parse_error, "malformed decimal: " + std::string(text));
    if (negative) digits = -digits;
    return Rational(digits, pow10(frac));
}

/// Parses a decimal string into integer base units at the given scale; rejects
/// values that would need more fractional digits than `decimals`.
inline BigInt parse_scaled(std::string_view text, unsigned decimals) {
    Rational r = parse_decimal(text) * Rational(pow10(decimals));
    if (boost::multiprecision::denominator(r) != 1)
        fail(Errc::parse_error, "too many fractional digits for scale " + std::to_string(decimals) + ": " +
                                    std::string(text));
    return boost::multiprecision::numerator(r);
}

/// Fixed-point rendering: units=120000000, decimals=8 -> "1.20000000".
inline std::string format_scaled(const BigInt& units, unsigned decimals) {
    bool negative = units < 0;
    BigInt mag = negative ? BigInt(-units) : units;
    std::string s = mag.str();
    if (decimals > 0) {
        if (s.size() <= decimals) s.insert(0, decimals + 1 - s.size(), '0');
        s.insert(s.size() - decimals, 1, '.');
    }
    return negative ? "-" + s : s;
}

/// Rational rendered with `decimals` fractional digits, truncated toward zero.
inline std::string format_rational(const Rational& r, unsigned decimals) {
    BigInt scaled = boost::multiprecision::numerator(r) * pow10(decimals) / boost::multiprecision::denominator(r);
    return format_scaled(scaled, decimals);
}

}  // namespace fisc
