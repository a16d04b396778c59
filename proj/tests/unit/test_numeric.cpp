#include <gtest/gtest.h>

#include "fisc/core/amount.hpp"
#include "fisc/core/config.hpp"

using namespace fisc;

TEST(Numeric, ParseDecimalIsExact) {
    EXPECT_EQ(parse_decimal("0.003"), Rational(3, 1000));
    EXPECT_EQ(parse_decimal("-4.5"), Rational(-9, 2));
    EXPECT_EQ(parse_decimal("40000"), Rational(40000));
    EXPECT_THROW(parse_decimal("1.2.3"), Error);
    EXPECT_THROW(parse_decimal("abc"), Error);
    EXPECT_THROW(parse_decimal(""), Error);
}

TEST(Numeric, FloorAndCeilHandleNegatives) {
    EXPECT_EQ(floor(Rational(-7, 2)), BigInt(-4));
    EXPECT_EQ(ceil(Rational(-7, 2)), BigInt(-3));
    EXPECT_EQ(floor(Rational(7, 2)), BigInt(3));
    EXPECT_EQ(ceil(Rational(7, 2)), BigInt(4));
}

TEST(Amount, ParseAndFormat) {
    Amount a = Amount::parse("1.2", kBtcDecimals);
    EXPECT_EQ(a.units(), Int(120'000'000));
    EXPECT_EQ(a.to_string(), "1.20000000");
    EXPECT_EQ(Amount::parse("0.000000000000000001", kEthDecimals).units(), Int(1));
    EXPECT_THROW(Amount::parse("0.000000001", kBtcDecimals), Error);
}

TEST(Amount, CheckedArithmetic) {
    Amount a = Amount::parse("1", 8);
    Amount b = Amount::parse("2", 8);
    EXPECT_EQ((a + b).to_string(), "3.00000000");
    EXPECT_THROW(a - b, Error);
    EXPECT_THROW(a + Amount::parse("1", 18), Error);
    EXPECT_THROW(Amount(Int(-1), 8), Error);

    Amount big(std::numeric_limits<Int>::max(), 18);
    try {
        big += Amount(Int(1), 18);
        FAIL() << "expected overflow";
    } catch (const std::exception&) {
    }
}

TEST(Amount, ThirtyTwoEtherFitsInWei) {
    Amount stake = Amount::parse("32", kEthDecimals);
    EXPECT_EQ(stake.units().str(), "32000000000000000000");
}

TEST(Money, FloorOfRational) {
    EXPECT_EQ(Money::floor_of(Rational(1, 3)).to_string(), "0.33333333");
    EXPECT_EQ(Money::floor_of(Rational(-1, 3)).to_string(), "-0.33333334");
    EXPECT_EQ(value_of(Amount::parse("0.5", 8), Rational(40000)).to_string(), "20000.00000000");
}

TEST(Config, ParsesKeyValueWithComments) {
    auto cfg = KeyValueConfig::parse("# header\nalpha = 1\n beta=0.3%  # trailing\n\nname = x y\n", "t.cfg");
    Rational beta;
    cfg.read("beta", beta);
    EXPECT_EQ(beta, Rational(3, 1000));
    EXPECT_EQ(cfg.get("name").value(), "x y");
    EXPECT_EQ(cfg.where("alpha"), "t.cfg:2");
    EXPECT_EQ(cfg.unused_keys(), std::set<std::string>{"alpha"});
}

TEST(Config, DiagnosticsNameTheLine) {
    try {
        KeyValueConfig::parse("a = 1\nbroken line\n", "p.cfg");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::parse_error);
        EXPECT_NE(std::string(e.what()).find("p.cfg:2"), std::string::npos);
    }
    auto cfg = KeyValueConfig::parse("n = abc\n", "q.cfg");
    std::uint64_t n = 0;
    try {
        cfg.read("n", n);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("q.cfg:1"), std::string::npos);
    }
}

TEST(Config, RationalForms) {
    EXPECT_EQ(KeyValueConfig::parse_rational("3/1000"), Rational(3, 1000));
    EXPECT_EQ(KeyValueConfig::parse_rational("0.003"), Rational(3, 1000));
    EXPECT_EQ(KeyValueConfig::parse_rational("0.3%"), Rational(3, 1000));
}
