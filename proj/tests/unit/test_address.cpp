#include <gtest/gtest.h>

#include <random>

#include "fisc/ledger/address.hpp"

using namespace fisc;
using namespace fisc::ledger;

TEST(ClassifyAddress, SampleStrings) {
    EXPECT_EQ(classify_address("1KfVFNTxkknugXhA9uYkohMWxG8f78nyax"), AddressKind::P2PKH);
    EXPECT_EQ(classify_address("3FMFtFAJxKmpumn3sGjA6xjXw1M4Bw97v"), AddressKind::P2SH);
    EXPECT_EQ(classify_address("bc1q9jayxqvah5gynukddmms7jc9xwjc0c6emulpp"), AddressKind::Bech32);
    EXPECT_EQ(classify_address("Kx4cBkAHgD9CrYNhTM12P5cNgVfwTeG5nN2R4KxcZjPPLx7DfrEr"), AddressKind::WifKey);
    EXPECT_EQ(classify_address("hello world"), std::nullopt);
}

TEST(ClassifyAddress, OtherShapes) {
    EXPECT_EQ(classify_address("0x388C818CA8B9251b393131C08a736A67ccB19297"), AddressKind::AccountHex);
    EXPECT_EQ(classify_address("5HueCGU8rMjxEXxiPuD5BDku4MkFqeZyd4dZ1jvhTVqvbTLvyTJ"), AddressKind::WifKey);
    EXPECT_EQ(classify_address("abandon abandon abandon abandon abandon abandon abandon abandon abandon abandon "
                               "abandon about"),
              AddressKind::Mnemonic);
    // 11 valid words is not a seed phrase.
    EXPECT_EQ(classify_address("abandon abandon abandon abandon abandon abandon abandon abandon abandon abandon "
                               "about"),
              std::nullopt);
    EXPECT_EQ(classify_address("1short"), std::nullopt);
    EXPECT_EQ(classify_address("1KfVFNTxkknugXhA9uYkohMWxG8f78ny0l"), std::nullopt);  // 0 and l are not base58
    EXPECT_THROW(classify_address(""), Error);
}

TEST(ClassifyAddress, ChecksumIsNotConsulted) {
    // Several printed sample strings are illustrative and fail their checksums;
    // classification still works, full decoding rejects them.
    EXPECT_THROW(decode_address("1KfVFNTxkknugXhA9uYkohMWxG8f78nyax"), Error);
    EXPECT_THROW(decode_address("bc1q9jayxqvah5gynukddmms7jc9xwjc0c6emulpp"), Error);
    EXPECT_NO_THROW(decode_address("3FGs7JfaoAZTT6Sda73XrJ6i5Gwsuw9GUC"));
}

TEST(DeriveAddress, ZeroPayloadBase58Check) {
    Hash160 zero{};
    // Independent Base58Check oracle over 0x00 || 20 zero bytes.
    EXPECT_EQ(derive_address(zero, AddressScheme::Base58CheckP2PKH), "1111111111111111111114oLvT2");
}

TEST(DeriveAddress, ZeroPayloadBech32) {
    Hash160 zero{};
    // Value from an independent BIP-173 reference encoder.
    EXPECT_EQ(derive_address(zero, AddressScheme::Bech32V0), "bc1qqqqqqqqqqqqqqqqqqqqqqqqqqqqqqqqq9e75rs");
}

TEST(DeriveAddress, Bip173ReferenceVector) {
    // BIP-173: compressed generator point -> P2WPKH address.
    Bytes pub = from_hex("0279BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798");
    Hash160 h = hash160(pub);
    EXPECT_EQ(to_hex(h), "751e76e8199196d454941c45d1b3a323f1433bd6");
    EXPECT_EQ(derive_address(h, AddressScheme::Bech32V0), "bc1qw508d6qejxtdg4y5r3zarvary0c5xw7kv8f3t4");
    EXPECT_EQ(derive_address(h, AddressScheme::Base58CheckP2PKH), "1BgGZ9tcN4rm9KBzDn7KprQz87SZ26SAMH");
}

TEST(DeriveAddress, Bech32DecodesReferenceVectorsAndRejectsCorruption) {
    auto a = decode_address("BC1QW508D6QEJXTDG4Y5R3ZARVARY0C5XW7KV8F3T4");
    EXPECT_EQ(to_hex(a.payload), "751e76e8199196d454941c45d1b3a323f1433bd6");
    EXPECT_THROW(decode_address("bc1qw508d6qejxtdg4y5r3zarvary0c5xw7kv8f3t5"), Error);
    EXPECT_THROW(decode_address("bc1qw508d6qejxtdg4y5r3zarvaRy0c5xw7kv8f3t4"), Error);  // mixed case
}

TEST(DeriveAddress, Deterministic) {
    Hash160 p{};
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<std::uint8_t>(i * 7);
    EXPECT_EQ(derive_address(p, AddressScheme::Bech32V0), derive_address(p, AddressScheme::Bech32V0));
    EXPECT_EQ(derive_address(p, AddressScheme::Base58CheckP2PKH), derive_address(p, AddressScheme::Base58CheckP2PKH));
}

TEST(DeriveAddress, WrongPayloadLength) {
    Bytes nineteen(19, 0);
    try {
        derive_address(nineteen, AddressScheme::Base58CheckP2PKH);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::bad_payload_length);
    }
}

// classify(derive(p)) matches the scheme, and decode/encode round-trips.
TEST(DeriveAddress, RandomPayloadsRoundTrip) {
    std::mt19937_64 rng(173);
    for (int i = 0; i < 200; ++i) {
        Hash160 p{};
        for (auto& b : p) b = static_cast<std::uint8_t>(rng());
        if (i == 0) p.fill(0);
        for (auto [scheme, kind] : {std::pair{AddressScheme::Base58CheckP2PKH, AddressKind::P2PKH},
                                    std::pair{AddressScheme::Bech32V0, AddressKind::Bech32}}) {
            std::string text = derive_address(p, scheme);
            ASSERT_EQ(classify_address(text), kind) << text;
            Address a = decode_address(text);
            ASSERT_EQ(Bytes(p.begin(), p.end()), a.payload);
            ASSERT_EQ(encode_address(a), text);
        }
    }
}

TEST(Base58, LeadingZerosAndRoundTrip) {
    EXPECT_EQ(base58::encode(Bytes{0, 0, 1}), "112");
    EXPECT_EQ(base58::decode("112"), (Bytes{0, 0, 1}));
    Bytes wif = base58::decode_check("5HueCGU8rMjxEXxiPuD5BDku4MkFqeZyd4dZ1jvhTVqvbTLvyTJ");
    EXPECT_EQ(wif.front(), 0x80);
    EXPECT_EQ(wif.size(), 33u);
}
