#pragma once

// Address text formats: Base58Check (P2PKH / P2SH / WIF), BIP-173 Bech32
// segwit v0, 0x-prefixed account hex, and BIP-39 mnemonic detection.

#include <algorithm>
#include <cctype>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fisc/crypto/hash.hpp"
#include "fisc/ledger/bip39_english.hpp"

namespace fisc::ledger {

enum class AddressKind { P2PKH, P2SH, Bech32, AccountHex, WifKey, Mnemonic };

enum class AddressScheme { Base58CheckP2PKH, Bech32V0 };

inline std::string_view to_string(AddressKind k) {
    switch (k) {
        case AddressKind::P2PKH: return "P2PKH";
        case AddressKind::P2SH: return "P2SH";
        case AddressKind::Bech32: return "Bech32";
        case AddressKind::AccountHex: return "AccountHex";
        case AddressKind::WifKey: return "WifKey";
        case AddressKind::Mnemonic: return "Mnemonic";
    }
    return "?";
}

struct Address {
    AddressKind kind = AddressKind::P2PKH;
    std::string text;
    Bytes payload;

    friend bool operator==(const Address& a, const Address& b) { return a.text == b.text; }
    friend bool operator<(const Address& a, const Address& b) { return a.text < b.text; }
};

namespace base58 {

inline constexpr std::string_view kAlphabet = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

inline bool is_base58(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return kAlphabet.find(c) != std::string_view::npos; });
}

inline std::string encode(ByteView data) {
    std::size_t zeros = 0;
    while (zeros < data.size() && data[zeros] == 0) ++zeros;
    // Big-endian base-256 to base-58 digits.
    std::vector<std::uint8_t> digits;
    for (std::size_t i = zeros; i < data.size(); ++i) {
        int carry = data[i];
        for (auto& d : digits) {
            carry += 256 * d;
            d = static_cast<std::uint8_t>(carry % 58);
            carry /= 58;
        }
        while (carry > 0) {
            digits.push_back(static_cast<std::uint8_t>(carry % 58));
            carry /= 58;
        }
    }
    std::string out(zeros, '1');
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) out.push_back(kAlphabet[*it]);
    return out;
}

inline Bytes decode(std::string_view text) {
    std::size_t ones = 0;
    while (ones < text.size() && text[ones] == '1') ++ones;
    std::vector<std::uint8_t> bytes;  // little-endian accumulator
    for (std::size_t i = ones; i < text.size(); ++i) {
        auto pos = kAlphabet.find(text[i]);
        if (pos == std::string_view::npos) fail(Errc::bad_encoding, "invalid base58 character");
        int carry = static_cast<int>(pos);
        for (auto& b : bytes) {
            carry += 58 * b;
            b = static_cast<std::uint8_t>(carry & 0xff);
            carry >>= 8;
        }
        while (carry > 0) {
            bytes.push_back(static_cast<std::uint8_t>(carry & 0xff));
            carry >>= 8;
        }
    }
    Bytes out(ones, 0);
    out.insert(out.end(), bytes.rbegin(), bytes.rend());
    return out;
}

inline std::string encode_check(ByteView data) {
    Bytes buf(data.begin(), data.end());
    Hash256 check = dsha256(buf);
    buf.insert(buf.end(), check.begin(), check.begin() + 4);
    return encode(buf);
}

/// Returns version byte + payload with the checksum stripped.
inline Bytes decode_check(std::string_view text) {
    Bytes raw = decode(text);
    if (raw.size() < 5) fail(Errc::bad_encoding, "base58check string too short");
    ByteView body(raw.data(), raw.size() - 4);
    Hash256 check = dsha256(body);
    if (!std::equal(check.begin(), check.begin() + 4, raw.end() - 4))
        fail(Errc::bad_encoding, "base58check checksum mismatch");
    return Bytes(body.begin(), body.end());
}

}  // namespace base58

namespace bech32 {

inline constexpr std::string_view kCharset = "qpzry9x8gf2tvdw0s3jn54khce6mua7l";

inline std::uint32_t polymod(const std::vector<std::uint8_t>& values) {
    static constexpr std::uint32_t kGen[5] = {0x3b6a57b2, 0x26508e6d, 0x1ea119fa, 0x3d4233dd, 0x2a1462b3};
    std::uint32_t chk = 1;
    for (std::uint8_t v : values) {
        std::uint8_t top = static_cast<std::uint8_t>(chk >> 25);
        chk = (chk & 0x1ffffff) << 5 ^ v;
        for (int i = 0; i < 5; ++i)
            if ((top >> i) & 1) chk ^= kGen[i];
    }
    return chk;
}

inline std::vector<std::uint8_t> hrp_expand(std::string_view hrp) {
    std::vector<std::uint8_t> out;
    for (char c : hrp) out.push_back(static_cast<std::uint8_t>(c) >> 5);
    out.push_back(0);
    for (char c : hrp) out.push_back(static_cast<std::uint8_t>(c) & 31);
    return out;
}

/// Regroups bits; `pad` appends a final partial group (encoding direction).
inline std::vector<std::uint8_t> convert_bits(ByteView in, int from, int to, bool pad) {
    int acc = 0;
    int bits = 0;
    const int maxv = (1 << to) - 1;
    std::vector<std::uint8_t> out;
    for (std::uint8_t v : in) {
        if (v >> from) fail(Errc::bad_encoding, "bit group out of range");
        acc = (acc << from) | v;
        bits += from;
        while (bits >= to) {
            bits -= to;
            out.push_back(static_cast<std::uint8_t>((acc >> bits) & maxv));
        }
    }
    if (pad) {
        if (bits) out.push_back(static_cast<std::uint8_t>((acc << (to - bits)) & maxv));
    } else if (bits >= from || ((acc << (to - bits)) & maxv)) {
        fail(Errc::bad_encoding, "non-zero bech32 padding");
    }
    return out;
}

inline std::string encode(std::string_view hrp, const std::vector<std::uint8_t>& data) {
    std::vector<std::uint8_t> values = hrp_expand(hrp);
    values.insert(values.end(), data.begin(), data.end());
    values.insert(values.end(), 6, 0);
    std::uint32_t mod = polymod(values) ^ 1;
    std::string out(hrp);
    out.push_back('1');
    for (std::uint8_t d : data) out.push_back(kCharset[d]);
    for (int i = 0; i < 6; ++i) out.push_back(kCharset[(mod >> (5 * (5 - i))) & 31]);
    return out;
}

struct Decoded {
    std::string hrp;
    std::vector<std::uint8_t> data;  // 5-bit groups, checksum removed
};

inline Decoded decode(std::string_view text) {
    bool lower = false, upper = false;
    for (char c : text) {
        if (c < 33 || c > 126) fail(Errc::bad_encoding, "bech32 character out of range");
        lower |= (c >= 'a' && c <= 'z');
        upper |= (c >= 'A' && c <= 'Z');
    }
    if (lower && upper) fail(Errc::bad_encoding, "mixed-case bech32 string");
    if (text.size() > 90) fail(Errc::bad_encoding, "bech32 string too long");
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    auto sep = s.rfind('1');
    if (sep == std::string::npos || sep == 0 || sep + 7 > s.size()) fail(Errc::bad_encoding, "bech32 separator");
    Decoded d;
    d.hrp = s.substr(0, sep);
    for (std::size_t i = sep + 1; i < s.size(); ++i) {
        auto pos = kCharset.find(s[i]);
        if (pos == std::string_view::npos) fail(Errc::bad_encoding, "invalid bech32 character");
        d.data.push_back(static_cast<std::uint8_t>(pos));
    }
    std::vector<std::uint8_t> values = hrp_expand(d.hrp);
    values.insert(values.end(), d.data.begin(), d.data.end());
    if (polymod(values) != 1) fail(Errc::bad_encoding, "bech32 checksum mismatch");
    d.data.resize(d.data.size() - 6);
    return d;
}

}  // namespace bech32

namespace detail {

inline std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> words;
    std::istringstream in{std::string(text)};
    for (std::string w; in >> w;) words.push_back(w);
    return words;
}

inline bool is_bip39_word(std::string_view w) {
    return std::binary_search(kBip39English.begin(), kBip39English.end(), w);
}

inline bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
    return true;
}

}  // namespace detail

/// Classifies text by prefix, length and alphabet. Checksums are not
/// consulted, so well-shaped strings with bad checksums still classify.
inline std::optional<AddressKind> classify_address(std::string_view text) {
    if (text.empty()) fail(Errc::invalid_argument, "empty address text");

    auto words = detail::split_words(text);
    if (words.size() > 1) {
        if ((words.size() == 12 || words.size() == 18 || words.size() == 24) &&
            std::all_of(words.begin(), words.end(), [](const std::string& w) { return detail::is_bip39_word(w); }))
            return AddressKind::Mnemonic;
        return std::nullopt;
    }

    if (detail::starts_with_ci(text, "bc1")) {
        if (text.size() < 14 || text.size() > 74) return std::nullopt;
        std::string rest(text.substr(3));
        std::transform(rest.begin(), rest.end(), rest.begin(), [](unsigned char c) { return std::tolower(c); });
        bool ok = std::all_of(rest.begin(), rest.end(),
                              [](char c) { return bech32::kCharset.find(c) != std::string_view::npos; });
        return ok ? std::optional(AddressKind::Bech32) : std::nullopt;
    }

    if (text.size() == 42 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
        bool hex = std::all_of(text.begin() + 2, text.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
        return hex ? std::optional(AddressKind::AccountHex) : std::nullopt;
    }

    if (!base58::is_base58(text)) return std::nullopt;
    const std::size_t n = text.size();
    switch (text[0]) {
        case '1':
            if (n >= 26 && n <= 36) return AddressKind::P2PKH;
            break;
        case '3':
            if (n >= 26 && n <= 36) return AddressKind::P2SH;
            break;
        case 'K':
        case 'L':
            if (n == 52) return AddressKind::WifKey;
            break;
        case '5':
            if (n == 51) return AddressKind::WifKey;
            break;
        default:
            break;
    }
    return std::nullopt;
}

inline std::string derive_address(ByteView pubkey_hash, AddressScheme scheme) {
    if (pubkey_hash.size() != 20)
        fail(Errc::bad_payload_length, "pubkey hash must be 20 bytes, got " + std::to_string(pubkey_hash.size()));
    switch (scheme) {
        case AddressScheme::Base58CheckP2PKH: {
            Bytes buf{0x00};
            buf.insert(buf.end(), pubkey_hash.begin(), pubkey_hash.end());
            return base58::encode_check(buf);
        }
        case AddressScheme::Bech32V0: {
            std::vector<std::uint8_t> data{0};  // witness version 0
            auto prog = bech32::convert_bits(pubkey_hash, 8, 5, true);
            data.insert(data.end(), prog.begin(), prog.end());
            return bech32::encode("bc", data);
        }
    }
    fail(Errc::invalid_argument, "unknown address scheme");
}

/// Address for a public key: hash160 of the key bytes, then encoded.
inline std::string address_for_pubkey(ByteView pubkey, AddressScheme scheme = AddressScheme::Base58CheckP2PKH) {
    Hash160 h = hash160(pubkey);
    return derive_address(h, scheme);
}

/// Fully decodes an address (checksums enforced) into kind + payload.
inline Address decode_address(std::string_view text) {
    auto kind = classify_address(text);
    if (!kind) fail(Errc::bad_encoding, "unrecognized address: " + std::string(text));
    Address a{*kind, std::string(text), {}};
    switch (*kind) {
        case AddressKind::P2PKH:
        case AddressKind::P2SH:
        case AddressKind::WifKey: {
            Bytes body = base58::decode_check(text);
            a.payload.assign(body.begin() + 1, body.end());
            break;
        }
        case AddressKind::Bech32: {
            auto d = bech32::decode(text);
            if (d.hrp != "bc" || d.data.empty()) fail(Errc::bad_encoding, "not a mainnet segwit address");
            std::vector<std::uint8_t> prog(d.data.begin() + 1, d.data.end());
            a.payload = bech32::convert_bits(prog, 5, 8, false);
            break;
        }
        case AddressKind::AccountHex:
            a.payload = from_hex(text.substr(2));
            break;
        case AddressKind::Mnemonic:
            break;
    }
    return a;
}

/// Re-encodes a decoded address from its payload.
inline std::string encode_address(const Address& a) {
    switch (a.kind) {
        case AddressKind::P2PKH: return derive_address(a.payload, AddressScheme::Base58CheckP2PKH);
        case AddressKind::Bech32: return derive_address(a.payload, AddressScheme::Bech32V0);
        case AddressKind::P2SH:
        case AddressKind::WifKey: {
            Bytes body = base58::decode_check(a.text);
            Bytes buf{body[0]};
            buf.insert(buf.end(), a.payload.begin(), a.payload.end());
            return base58::encode_check(buf);
        }
        case AddressKind::AccountHex: return "0x" + to_hex(a.payload);
        case AddressKind::Mnemonic: return a.text;
    }
    return a.text;
}

/// Wraps free text that carries no decodable payload (e.g. simulation labels).
inline Address make_address(std::string_view text) {
    auto kind = classify_address(text);
    try {
        return decode_address(text);
    } catch (const Error&) {
        return Address{kind.value_or(AddressKind::P2PKH), std::string(text), {}};
    }
}

}  // namespace fisc::ledger
