#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <openssl/ripemd.h>
#include <openssl/sha.h>

#include "fisc/core/error.hpp"

namespace fisc {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
using Hash256 = std::array<std::uint8_t, 32>;
using Hash160 = std::array<std::uint8_t, 20>;

inline ByteView as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline Hash256 sha256(ByteView data) {
    Hash256 out{};
    SHA256(data.data(), data.size(), out.data());
    return out;
}

/// SHA-256 applied twice, as used for Bitcoin ids and merkle nodes.
inline Hash256 dsha256(ByteView data) {
    Hash256 first = sha256(data);
    return sha256(first);
}

inline Hash160 ripemd160(ByteView data) {
    Hash160 out{};
    // Deprecated in OpenSSL 3 but still the simplest way to reach RIPEMD-160.
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wdeprecated-declarations"
    RIPEMD160(data.data(), data.size(), out.data());
#pragma GCC diagnostic pop
    return out;
}

/// RIPEMD160(SHA256(data)): the 20-byte payload behind P2PKH and P2WPKH.
inline Hash160 hash160(ByteView data) {
    Hash256 inner = sha256(data);
    return ripemd160(inner);
}

inline std::string to_hex(ByteView data) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xf]);
    }
    return out;
}

inline Bytes from_hex(std::string_view hex) {
    auto nibble = [&](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        fail(Errc::bad_encoding, "invalid hex digit in " + std::string(hex));
    };
    if (hex.size() % 2 != 0) fail(Errc::bad_encoding, "odd-length hex string");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
    return out;
}

template <std::size_t N>
std::array<std::uint8_t, N> fixed_from_hex(std::string_view hex) {
    Bytes b = from_hex(hex);
    if (b.size() != N) fail(Errc::bad_payload_length, "expected " + std::to_string(N) + " bytes of hex");
    std::array<std::uint8_t, N> out{};
    std::copy(b.begin(), b.end(), out.begin());
    return out;
}

}  // namespace fisc
