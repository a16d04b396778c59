#pragma once

// Pluggable signature schemes. Everything that checks a signature (UTXO
// spends, ownership proofs, certificates) goes through SignatureScheme so a
// deterministic mock can stand in for real ECDSA in reproducible runs.

#include <memory>
#include <string>
#include <string_view>

#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/obj_mac.h>
#include <openssl/param_build.h>

#include "fisc/crypto/hash.hpp"

namespace fisc {

struct KeyPair {
    Bytes secret;
    Bytes pubkey;
};

class SignatureScheme {
public:
    virtual ~SignatureScheme() = default;

    virtual std::string_view name() const = 0;
    /// Derives a key pair deterministically from seed material.
    virtual KeyPair derive_keypair(ByteView seed) const = 0;
    virtual Bytes sign(const KeyPair& key, ByteView message) const = 0;
    virtual bool verify(ByteView pubkey, ByteView message, ByteView signature) const = 0;
};

/// Hash-based stand-in: fully deterministic, NOT unforgeable. Anyone holding
/// the public key can produce a valid signature; use only in simulations.
class MockSignatureScheme final : public SignatureScheme {
public:
    std::string_view name() const override { return "mock"; }

    KeyPair derive_keypair(ByteView seed) const override {
        Hash256 secret = tagged("fisc/mock/secret", {}, seed);
        Hash256 pub = tagged("fisc/mock/pub", {}, secret);
        KeyPair kp;
        kp.secret.assign(secret.begin(), secret.end());
        kp.pubkey.push_back(0x02);
        kp.pubkey.insert(kp.pubkey.end(), pub.begin(), pub.end());
        return kp;
    }

    Bytes sign(const KeyPair& key, ByteView message) const override {
        Hash256 sig = tagged("fisc/mock/sig", key.pubkey, message);
        return Bytes(sig.begin(), sig.end());
    }

    bool verify(ByteView pubkey, ByteView message, ByteView signature) const override {
        Hash256 expect = tagged("fisc/mock/sig", pubkey, message);
        return signature.size() == expect.size() && std::equal(expect.begin(), expect.end(), signature.begin());
    }

private:
    static Hash256 tagged(std::string_view tag, ByteView a, ByteView b) {
        Bytes buf(tag.begin(), tag.end());
        buf.insert(buf.end(), a.begin(), a.end());
        buf.insert(buf.end(), b.begin(), b.end());
        return sha256(buf);
    }
};

/// ECDSA over secp256k1 with SHA-256 message digests, backed by OpenSSL.
/// Public keys are 33-byte compressed points; signatures are DER. Signatures
/// are randomized, so traces using this scheme are not byte-reproducible.
class EcdsaSecp256k1Scheme final : public SignatureScheme {
public:
    std::string_view name() const override { return "ecdsa-secp256k1"; }

    KeyPair derive_keypair(ByteView seed) const override {
        Group group;
        Bn order(BN_new(), BN_free);
        EC_GROUP_get_order(group.get(), order.get(), nullptr);
        Hash256 h = sha256(seed);
        Bn priv(BN_bin2bn(h.data(), static_cast<int>(h.size()), nullptr), BN_free);
        // Reduce into [1, n-1].
        Bn n_minus_one(BN_dup(order.get()), BN_free);
        BN_sub_word(n_minus_one.get(), 1);
        BN_nnmod(priv.get(), priv.get(), n_minus_one.get(), ctx());
        BN_add_word(priv.get(), 1);

        std::unique_ptr<EC_POINT, decltype(&EC_POINT_free)> pub(EC_POINT_new(group.get()), EC_POINT_free);
        if (!EC_POINT_mul(group.get(), pub.get(), priv.get(), nullptr, nullptr, ctx()))
            fail(Errc::invalid_argument, "secp256k1 point multiplication failed");

        KeyPair kp;
        kp.secret.resize(32);
        BN_bn2binpad(priv.get(), kp.secret.data(), 32);
        kp.pubkey.resize(33);
        EC_POINT_point2oct(group.get(), pub.get(), POINT_CONVERSION_COMPRESSED, kp.pubkey.data(), 33, ctx());
        return kp;
    }

    Bytes sign(const KeyPair& key, ByteView message) const override {
        Pkey pkey = make_pkey(key.pubkey, key.secret);
        std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> md(EVP_MD_CTX_new(), EVP_MD_CTX_free);
        if (EVP_DigestSignInit(md.get(), nullptr, EVP_sha256(), nullptr, pkey.get()) != 1)
            fail(Errc::bad_signature, "ECDSA sign init failed");
        std::size_t len = 0;
        EVP_DigestSign(md.get(), nullptr, &len, message.data(), message.size());
        Bytes sig(len);
        if (EVP_DigestSign(md.get(), sig.data(), &len, message.data(), message.size()) != 1)
            fail(Errc::bad_signature, "ECDSA sign failed");
        sig.resize(len);
        return sig;
    }

    bool verify(ByteView pubkey, ByteView message, ByteView signature) const override {
        if (pubkey.size() != 33) return false;
        Pkey pkey = make_pkey(pubkey, {});
        if (!pkey) return false;
        std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> md(EVP_MD_CTX_new(), EVP_MD_CTX_free);
        if (EVP_DigestVerifyInit(md.get(), nullptr, EVP_sha256(), nullptr, pkey.get()) != 1) return false;
        return EVP_DigestVerify(md.get(), signature.data(), signature.size(), message.data(), message.size()) == 1;
    }

private:
    using Bn = std::unique_ptr<BIGNUM, decltype(&BN_free)>;
    using Pkey = std::unique_ptr<EVP_PKEY, decltype(&EVP_PKEY_free)>;

    struct Group {
        std::unique_ptr<EC_GROUP, decltype(&EC_GROUP_free)> g{EC_GROUP_new_by_curve_name(NID_secp256k1),
                                                              EC_GROUP_free};
        EC_GROUP* get() const { return g.get(); }
    };

    static BN_CTX* ctx() {
        thread_local std::unique_ptr<BN_CTX, decltype(&BN_CTX_free)> c(BN_CTX_new(), BN_CTX_free);
        return c.get();
    }

    static Pkey make_pkey(ByteView pub, ByteView secret) {
        std::unique_ptr<OSSL_PARAM_BLD, decltype(&OSSL_PARAM_BLD_free)> bld(OSSL_PARAM_BLD_new(),
                                                                            OSSL_PARAM_BLD_free);
        OSSL_PARAM_BLD_push_utf8_string(bld.get(), OSSL_PKEY_PARAM_GROUP_NAME, "secp256k1", 0);
        OSSL_PARAM_BLD_push_octet_string(bld.get(), OSSL_PKEY_PARAM_PUB_KEY, pub.data(), pub.size());
        Bn priv(nullptr, BN_free);
        if (!secret.empty()) {
            priv.reset(BN_bin2bn(secret.data(), static_cast<int>(secret.size()), nullptr));
            OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_PRIV_KEY, priv.get());
        }
        std::unique_ptr<OSSL_PARAM, decltype(&OSSL_PARAM_free)> params(OSSL_PARAM_BLD_to_param(bld.get()),
                                                                       OSSL_PARAM_free);
        std::unique_ptr<EVP_PKEY_CTX, decltype(&EVP_PKEY_CTX_free)> pctx(
            EVP_PKEY_CTX_new_from_name(nullptr, "EC", nullptr), EVP_PKEY_CTX_free);
        EVP_PKEY* raw = nullptr;
        if (!pctx || EVP_PKEY_fromdata_init(pctx.get()) != 1 ||
            EVP_PKEY_fromdata(pctx.get(), &raw, secret.empty() ? EVP_PKEY_PUBLIC_KEY : EVP_PKEY_KEYPAIR,
                              params.get()) != 1)
            return Pkey(nullptr, EVP_PKEY_free);
        return Pkey(raw, EVP_PKEY_free);
    }
};

inline const SignatureScheme& default_signature_scheme() {
    static const MockSignatureScheme scheme;
    return scheme;
}

}  // namespace fisc
