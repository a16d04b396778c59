#pragma once

// Certificates, ownership proofs and the authority registry behind the
// cross-border attribution protocol.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fisc/core/error.hpp"
#include "fisc/crypto/signature.hpp"
#include "fisc/ledger/address.hpp"

namespace fisc::attrib {

using Tick = std::uint64_t;

namespace detail {

/// Domain-separated, length-prefixed encoding of the signed fields.
inline Bytes signing_message(std::string_view tag, std::initializer_list<ByteView> fields) {
    Bytes out(tag.begin(), tag.end());
    out.push_back(0);
    for (ByteView f : fields) {
        const auto n = static_cast<std::uint32_t>(f.size());
        for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(n >> shift));
        out.insert(out.end(), f.begin(), f.end());
    }
    return out;
}

}  // namespace detail

struct DigitalSignatureCertificate {
    std::string tin;
    Bytes holder_pubkey;
    std::string issuer;
    Bytes issuer_signature;
};

inline Bytes dsc_message(const std::string& tin, ByteView holder_pubkey, const std::string& issuer) {
    return detail::signing_message("fisc/dsc", {as_bytes(tin), holder_pubkey, as_bytes(issuer)});
}

inline bool verify_dsc(const DigitalSignatureCertificate& dsc, ByteView issuer_pubkey, const SignatureScheme& scheme) {
    return scheme.verify(issuer_pubkey, dsc_message(dsc.tin, dsc.holder_pubkey, dsc.issuer), dsc.issuer_signature);
}

/// Binds a wallet address to a TIN. The wallet key signs the authority's
/// challenge and the certificate holder key signs (tin, address).
struct OwnershipProof {
    std::string tin;
    std::string address;
    Bytes wallet_pubkey;
    Bytes challenge;
    Bytes wallet_signature;
    Bytes dsc_signature;
};

inline Bytes ownership_message(const std::string& tin, const std::string& address) {
    return detail::signing_message("fisc/own", {as_bytes(tin), as_bytes(address)});
}

/// Challenge an authority expects for (tin, address). Tying it to the
/// jurisdiction stops a proof being replayed at another authority.
inline Bytes registration_challenge(const std::string& jurisdiction, const std::string& tin,
                                    const std::string& address) {
    Hash256 h = sha256(detail::signing_message("fisc/challenge", {as_bytes(jurisdiction), as_bytes(tin),
                                                                  as_bytes(address)}));
    return Bytes(h.begin(), h.end());
}

/// True when `address` is the P2PKH or bech32 address of `pubkey`.
inline bool address_matches_pubkey(const std::string& address, ByteView pubkey) {
    return address == ledger::address_for_pubkey(pubkey, ledger::AddressScheme::Base58CheckP2PKH) ||
           address == ledger::address_for_pubkey(pubkey, ledger::AddressScheme::Bech32V0);
}

inline OwnershipProof make_ownership_proof(const std::string& jurisdiction, const std::string& tin,
                                           const KeyPair& wallet, const KeyPair& dsc_holder,
                                           const SignatureScheme& scheme,
                                           ledger::AddressScheme addr = ledger::AddressScheme::Base58CheckP2PKH) {
    OwnershipProof p;
    p.tin = tin;
    p.address = ledger::address_for_pubkey(wallet.pubkey, addr);
    p.wallet_pubkey = wallet.pubkey;
    p.challenge = registration_challenge(jurisdiction, tin, p.address);
    p.wallet_signature = scheme.sign(wallet, p.challenge);
    p.dsc_signature = scheme.sign(dsc_holder, ownership_message(tin, p.address));
    return p;
}

/// Full check of a proof against the certificate it claims. Throws with the
/// first failing condition.
inline void check_ownership_proof(const OwnershipProof& p, const DigitalSignatureCertificate& dsc,
                                  const std::string& jurisdiction, const SignatureScheme& scheme) {
    if (!address_matches_pubkey(p.address, p.wallet_pubkey))
        fail(Errc::owner_mismatch, "address " + p.address + " is not derived from the signing key");
    if (p.challenge != registration_challenge(jurisdiction, p.tin, p.address))
        fail(Errc::bad_signature, "challenge was not issued by " + jurisdiction);
    if (!scheme.verify(p.wallet_pubkey, p.challenge, p.wallet_signature))
        fail(Errc::bad_signature, "wallet signature does not verify");
    if (!scheme.verify(dsc.holder_pubkey, ownership_message(p.tin, p.address), p.dsc_signature))
        fail(Errc::bad_signature, "certificate holder signature does not verify");
}

/// Pairwise exchange-of-information permissions. The diagonal is always
/// allow.
class EoiMatrix {
public:
    void set(const std::string& asker, const std::string& responder, bool allow) {
        if (asker == responder && !allow) fail(Errc::schema_violation, "EOI diagonal must allow (" + asker + ")");
        cells_[{asker, responder}] = allow;
    }

    bool allows(const std::string& asker, const std::string& responder) const {
        if (asker == responder) return true;
        auto it = cells_.find({asker, responder});
        if (it == cells_.end()) fail(Errc::schema_violation, "EOI matrix has no cell " + asker + " -> " + responder);
        return it->second;
    }

    /// Every ordered pair over `codes` must be defined.
    void validate(const std::set<std::string>& codes) const {
        for (const auto& a : codes)
            for (const auto& b : codes)
                if (a != b && !cells_.contains({a, b}))
                    fail(Errc::schema_violation, "EOI matrix has no cell " + a + " -> " + b);
        for (const auto& [cell, allow] : cells_)
            if (!codes.contains(cell.first) || !codes.contains(cell.second))
                fail(Errc::unknown_jurisdiction, "EOI cell names unknown jurisdiction " + cell.first + " -> " +
                                                     cell.second);
    }

private:
    std::map<std::pair<std::string, std::string>, bool> cells_;
};

class TaxAuthority {
public:
    TaxAuthority(std::string code, KeyPair issuer, const SignatureScheme& scheme)
        : code_(std::move(code)), issuer_(std::move(issuer)), scheme_(&scheme) {}

    const std::string& code() const { return code_; }
    const Bytes& public_key() const { return issuer_.pubkey; }

    DigitalSignatureCertificate issue_dsc(const std::string& tin, ByteView holder_pubkey) {
        if (tin.empty()) fail(Errc::invalid_argument, "empty TIN");
        if (dscs_.contains(tin)) fail(Errc::duplicate_tin, "TIN " + tin + " already holds a certificate from " + code_);
        DigitalSignatureCertificate dsc{tin, Bytes(holder_pubkey.begin(), holder_pubkey.end()), code_, {}};
        dsc.issuer_signature = scheme_->sign(issuer_, dsc_message(tin, holder_pubkey, code_));
        dscs_.emplace(tin, dsc);
        return dsc;
    }

    const DigitalSignatureCertificate* certificate(const std::string& tin) const {
        auto it = dscs_.find(tin);
        return it == dscs_.end() ? nullptr : &it->second;
    }

    /// Verifies and stores a proof. Re-registering the same address to the
    /// same TIN is a no-op; to another TIN it is a conflict.
    void register_ownership(const OwnershipProof& proof) {
        const auto* dsc = certificate(proof.tin);
        if (!dsc) fail(Errc::unknown_tin, "TIN " + proof.tin + " has no certificate from " + code_);
        auto existing = registry_.find(proof.address);
        if (existing != registry_.end() && existing->second.tin != proof.tin)
            fail(Errc::address_conflict, proof.address + " is already registered to another TIN");
        check_ownership_proof(proof, *dsc, code_, *scheme_);
        registry_[proof.address] = proof;
    }

    const OwnershipProof* lookup(const std::string& address) const {
        auto it = registry_.find(address);
        return it == registry_.end() ? nullptr : &it->second;
    }

    /// Lookup plus re-verification, as done before answering a query.
    bool holds_verified(const std::string& address) const {
        const auto* p = lookup(address);
        if (!p) return false;
        const auto* dsc = certificate(p->tin);
        if (!dsc || !verify_dsc(*dsc, issuer_.pubkey, *scheme_)) return false;
        try {
            check_ownership_proof(*p, *dsc, code_, *scheme_);
        } catch (const Error&) {
            return false;
        }
        return true;
    }

    const std::map<std::string, OwnershipProof>& registry() const { return registry_; }

private:
    std::string code_;
    KeyPair issuer_;
    const SignatureScheme* scheme_;
    std::map<std::string, DigitalSignatureCertificate> dscs_;
    std::map<std::string, OwnershipProof> registry_;
};

// ---------------------------------------------------------------------------
// Travel rule

/// Any one of these satisfies the originator's physical identification;
/// birth date and place count only together.
struct PhysicalId {
    std::string geographic_address;
    std::string national_id;
    std::string customer_id;
    std::string birth_date;
    std::string birth_place;

    bool satisfied() const {
        return !geographic_address.empty() || !national_id.empty() || !customer_id.empty() ||
               (!birth_date.empty() && !birth_place.empty());
    }
};

struct Identity {
    std::string name;
    std::string account;
    PhysicalId physical;
};

struct TravelRuleRecord {
    std::string originator_name;
    std::string originator_account;
    PhysicalId originator_physical_id;
    std::string beneficiary_name;
    std::string beneficiary_account;
};

inline bool is_account_address(const std::string& text) {
    auto kind = ledger::classify_address(text);
    if (!kind || *kind == ledger::AddressKind::WifKey || *kind == ledger::AddressKind::Mnemonic) return false;
    try {
        ledger::decode_address(text);
    } catch (const Error&) {
        return false;
    }
    return true;
}

inline void validate(const TravelRuleRecord& r) {
    auto missing = [](const char* what) { fail(Errc::incomplete_travel_record, std::string("missing ") + what); };
    if (r.originator_name.empty()) missing("originator name");
    if (!is_account_address(r.originator_account)) missing("originator account (valid wallet address)");
    if (!r.originator_physical_id.satisfied())
        missing("originator physical address, national id, customer id or date and place of birth");
    if (r.beneficiary_name.empty()) missing("beneficiary name");
    if (!is_account_address(r.beneficiary_account)) missing("beneficiary account (valid wallet address)");
}

inline TravelRuleRecord build_travel_rule_record(const Identity& originator, const Identity& beneficiary) {
    TravelRuleRecord r{originator.name, originator.account, originator.physical, beneficiary.name,
                       beneficiary.account};
    validate(r);
    return r;
}

}  // namespace fisc::attrib
