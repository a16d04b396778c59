#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "fisc/core/amount.hpp"
#include "fisc/crypto/signature.hpp"
#include "fisc/ledger/address.hpp"

namespace fisc::ledger {

struct OutPoint {
    Hash256 txid{};
    std::uint32_t index = 0;

    friend auto operator<=>(const OutPoint&, const OutPoint&) = default;
};

struct Utxo {
    OutPoint outpoint;
    Address owner;
    Amount value;
};

/// Unspent outputs keyed by outpoint. Single writer; copies are cheap enough
/// for desk-scale sets.
class UtxoSet {
public:
    void insert(Utxo u) {
        if (u.value.is_zero()) fail(Errc::invalid_argument, "utxo value must be positive");
        auto [it, inserted] = utxos_.emplace(u.outpoint, std::move(u));
        if (!inserted) fail(Errc::invalid_argument, "duplicate outpoint in utxo set");
    }
    const Utxo* find(const OutPoint& op) const {
        auto it = utxos_.find(op);
        return it == utxos_.end() ? nullptr : &it->second;
    }
    bool erase(const OutPoint& op) { return utxos_.erase(op) > 0; }
    std::size_t size() const { return utxos_.size(); }
    auto begin() const { return utxos_.begin(); }
    auto end() const { return utxos_.end(); }

private:
    std::map<OutPoint, Utxo> utxos_;
};

struct TxInput {
    OutPoint prevout;
    Bytes signer_pubkey;
    Bytes signature;
};

struct TxOutput {
    Address owner;
    Amount value;
};

struct UtxoTransaction {
    std::vector<TxInput> inputs;
    std::vector<TxOutput> outputs;
    std::uint64_t weight_units = 1;

    /// Canonical bytes without signatures; both the signed message and the
    /// txid preimage, so ids do not depend on signature malleability.
    Bytes sighash_preimage() const {
        Bytes out;
        auto put_u32 = [&](std::uint32_t v) {
            for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        };
        auto put_str = [&](std::string_view s) {
            put_u32(static_cast<std::uint32_t>(s.size()));
            out.insert(out.end(), s.begin(), s.end());
        };
        put_u32(static_cast<std::uint32_t>(inputs.size()));
        for (const auto& in : inputs) {
            out.insert(out.end(), in.prevout.txid.begin(), in.prevout.txid.end());
            put_u32(in.prevout.index);
        }
        put_u32(static_cast<std::uint32_t>(outputs.size()));
        for (const auto& o : outputs) {
            put_str(o.owner.text);
            put_str(o.value.units().str());
            put_u32(o.value.decimals());
        }
        put_str(std::to_string(weight_units));
        return out;
    }

    Hash256 txid() const { return dsha256(sighash_preimage()); }

    void sign_input(std::size_t i, const KeyPair& key, const SignatureScheme& scheme = default_signature_scheme()) {
        inputs.at(i).signer_pubkey = key.pubkey;
        inputs.at(i).signature = scheme.sign(key, sighash_preimage());
    }
};

inline AddressScheme scheme_for(AddressKind kind) {
    return kind == AddressKind::Bech32 ? AddressScheme::Bech32V0 : AddressScheme::Base58CheckP2PKH;
}

/// Checks a spend against the set and returns the fee (inputs minus outputs).
/// Does not mutate the set; see apply_utxo_tx.
inline Amount validate_utxo_tx(const UtxoTransaction& tx, const UtxoSet& utxos,
                               const SignatureScheme& scheme = default_signature_scheme()) {
    if (tx.inputs.empty()) fail(Errc::empty_input, "transaction has no inputs");
    if (tx.outputs.empty()) fail(Errc::no_outputs, "transaction has no outputs");
    if (tx.weight_units == 0) fail(Errc::invalid_argument, "weight must be positive");

    const Bytes message = tx.sighash_preimage();
    std::set<OutPoint> seen;
    std::optional<Amount> total_in;
    for (const auto& in : tx.inputs) {
        if (!seen.insert(in.prevout).second)
            fail(Errc::duplicate_input, "outpoint spent twice in one transaction: " + to_hex(in.prevout.txid) + ":" +
                                            std::to_string(in.prevout.index));
        const Utxo* u = utxos.find(in.prevout);
        if (!u)
            fail(Errc::unknown_outpoint,
                 "unknown outpoint " + to_hex(in.prevout.txid) + ":" + std::to_string(in.prevout.index));
        if (address_for_pubkey(in.signer_pubkey, scheme_for(u->owner.kind)) != u->owner.text)
            fail(Errc::owner_mismatch, "signer key does not hash to " + u->owner.text);
        if (!scheme.verify(in.signer_pubkey, message, in.signature))
            fail(Errc::bad_signature, "signature check failed for input owned by " + u->owner.text);
        total_in = total_in ? *total_in + u->value : u->value;
    }

    Amount total_out = Amount::zero(total_in->decimals());
    for (const auto& o : tx.outputs) {
        if (o.value.is_zero()) fail(Errc::invalid_argument, "output value must be positive");
        total_out += o.value;
    }
    if (total_out > *total_in)
        fail(Errc::overspend, "outputs " + total_out.to_string() + " exceed inputs " + total_in->to_string());
    return *total_in - total_out;
}

/// Validates, then removes the spent inputs and inserts the new outputs.
inline Amount apply_utxo_tx(const UtxoTransaction& tx, UtxoSet& utxos,
                            const SignatureScheme& scheme = default_signature_scheme()) {
    Amount fee = validate_utxo_tx(tx, utxos, scheme);
    const Hash256 id = tx.txid();
    for (const auto& in : tx.inputs) utxos.erase(in.prevout);
    for (std::uint32_t i = 0; i < tx.outputs.size(); ++i)
        utxos.insert(Utxo{OutPoint{id, i}, tx.outputs[i].owner, tx.outputs[i].value});
    return fee;
}

}  // namespace fisc::ledger
