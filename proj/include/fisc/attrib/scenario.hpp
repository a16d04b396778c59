#pragma once

// Declarative attribution scenarios: jurisdictions, EOI matrix, holders and
// their wallets, registrations (optionally tampered) and transfers.
//
//   {"seed": 7, "jurisdictions": ["J1", "J2", "J3"],
//    "eoi": {"J1": {"J2": "allow", "J3": "deny"}, ...},
//    "latency": 1, "drop": 0, "links": [{"from": "J1", "to": "J2", "latency": 3, "drop": 0.5}],
//    "policy": {"standard_withholding": "10%", "elevated_withholding": "30%"},
//    "assets": {"BTC": 8},
//    "holders": [{"id": "alice", "jurisdiction": "J1", "tin": "J1-0001", "name": "Alice",
//                 "physical_id": {"national_id": "X123"}, "wallets": ["main"]}],
//    "registrations": [{"wallet": "alice/main", "tamper": "wallet_signature"}],
//    "transfers": [{"from": "alice/main", "to": "bob/main", "asset": "BTC",
//                   "amount": "100000000", "fmv_unit": "40000", "deadline": 4}]}

#include <sstream>

#include "fisc/attrib/network.hpp"
#include "fisc/core/json_doc.hpp"
#include "fisc/tax/io.hpp"

namespace fisc::attrib {

enum class Tamper { none, wallet_signature, dsc_signature, foreign_wallet_key, replayed_challenge };

inline Tamper parse_tamper(const std::string& s) {
    if (s == "none") return Tamper::none;
    if (s == "wallet_signature") return Tamper::wallet_signature;
    if (s == "dsc_signature") return Tamper::dsc_signature;
    if (s == "foreign_wallet_key") return Tamper::foreign_wallet_key;
    if (s == "replayed_challenge") return Tamper::replayed_challenge;
    fail(Errc::schema_violation,
         "tamper must be none | wallet_signature | dsc_signature | foreign_wallet_key | replayed_challenge");
}

struct HolderSpec {
    std::string id;
    std::string jurisdiction;
    std::string tin;
    Identity identity;  // account filled per wallet
    std::vector<std::string> wallets;
    bool certificate = true;
};

struct RegistrationSpec {
    std::string wallet;  // holder/wallet
    std::optional<std::string> jurisdiction;
    Tamper tamper = Tamper::none;
};

struct TransferSpec {
    std::string from;
    std::string to;  // holder/wallet, or a raw address
    std::string asset;
    Amount amount;
    Rational fmv_unit = 0;
    Tick deadline = 4;
};

struct Scenario {
    std::uint64_t seed = 0;
    std::string scheme = "mock";
    std::vector<std::string> jurisdictions;
    std::map<std::pair<std::string, std::string>, bool> eoi;
    LinkConfig default_link;
    std::vector<std::tuple<std::string, std::string, LinkConfig>> links;
    tax::JurisdictionPolicy policy;
    std::map<std::string, unsigned> assets;
    std::vector<HolderSpec> holders;
    std::vector<RegistrationSpec> registrations;
    std::vector<TransferSpec> transfers;
};

struct RegistrationOutcome {
    std::string wallet;
    std::string jurisdiction;
    std::string address;
    bool accepted = false;
    std::string reason;
};

struct ScenarioResult {
    std::string trace;
    std::vector<RegistrationOutcome> registrations;
    std::vector<TransferOutcome> transfers;
    std::vector<std::pair<std::string, std::string>> endpoints;  // (origin, beneficiary) address per transfer
    tax::EventFile events;
};

namespace detail {

inline LinkConfig read_link(const JsonObject& o, LinkConfig base) {
    base.latency = o.u64("latency", base.latency);
    base.drop = o.real("drop", base.drop);
    if (!(base.drop >= 0 && base.drop <= 1)) o.error("drop", "must be in [0, 1]");
    return base;
}

inline PhysicalId read_physical(const JsonObject& o) {
    PhysicalId p;
    p.geographic_address = o.str("address", "");
    p.national_id = o.str("national_id", "");
    p.customer_id = o.str("customer_id", "");
    p.birth_date = o.str("birth_date", "");
    p.birth_place = o.str("birth_place", "");
    o.done();
    return p;
}

}  // namespace detail

/// `base` supplies policy defaults that the scenario's own policy block
/// overrides key by key.
inline Scenario parse_scenario(const Json& doc, const std::string& source, const tax::JurisdictionPolicy& base = {}) {
    JsonObject root(doc, source);
    Scenario s;
    s.policy = base;
    s.seed = root.u64("seed", 0);
    s.scheme = root.str("scheme", "mock");
    if (s.scheme != "mock" && s.scheme != "ecdsa-secp256k1") root.error("scheme", "expected mock or ecdsa-secp256k1");
    s.jurisdictions = root.strings("jurisdictions");
    if (s.jurisdictions.empty()) root.error("jurisdictions", "at least one jurisdiction is required");
    const std::set<std::string> codes(s.jurisdictions.begin(), s.jurisdictions.end());
    if (codes.size() != s.jurisdictions.size()) root.error("jurisdictions", "duplicate code");

    if (root.has("eoi")) {
        JsonObject eoi = root.object("eoi");
        for (const auto& asker : eoi.keys()) {
            JsonObject row = eoi.object(asker);
            for (const auto& responder : row.keys()) {
                const std::string v = row.str(responder);
                if (v != "allow" && v != "deny") row.error(responder, "expected allow or deny");
                s.eoi[{asker, responder}] = v == "allow";
            }
        }
    }
    s.default_link = detail::read_link(root, LinkConfig{});
    for (const auto& l : root.objects("links")) {
        s.links.emplace_back(l.str("from"), l.str("to"), detail::read_link(l, s.default_link));
        l.done();
    }
    if (root.has("policy")) {
        JsonObject p = root.object("policy");
        std::string text;
        for (const auto& k : p.keys()) {
            const Json& v = p.raw(k);
            text += k + " = " + (v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
        }
        auto cfg = KeyValueConfig::parse(text, source + ": policy");
        s.policy = tax::load_policy(cfg, base);
        cfg.reject_unknown();
    }
    if (root.has("assets")) {
        JsonObject a = root.object("assets");
        for (const auto& k : a.keys()) {
            auto d = a.u64(k);
            if (d > 30) a.error(k, "decimals must be at most 30");
            s.assets[k] = static_cast<unsigned>(d);
        }
    }
    for (const auto& h : root.objects("holders")) {
        HolderSpec hs;
        hs.id = h.str("id");
        hs.jurisdiction = h.str("jurisdiction");
        if (!codes.contains(hs.jurisdiction)) h.error("jurisdiction", "unknown jurisdiction " + hs.jurisdiction);
        hs.tin = h.str("tin");
        hs.identity.name = h.str("name", "");
        if (h.has("physical_id")) hs.identity.physical = detail::read_physical(h.object("physical_id"));
        hs.wallets = h.strings("wallets");
        hs.certificate = h.boolean("certificate", true);
        h.done();
        for (const auto& other : s.holders)
            if (other.id == hs.id) h.error("id", "duplicate holder " + hs.id);
        s.holders.push_back(std::move(hs));
    }
    for (const auto& r : root.objects("registrations")) {
        RegistrationSpec rs;
        rs.wallet = r.str("wallet");
        if (r.has("jurisdiction")) rs.jurisdiction = r.str("jurisdiction");
        try {
            rs.tamper = parse_tamper(r.str("tamper", "none"));
        } catch (const Error& e) {
            r.error("tamper", e.what());
        }
        r.done();
        s.registrations.push_back(std::move(rs));
    }
    for (const auto& t : root.objects("transfers")) {
        TransferSpec ts;
        ts.from = t.str("from");
        ts.to = t.str("to");
        ts.asset = t.str("asset");
        auto dec = s.assets.find(ts.asset);
        if (dec == s.assets.end()) t.error("asset", "asset " + ts.asset + " not declared in assets");
        ts.amount = t.units("amount", dec->second);
        ts.fmv_unit = t.rational("fmv_unit", 0);
        ts.deadline = t.u64("deadline", 4);
        t.done();
        s.transfers.push_back(std::move(ts));
    }
    root.done();
    return s;
}

inline Scenario load_scenario(const std::string& path, const tax::JurisdictionPolicy& base = {}) {
    return parse_scenario(load_json_file(path), path, base);
}

inline const SignatureScheme& scheme_named(const std::string& name) {
    static const MockSignatureScheme mock;
    static const EcdsaSecp256k1Scheme ecdsa;
    if (name == "ecdsa-secp256k1") return ecdsa;
    return mock;
}

/// Runs a scenario from scratch. Everything that could vary between runs
/// derives from the scenario seed.
inline ScenarioResult run_scenario(const Scenario& s) {
    Network net(s.seed, scheme_named(s.scheme));
    for (const auto& code : s.jurisdictions) net.add_authority(code);
    for (const auto& [cell, allow] : s.eoi) net.eoi().set(cell.first, cell.second, allow);
    net.eoi().validate(net.codes());
    net.set_default_link(s.default_link);
    for (const auto& [from, to, cfg] : s.links) {
        net.authority(from);
        net.authority(to);
        net.set_link(from, to, cfg);
    }

    struct Wallet {
        const HolderSpec* holder;
        KeyPair key;
        std::string address;
    };
    std::map<std::string, Wallet> wallets;
    std::map<std::string, KeyPair> dsc_keys;
    HolderDirectory directory;
    for (const auto& h : s.holders) {
        KeyPair dsc_key = net.derive_key("dsc/" + h.id);
        if (h.certificate) net.issue_dsc(h.jurisdiction, h.tin, dsc_key.pubkey);
        dsc_keys[h.id] = dsc_key;
        for (const auto& w : h.wallets) {
            const std::string ref = h.id + "/" + w;
            if (wallets.contains(ref)) fail(Errc::schema_violation, "duplicate wallet " + ref);
            KeyPair key = net.derive_key("wallet/" + ref);
            std::string address = ledger::address_for_pubkey(key.pubkey);
            Identity id = h.identity;
            id.account = address;
            directory.by_address[address] = id;
            wallets.emplace(ref, Wallet{&h, std::move(key), std::move(address)});
        }
    }
    auto wallet = [&](const std::string& ref) -> const Wallet& {
        auto it = wallets.find(ref);
        if (it == wallets.end()) fail(Errc::schema_violation, "unknown wallet " + ref);
        return it->second;
    };

    ScenarioResult out;
    for (const auto& r : s.registrations) {
        const Wallet& w = wallet(r.wallet);
        const std::string code = r.jurisdiction.value_or(w.holder->jurisdiction);
        const KeyPair& dsc_key = dsc_keys.at(w.holder->id);
        OwnershipProof proof = make_ownership_proof(code, w.holder->tin, w.key, dsc_key, net.scheme());
        switch (r.tamper) {
            case Tamper::none: break;
            case Tamper::wallet_signature: proof.wallet_signature.at(0) ^= 0x01; break;
            case Tamper::dsc_signature: proof.dsc_signature.at(0) ^= 0x01; break;
            case Tamper::foreign_wallet_key: {
                KeyPair other = net.derive_key("foreign/" + r.wallet);
                proof.wallet_signature = net.scheme().sign(other, proof.challenge);
                break;
            }
            case Tamper::replayed_challenge: {
                proof.challenge = registration_challenge(code + "-elsewhere", proof.tin, proof.address);
                proof.wallet_signature = net.scheme().sign(w.key, proof.challenge);
                break;
            }
        }
        RegistrationOutcome o{r.wallet, code, w.address, true, ""};
        try {
            net.register_ownership(code, proof);
        } catch (const Error& e) {
            if (e.code() == Errc::unknown_jurisdiction) throw;
            o.accepted = false;
            o.reason = std::string(to_string(e.code()));
        }
        out.registrations.push_back(std::move(o));
    }

    out.events.asset_decimals = s.assets;
    std::uint64_t seq = 0;
    for (const auto& t : s.transfers) {
        const std::string from = wallet(t.from).address;
        const std::string to = wallets.contains(t.to) ? wallets.at(t.to).address : t.to;
        auto o = net.originate_transfer(from, to, t.asset, t.amount, t.fmv_unit, s.policy, directory, t.deadline,
                                        ++seq);
        out.events.events.push_back(o.event);
        out.endpoints.emplace_back(from, to);
        out.transfers.push_back(std::move(o));
    }
    out.trace = net.trace_text();
    return out;
}

inline std::string withholding_ledger_csv(const ScenarioResult& r) {
    std::ostringstream os;
    os << "transfer,origin,beneficiary,asset,amount,result,jurisdiction,proceeds,withholding,travel_record\n";
    for (std::size_t i = 0; i < r.transfers.size(); ++i) {
        const auto& t = r.transfers[i];
        os << t.event.seq << ',' << r.endpoints[i].first << ',' << r.endpoints[i].second << ',' << t.event.asset
           << ',' << t.event.quantity.to_string() << ','
           << (t.query.result == tax::AttributionResult::affirmed ? "affirmed" : "unaffirmed") << ','
           << t.query.jurisdiction.value_or("") << ',' << t.proceeds.to_string() << ','
           << t.withholding.to_string() << ',' << (t.travel_record ? "yes" : "no") << '\n';
    }
    return os.str();
}

inline std::string travel_records_jsonl(const ScenarioResult& r) {
    std::ostringstream os;
    for (const auto& t : r.transfers) {
        if (!t.travel_record) continue;
        const auto& tr = *t.travel_record;
        nlohmann::ordered_json j;
        j["transfer"] = t.event.seq;
        j["originator_name"] = tr.originator_name;
        j["originator_account"] = tr.originator_account;
        nlohmann::ordered_json pid = nlohmann::ordered_json::object();
        const auto& p = tr.originator_physical_id;
        if (!p.geographic_address.empty()) pid["address"] = p.geographic_address;
        if (!p.national_id.empty()) pid["national_id"] = p.national_id;
        if (!p.customer_id.empty()) pid["customer_id"] = p.customer_id;
        if (!p.birth_date.empty()) pid["birth_date"] = p.birth_date;
        if (!p.birth_place.empty()) pid["birth_place"] = p.birth_place;
        j["originator_physical_id"] = pid;
        j["beneficiary_name"] = tr.beneficiary_name;
        j["beneficiary_account"] = tr.beneficiary_account;
        os << j.dump() << '\n';
    }
    return os.str();
}

inline std::string registrations_csv(const ScenarioResult& r) {
    std::ostringstream os;
    os << "wallet,jurisdiction,address,accepted,reason\n";
    for (const auto& g : r.registrations)
        os << g.wallet << ',' << g.jurisdiction << ',' << g.address << ',' << (g.accepted ? "yes" : "no") << ','
           << g.reason << '\n';
    return os.str();
}

}  // namespace fisc::attrib
