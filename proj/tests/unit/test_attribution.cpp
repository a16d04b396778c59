#include <gtest/gtest.h>

#include <random>

#include "fisc/attrib/scenario.hpp"

using namespace fisc;
using namespace fisc::attrib;
using tax::AttributionResult;

namespace {

Errc error_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return Errc::invalid_argument;
}

struct Holder {
    std::string code;
    std::string tin;
    KeyPair dsc_key;
    KeyPair wallet;
    std::string address;
};

/// Three authorities, every off-diagonal cell set to `allow`.
struct World {
    Network net;
    std::map<std::string, Holder> holders;

    explicit World(std::uint64_t seed = 1, bool allow = true) : net(seed) {
        for (const char* c : {"J1", "J2", "J3"}) net.add_authority(c);
        for (const char* a : {"J1", "J2", "J3"})
            for (const char* b : {"J1", "J2", "J3"})
                if (std::string(a) != b) net.eoi().set(a, b, allow);
    }

    Holder& holder(const std::string& name, const std::string& code, bool register_wallet = true) {
        Holder h{code, code + "-" + name, net.derive_key("dsc/" + name), net.derive_key("wallet/" + name), ""};
        h.address = ledger::address_for_pubkey(h.wallet.pubkey);
        net.issue_dsc(code, h.tin, h.dsc_key.pubkey);
        if (register_wallet)
            net.register_ownership(code, make_ownership_proof(code, h.tin, h.wallet, h.dsc_key, net.scheme()));
        return holders[name] = h;
    }
};

HolderDirectory directory_of(const World& w) {
    HolderDirectory d;
    for (const auto& [name, h] : w.holders)
        d.by_address[h.address] = Identity{name, h.address, PhysicalId{"", "ID-" + name, "", "", ""}};
    return d;
}

tax::JurisdictionPolicy rates() {
    tax::JurisdictionPolicy p;
    p.standard_withholding = Rational(1, 10);
    p.elevated_withholding = Rational(3, 10);
    return p;
}

}  // namespace

TEST(Certificate, IssueVerifyTamperDuplicate) {
    Network net(3);
    auto& j1 = net.add_authority("J1");
    KeyPair holder = net.derive_key("h");
    auto dsc = j1.issue_dsc("TIN-1", holder.pubkey);
    EXPECT_TRUE(verify_dsc(dsc, j1.public_key(), net.scheme()));
    auto flipped = dsc;
    flipped.issuer_signature[5] ^= 0x80;
    EXPECT_FALSE(verify_dsc(flipped, j1.public_key(), net.scheme()));
    auto other_tin = dsc;
    other_tin.tin = "TIN-2";
    EXPECT_FALSE(verify_dsc(other_tin, j1.public_key(), net.scheme()));
    EXPECT_EQ(error_of([&] { j1.issue_dsc("TIN-1", holder.pubkey); }), Errc::duplicate_tin);
    EXPECT_EQ(error_of([&] { net.add_authority("J1"); }), Errc::schema_violation);
}

TEST(Certificate, RealEcdsaScheme) {
    const EcdsaSecp256k1Scheme ecdsa;
    Network net(4, ecdsa);
    auto& j1 = net.add_authority("J1");
    KeyPair dsc_key = net.derive_key("dsc"), wallet = net.derive_key("wallet");
    auto dsc = j1.issue_dsc("T", dsc_key.pubkey);
    EXPECT_TRUE(verify_dsc(dsc, j1.public_key(), ecdsa));
    auto proof = make_ownership_proof("J1", "T", wallet, dsc_key, ecdsa);
    EXPECT_NO_THROW(j1.register_ownership(proof));
    EXPECT_TRUE(j1.holds_verified(proof.address));
    proof.wallet_signature = ecdsa.sign(net.derive_key("thief"), proof.challenge);
    TaxAuthority fresh("J1", net.derive_key("authority/J1"), ecdsa);
    fresh.issue_dsc("T", dsc_key.pubkey);
    EXPECT_EQ(error_of([&] { fresh.register_ownership(proof); }), Errc::bad_signature);
}

TEST(Registration, AcceptsWellFormedProof) {
    World w;
    auto& alice = w.holder("alice", "J1");
    EXPECT_NE(w.net.authority("J1").lookup(alice.address), nullptr);
    EXPECT_EQ(w.net.registered_in(alice.address), "J1");
    // Same address, same TIN: idempotent.
    EXPECT_NO_THROW(w.net.register_ownership(
        "J1", make_ownership_proof("J1", alice.tin, alice.wallet, alice.dsc_key, w.net.scheme())));
}

TEST(Registration, RejectsBadProofs) {
    World w;
    auto& bob = w.holder("bob", "J2", false);
    const auto& s = w.net.scheme();
    auto good = make_ownership_proof("J2", bob.tin, bob.wallet, bob.dsc_key, s);

    auto p = good;
    p.wallet_signature = s.sign(w.net.derive_key("mallory"), p.challenge);
    EXPECT_EQ(error_of([&] { w.net.register_ownership("J2", p); }), Errc::bad_signature);

    p = good;
    p.dsc_signature[0] ^= 1;
    EXPECT_EQ(error_of([&] { w.net.register_ownership("J2", p); }), Errc::bad_signature);

    p = good;
    p.wallet_pubkey = w.net.derive_key("mallory").pubkey;
    EXPECT_EQ(error_of([&] { w.net.register_ownership("J2", p); }), Errc::owner_mismatch);

    // A proof built for J1 does not register at J2.
    p = make_ownership_proof("J1", bob.tin, bob.wallet, bob.dsc_key, s);
    EXPECT_EQ(error_of([&] { w.net.register_ownership("J2", p); }), Errc::bad_signature);

    p = good;
    p.tin = "J2-nobody";
    EXPECT_EQ(error_of([&] { w.net.register_ownership("J2", p); }), Errc::unknown_tin);

    EXPECT_TRUE(w.net.authority("J2").registry().empty());
    EXPECT_NO_THROW(w.net.register_ownership("J2", good));
}

TEST(Registration, AddressConflictIsGlobal) {
    World w;
    auto& alice = w.holder("alice", "J1");
    const auto& s = w.net.scheme();
    // Another TIN at the same authority claims alice's wallet.
    KeyPair eve_dsc = w.net.derive_key("dsc/eve");
    w.net.issue_dsc("J1", "J1-eve", eve_dsc.pubkey);
    EXPECT_EQ(error_of([&] {
                  w.net.register_ownership("J1", make_ownership_proof("J1", "J1-eve", alice.wallet, eve_dsc, s));
              }),
              Errc::address_conflict);
    // And a TIN in another jurisdiction.
    w.net.issue_dsc("J3", "J3-eve", eve_dsc.pubkey);
    EXPECT_EQ(error_of([&] {
                  w.net.register_ownership("J3", make_ownership_proof("J3", "J3-eve", alice.wallet, eve_dsc, s));
              }),
              Errc::address_conflict);
    EXPECT_EQ(w.net.registered_in(alice.address), "J1");
}

TEST(Query, AllowDenyUnknownSelf) {
    World w;
    auto& bob = w.holder("bob", "J2");
    auto r = w.net.query_beneficiary_jurisdiction("J1", bob.address, 4);
    EXPECT_EQ(r.result, AttributionResult::affirmed);
    EXPECT_EQ(r.jurisdiction, "J2");

    w.net.eoi().set("J1", "J2", false);
    r = w.net.query_beneficiary_jurisdiction("J1", bob.address, 4);
    EXPECT_EQ(r.result, AttributionResult::unaffirmed);
    EXPECT_FALSE(r.jurisdiction);

    r = w.net.query_beneficiary_jurisdiction("J1", ledger::address_for_pubkey(w.net.derive_key("ghost").pubkey), 4);
    EXPECT_EQ(r.result, AttributionResult::unaffirmed);

    // Self-jurisdiction holds under an all-deny matrix.
    World d(1, false);
    auto& carol = d.holder("carol", "J3");
    r = d.net.query_beneficiary_jurisdiction("J3", carol.address, 0);
    EXPECT_EQ(r.jurisdiction, "J3");
    EXPECT_EQ(d.net.query_beneficiary_jurisdiction("J1", carol.address, 4).result, AttributionResult::unaffirmed);
}

TEST(Query, DeadlineAndDrops) {
    World w;
    auto& bob = w.holder("bob", "J2");
    // Round trip takes two ticks at default latency.
    EXPECT_EQ(w.net.query_beneficiary_jurisdiction("J1", bob.address, 1).result, AttributionResult::unaffirmed);
    EXPECT_EQ(w.net.query_beneficiary_jurisdiction("J1", bob.address, 2).result, AttributionResult::affirmed);
    w.net.set_link("J2", "J1", {5, 0.0});
    EXPECT_EQ(w.net.query_beneficiary_jurisdiction("J1", bob.address, 5).result, AttributionResult::unaffirmed);
    EXPECT_EQ(w.net.query_beneficiary_jurisdiction("J1", bob.address, 6).result, AttributionResult::affirmed);
    w.net.set_link("J1", "J2", {1, 1.0});
    EXPECT_EQ(w.net.query_beneficiary_jurisdiction("J1", bob.address, 50).result, AttributionResult::unaffirmed);
    EXPECT_NE(w.net.trace_text().find("query.drop"), std::string::npos);
    EXPECT_NE(w.net.trace_text().find(" late "), std::string::npos);
}

TEST(Query, ClockIsMonotone) {
    World w;
    auto& bob = w.holder("bob", "J2");
    Tick last = w.net.now();
    for (int i = 0; i < 5; ++i) {
        w.net.query_beneficiary_jurisdiction("J3", bob.address, 3);
        EXPECT_GE(w.net.now(), last + 3);
        last = w.net.now();
    }
    Tick prev = 0;
    for (const auto& e : w.net.trace()) {
        EXPECT_GE(e.tick, prev);
        prev = e.tick;
    }
}

TEST(MessageBus, OrdersByTickThenSeq) {
    MessageBus bus;
    bus.push(5, {MessageKind::query, "a", "b", 1, "x"});
    bus.push(3, {MessageKind::query, "a", "c", 2, "x"});
    bus.push(5, {MessageKind::query, "a", "d", 3, "x"});
    bus.push(3, {MessageKind::query, "a", "e", 4, "x"});
    std::vector<std::string> order;
    while (!bus.empty()) order.push_back(bus.pop().message.to);
    EXPECT_EQ(order, (std::vector<std::string>{"c", "e", "b", "d"}));
}

namespace {

/// Random world: 3-5 jurisdictions, random matrix, random links with
/// drops, a few registered holders and some never-registered addresses.
struct RandomWorld {
    std::vector<std::string> codes;
    std::map<std::pair<std::string, std::string>, bool> cells;
    std::map<std::pair<std::string, std::string>, LinkConfig> links;
    std::vector<std::pair<std::string, std::string>> registered;  // (name, code)
    std::uint64_t seed;

    static RandomWorld make(std::mt19937_64& rng) {
        RandomWorld w;
        w.seed = rng();
        const int n = 3 + static_cast<int>(rng() % 3);
        for (int i = 0; i < n; ++i) w.codes.push_back("J" + std::to_string(i + 1));
        for (const auto& a : w.codes)
            for (const auto& b : w.codes)
                if (a != b) {
                    w.cells[{a, b}] = rng() % 2;
                    w.links[{a, b}] = {1 + rng() % 4, (rng() % 4) * 0.25};
                }
        for (int i = 0; i < 6; ++i) w.registered.emplace_back("h" + std::to_string(i), w.codes[rng() % w.codes.size()]);
        return w;
    }

    Network build() const {
        Network net(seed);
        for (const auto& c : codes) net.add_authority(c);
        for (const auto& [cell, allow] : cells) net.eoi().set(cell.first, cell.second, allow);
        for (const auto& [cell, l] : links) net.set_link(cell.first, cell.second, l);
        for (const auto& [name, code] : registered) {
            KeyPair dsc = net.derive_key("dsc/" + name), wallet = net.derive_key("wallet/" + name);
            net.issue_dsc(code, name, dsc.pubkey);
            net.register_ownership(code, make_ownership_proof(code, name, wallet, dsc, net.scheme()));
        }
        return net;
    }

    std::string address_of(const Network& net, const std::string& name) const {
        return ledger::address_for_pubkey(net.derive_key("wallet/" + name).pubkey);
    }
};

}  // namespace

TEST(Properties, NoFalseAffirmationAndSoundness) {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 60; ++trial) {
        auto rw = RandomWorld::make(rng);
        Network net = rw.build();
        for (int q = 0; q < 10; ++q) {
            const std::string& origin = rw.codes[rng() % rw.codes.size()];
            std::string ghost = ledger::address_for_pubkey(net.derive_key("ghost/" + std::to_string(q)).pubkey);
            ASSERT_EQ(net.query_beneficiary_jurisdiction(origin, ghost, rng() % 10).result,
                      AttributionResult::unaffirmed);
            const auto& [name, home] = rw.registered[rng() % rw.registered.size()];
            auto r = net.query_beneficiary_jurisdiction(origin, rw.address_of(net, name), rng() % 10);
            if (r.jurisdiction) {
                ASSERT_EQ(*r.jurisdiction, home);
                ASSERT_TRUE(net.authority(*r.jurisdiction).holds_verified(rw.address_of(net, name)));
            }
            if (origin == home) ASSERT_EQ(r.jurisdiction, home);
        }
    }
}

TEST(Properties, EoiMonotonicity) {
    std::mt19937_64 rng(72);
    int flips_that_mattered = 0;
    for (int trial = 0; trial < 80; ++trial) {
        auto rw = RandomWorld::make(rng);
        std::vector<std::pair<std::string, std::string>> denied;
        for (const auto& [cell, allow] : rw.cells)
            if (!allow) denied.push_back(cell);
        if (denied.empty()) continue;
        auto loosened = rw;
        loosened.cells[denied[rng() % denied.size()]] = true;
        Network a = rw.build(), b = loosened.build();
        for (const auto& origin : rw.codes)
            for (const auto& [name, home] : rw.registered) {
                const Tick deadline = 6;
                auto before = a.query_beneficiary_jurisdiction(origin, rw.address_of(a, name), deadline);
                auto after = b.query_beneficiary_jurisdiction(origin, rw.address_of(b, name), deadline);
                if (before.result == AttributionResult::affirmed)
                    ASSERT_EQ(after.result, AttributionResult::affirmed);
                if (before.result != after.result) ++flips_that_mattered;
            }
    }
    EXPECT_GT(flips_that_mattered, 0);
}

TEST(Properties, DeterministicTrace) {
    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 20; ++trial) {
        auto rw = RandomWorld::make(rng);
        auto run = [&] {
            Network net = rw.build();
            for (const auto& origin : rw.codes)
                for (const auto& [name, home] : rw.registered)
                    net.query_beneficiary_jurisdiction(origin, rw.address_of(net, name), 3);
            return net.trace_text();
        };
        ASSERT_EQ(run(), run());
    }
}

TEST(Transfer, AffirmedUnaffirmedAndZero) {
    World w;
    auto& alice = w.holder("alice", "J1");
    auto& bob = w.holder("bob", "J2");
    const auto dir = directory_of(w);
    const auto policy = rates();
    auto t = w.net.originate_transfer(alice.address, bob.address, "BTC", Amount::parse("0.025", 8), 40000, policy,
                                      dir, 4, 1);
    EXPECT_EQ(t.query.jurisdiction, "J2");
    EXPECT_EQ(t.proceeds, Money::from_whole(1000));
    EXPECT_EQ(t.withholding, Money::from_whole(100));
    ASSERT_TRUE(t.travel_record);
    EXPECT_EQ(t.travel_record->originator_name, "alice");
    EXPECT_EQ(t.travel_record->originator_account, alice.address);
    EXPECT_EQ(t.travel_record->originator_physical_id.national_id, "ID-alice");
    EXPECT_EQ(t.travel_record->beneficiary_name, "bob");
    EXPECT_EQ(t.travel_record->beneficiary_account, bob.address);
    EXPECT_EQ(t.event.kind, tax::EventKind::spend);
    EXPECT_EQ(t.event.meta("attribution"), "affirmed");
    EXPECT_EQ(t.event.counterparty_address, bob.address);

    w.net.eoi().set("J1", "J2", false);
    t = w.net.originate_transfer(alice.address, bob.address, "BTC", Amount::parse("0.025", 8), 40000, policy, dir,
                                 4, 2);
    EXPECT_EQ(t.query.result, AttributionResult::unaffirmed);
    EXPECT_EQ(t.withholding, Money::from_whole(300));
    EXPECT_FALSE(t.travel_record);
    EXPECT_EQ(t.event.meta("attribution"), "unaffirmed");

    t = w.net.originate_transfer(alice.address, bob.address, "BTC", Amount::zero(8), 40000, policy, dir, 4, 3);
    EXPECT_EQ(t.withholding, Money{});
    EXPECT_EQ(t.event.seq, 3u);

    auto& ghost = w.holder("ghost", "J3", false);
    EXPECT_EQ(error_of([&] {
                  w.net.originate_transfer(ghost.address, bob.address, "BTC", Amount::zero(8), 1, policy, dir, 4, 4);
              }),
              Errc::unregistered_origin);
}

TEST(Transfer, ElevatedRateIsExact) {
    std::mt19937_64 rng(74);
    World w;
    auto& alice = w.holder("alice", "J1");
    const auto dir = directory_of(w);
    auto policy = rates();
    for (int i = 0; i < 200; ++i) {
        policy.elevated_withholding = Rational(BigInt(rng() % 1000), BigInt(1000));
        Amount amount(static_cast<Int>(rng() % 10'000'000'000ULL), 8);
        Rational price(BigInt(rng() % 100000), BigInt(1 + rng() % 100));
        std::string nobody = ledger::address_for_pubkey(w.net.derive_key("nobody/" + std::to_string(i)).pubkey);
        auto t = w.net.originate_transfer(alice.address, nobody, "BTC", amount, price, policy, dir, 2, i + 1);
        ASSERT_EQ(t.withholding, Money::floor_of(t.proceeds.to_rational() * policy.elevated_withholding));
    }
}

TEST(TravelRule, Validation) {
    const std::string a1 = "1BvBMSEYstWetqTFn5Au4m4GFg7xJaNVN2";
    const std::string a2 = "bc1qar0srrr7xfkvy5l643lydnw9re59gtzzwf5mdq";
    Identity orig{"Ann", a1, PhysicalId{"1 Main St", "", "", "", ""}};
    Identity bene{"Ben", a2, {}};
    auto r = build_travel_rule_record(orig, bene);
    EXPECT_EQ(r.beneficiary_name, "Ben");

    bene.name.clear();
    EXPECT_EQ(error_of([&] { build_travel_rule_record(orig, bene); }), Errc::incomplete_travel_record);
    bene.name = "Ben";

    orig.physical = PhysicalId{"", "", "", "1980-02-01", "Lyon"};
    EXPECT_NO_THROW(build_travel_rule_record(orig, bene));
    orig.physical.birth_place.clear();
    EXPECT_EQ(error_of([&] { build_travel_rule_record(orig, bene); }), Errc::incomplete_travel_record);
    orig.physical.customer_id = "C-9";
    EXPECT_NO_THROW(build_travel_rule_record(orig, bene));

    orig.account = "not-an-address";
    EXPECT_EQ(error_of([&] { build_travel_rule_record(orig, bene); }), Errc::incomplete_travel_record);
    orig.account = a1;
    bene.account = "5HueCGU8rMjxEXxiPuD5BDku4MkFqeZyd4dZ1jvhTVqvbTLvyTJ";  // a private key, not an account
    EXPECT_EQ(error_of([&] { build_travel_rule_record(orig, bene); }), Errc::incomplete_travel_record);
}

namespace {

const char* kScenario = R"({
  "seed": 11,
  "jurisdictions": ["J1", "J2", "J3"],
  "eoi": {"J1": {"J2": "allow", "J3": "deny"},
          "J2": {"J1": "allow", "J3": "allow"},
          "J3": {"J1": "deny", "J2": "allow"}},
  "policy": {"standard_withholding": "10%", "elevated_withholding": "30%"},
  "assets": {"BTC": 8},
  "holders": [
    {"id": "alice", "jurisdiction": "J1", "tin": "J1-1", "name": "Alice", "physical_id": {"national_id": "A1"}, "wallets": ["main"]},
    {"id": "bob", "jurisdiction": "J2", "tin": "J2-1", "name": "Bob", "wallets": ["main"]},
    {"id": "carol", "jurisdiction": "J3", "tin": "J3-1", "name": "Carol", "wallets": ["main", "cold"]}
  ],
  "registrations": [
    {"wallet": "alice/main"}, {"wallet": "bob/main"}, {"wallet": "carol/main"},
    {"wallet": "carol/cold", "tamper": "wallet_signature"}
  ],
  "transfers": [
    {"from": "alice/main", "to": "bob/main", "asset": "BTC", "amount": "10000000", "fmv_unit": "40000"},
    {"from": "alice/main", "to": "carol/main", "asset": "BTC", "amount": "10000000", "fmv_unit": "40000"},
    {"from": "alice/main", "to": "carol/cold", "asset": "BTC", "amount": "10000000", "fmv_unit": "40000"}
  ]
})";

}  // namespace

TEST(Scenario, ThreeJurisdictionSuite) {
    auto s = parse_scenario(Json::parse(kScenario), "s.json");
    auto r = run_scenario(s);
    ASSERT_EQ(r.registrations.size(), 4u);
    EXPECT_TRUE(r.registrations[2].accepted);
    EXPECT_FALSE(r.registrations[3].accepted);
    EXPECT_EQ(r.registrations[3].reason, "bad-signature");
    ASSERT_EQ(r.transfers.size(), 3u);
    EXPECT_EQ(r.transfers[0].query.jurisdiction, "J2");
    EXPECT_EQ(r.transfers[0].withholding, Money::from_whole(400));
    EXPECT_TRUE(r.transfers[0].travel_record);
    EXPECT_EQ(r.transfers[1].query.result, AttributionResult::unaffirmed);
    EXPECT_EQ(r.transfers[1].withholding, Money::from_whole(1200));
    EXPECT_EQ(r.transfers[2].query.result, AttributionResult::unaffirmed);
    EXPECT_EQ(withholding_ledger_csv(r), withholding_ledger_csv(run_scenario(s)));
    EXPECT_EQ(r.trace, run_scenario(s).trace);
    EXPECT_NE(r.trace, run_scenario([&] {
                           auto t = s;
                           t.seed = 12;
                           return t;
                       }())
                           .trace);
    EXPECT_NE(travel_records_jsonl(r).find("\"originator_name\":\"Alice\""), std::string::npos);
}

TEST(Scenario, SchemaErrorsNameThePath) {
    auto msg = [](const std::string& text) -> std::string {
        try {
            run_scenario(parse_scenario(parse_json_text(text, "bad.json"), "bad.json"));
        } catch (const Error& e) {
            return std::string(to_string(e.code())) + " " + e.what();
        }
        return "ok";
    };
    EXPECT_EQ(msg("{\n\"seed\": 1,\n oops}"), "parse-error bad.json:3: invalid JSON");
    EXPECT_EQ(msg(R"({"jurisdictions": ["J1"], "colour": 1})"), "schema-violation bad.json: colour: unknown key");
    EXPECT_EQ(msg(R"({"jurisdictions": ["J1", "J2"]})").rfind("schema-violation", 0), 0u);
    EXPECT_EQ(msg(R"({"jurisdictions": ["J1"], "holders": [{"id": "a", "jurisdiction": "J9", "tin": "t"}]})"),
              "schema-violation bad.json: holders[0].jurisdiction: unknown jurisdiction J9");
    EXPECT_EQ(msg(R"({"jurisdictions": ["J1"], "registrations": [{"wallet": "x/y", "tamper": "lol"}]})")
                  .rfind("schema-violation bad.json: registrations[0].tamper", 0),
              0u);
    EXPECT_EQ(msg(R"({"jurisdictions": ["J1"], "eoi": {"J1": {"J1": "deny"}}})").rfind("schema-violation", 0), 0u);
    EXPECT_EQ(msg(R"({"jurisdictions": ["J1"], "policy": {"standard_withholding": "0.5", "elevated_withholding": "0.1"}})")
                  .rfind("schema-violation", 0),
              0u);
    EXPECT_EQ(msg(R"({"jurisdictions": ["J1"], "transfers": [{"from": "a/b", "to": "c", "asset": "BTC", "amount": "1"}]})"),
              "schema-violation bad.json: transfers[0].asset: asset BTC not declared in assets");
}
