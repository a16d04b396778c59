#pragma once

// Discrete-event simulation of authorities answering jurisdiction queries
// over lossy, delayed links. One logical clock; the bus delivers in
// (deliver_at, seq) order so a seed fixes the whole trace.

#include <cstdio>
#include <memory>
#include <queue>
#include <sstream>

#include "fisc/attrib/protocol.hpp"
#include "fisc/core/amount.hpp"
#include "fisc/tax/event.hpp"
#include "fisc/tax/policy.hpp"

namespace fisc::attrib {

enum class MessageKind { query, response };

struct Message {
    MessageKind kind = MessageKind::query;
    std::string from;
    std::string to;
    std::uint64_t query_id = 0;
    std::string address;
};

struct Envelope {
    Tick deliver_at = 0;
    std::uint64_t seq = 0;
    Message message;
};

/// Priority queue keyed by (deliver_at, seq).
class MessageBus {
public:
    void push(Tick deliver_at, Message m) { queue_.push({deliver_at, next_seq_++, std::move(m)}); }
    bool empty() const { return queue_.empty(); }
    const Envelope& top() const { return queue_.top(); }
    Envelope pop() {
        Envelope e = queue_.top();
        queue_.pop();
        return e;
    }

private:
    struct Later {
        bool operator()(const Envelope& a, const Envelope& b) const {
            return a.deliver_at != b.deliver_at ? a.deliver_at > b.deliver_at : a.seq > b.seq;
        }
    };
    std::priority_queue<Envelope, std::vector<Envelope>, Later> queue_;
    std::uint64_t next_seq_ = 0;
};

struct LinkConfig {
    Tick latency = 1;
    double drop = 0.0;
};

struct TraceEntry {
    Tick tick = 0;
    std::string actor;
    std::string kind;
    std::string digest;
    std::string note;
};

struct QueryResult {
    tax::AttributionResult result = tax::AttributionResult::unaffirmed;
    std::optional<std::string> jurisdiction;
    std::vector<std::string> affirmed_by;  // every authority that answered in time
    Tick resolved_at = 0;
};

struct TransferOutcome {
    QueryResult query;
    Money proceeds;
    Money withholding;
    tax::ChainEventRecord event;
    std::optional<TravelRuleRecord> travel_record;
};

/// Who sits behind an address, as far as the originator's service knows.
struct HolderDirectory {
    std::map<std::string, Identity> by_address;

    const Identity* find(const std::string& address) const {
        auto it = by_address.find(address);
        return it == by_address.end() ? nullptr : &it->second;
    }
};

class Network {
public:
    explicit Network(std::uint64_t seed, const SignatureScheme& scheme = default_signature_scheme())
        : seed_(seed), scheme_(&scheme) {}

    const SignatureScheme& scheme() const { return *scheme_; }
    std::uint64_t seed() const { return seed_; }
    Tick now() const { return now_; }

    /// Keys derived from the seed and a label, so scenarios are replayable.
    KeyPair derive_key(const std::string& label) const {
        std::string material = "fisc/sim/" + std::to_string(seed_) + "/" + label;
        return scheme_->derive_keypair(as_bytes(material));
    }

    TaxAuthority& add_authority(const std::string& code) {
        if (code.empty()) fail(Errc::schema_violation, "empty jurisdiction code");
        if (authorities_.contains(code)) fail(Errc::schema_violation, "duplicate jurisdiction " + code);
        auto [it, _] = authorities_.emplace(code, TaxAuthority(code, derive_key("authority/" + code), *scheme_));
        return it->second;
    }

    TaxAuthority& authority(const std::string& code) {
        auto it = authorities_.find(code);
        if (it == authorities_.end()) fail(Errc::unknown_jurisdiction, "unknown jurisdiction " + code);
        return it->second;
    }

    std::set<std::string> codes() const {
        std::set<std::string> out;
        for (const auto& [c, _] : authorities_) out.insert(c);
        return out;
    }

    EoiMatrix& eoi() { return eoi_; }
    const EoiMatrix& eoi() const { return eoi_; }

    void set_default_link(LinkConfig c) { default_link_ = c; }
    void set_link(const std::string& from, const std::string& to, LinkConfig c) { links_[{from, to}] = c; }
    LinkConfig link(const std::string& from, const std::string& to) const {
        auto it = links_.find({from, to});
        return it == links_.end() ? default_link_ : it->second;
    }

    DigitalSignatureCertificate issue_dsc(const std::string& code, const std::string& tin, ByteView holder_pubkey) {
        auto dsc = authority(code).issue_dsc(tin, holder_pubkey);
        record(code, "dsc.issue", digest_of({tin, to_hex(holder_pubkey)}), tin);
        return dsc;
    }

    /// Registers with the authority and enforces the global one-TIN-per-
    /// address rule. Rejections are traced and rethrown.
    void register_ownership(const std::string& code, const OwnershipProof& proof) {
        const std::string digest = digest_of({proof.tin, proof.address, to_hex(proof.wallet_signature)});
        try {
            auto owner = owners_.find(proof.address);
            if (owner != owners_.end() && owner->second != std::make_pair(code, proof.tin))
                fail(Errc::address_conflict, proof.address + " is already registered to " + owner->second.second +
                                                 " in " + owner->second.first);
            authority(code).register_ownership(proof);
            owners_[proof.address] = {code, proof.tin};
        } catch (const Error& e) {
            record(code, "register.reject", digest, std::string(to_string(e.code())));
            throw;
        }
        record(code, "register.accept", digest, proof.address);
    }

    /// Jurisdiction of the registered owner, if any (simulation-wide view).
    std::optional<std::string> registered_in(const std::string& address) const {
        auto it = owners_.find(address);
        if (it == owners_.end()) return std::nullopt;
        return it->second.first;
    }

    /// Broadcasts the query and waits `deadline_ticks` for affirmative
    /// answers. Authorities that cannot or may not answer stay silent.
    QueryResult query_beneficiary_jurisdiction(const std::string& origin, const std::string& address,
                                               Tick deadline_ticks) {
        authority(origin);
        eoi_.validate(codes());
        const std::uint64_t id = ++query_count_;
        const Tick start = now_;
        const Tick deadline = start + deadline_ticks;
        const std::string digest = digest_of({std::to_string(id), address});

        struct Answer {
            Tick at;
            std::string code;
        };
        std::vector<Answer> answers;

        // The origin answers from its own registry without using the bus.
        record(origin, "query.open", digest, address);
        if (authorities_.at(origin).holds_verified(address)) {
            answers.push_back({start, origin});
            record(origin, "query.local_hit", digest, origin);
        }
        for (const auto& [code, _] : authorities_)
            if (code != origin) send({MessageKind::query, origin, code, id, address}, digest);

        while (!bus_.empty()) {
            Envelope env = bus_.pop();
            if (env.deliver_at > deadline) {
                now_ = std::max(now_, env.deliver_at);
                record(env.message.to, "late", digest, env.message.from);
                continue;
            }
            now_ = env.deliver_at;
            const Message& m = env.message;
            if (m.kind == MessageKind::query) {
                const TaxAuthority& responder = authorities_.at(m.to);
                if (!responder.holds_verified(m.address)) {
                    record(m.to, "query.no_record", digest, m.from);
                } else if (!eoi_.allows(m.from, m.to)) {
                    record(m.to, "query.eoi_deny", digest, m.from);
                } else {
                    record(m.to, "query.affirm", digest, m.from);
                    send({MessageKind::response, m.to, m.from, m.query_id, m.address}, digest);
                }
            } else {
                record(m.to, "response.recv", digest, m.from);
                answers.push_back({env.deliver_at, m.from});
            }
        }
        now_ = std::max(now_, deadline);

        QueryResult r;
        r.resolved_at = now_;
        std::sort(answers.begin(), answers.end(),
                  [](const Answer& a, const Answer& b) { return a.at != b.at ? a.at < b.at : a.code < b.code; });
        for (const auto& a : answers) r.affirmed_by.push_back(a.code);
        if (!answers.empty()) {
            r.result = tax::AttributionResult::affirmed;
            r.jurisdiction = answers.front().code;
            if (answers.size() > 1) {
                std::string all;
                for (const auto& a : answers) all += (all.empty() ? "" : ",") + a.code;
                record(origin, "anomaly.multiple_owners", digest, all);
            }
        }
        record(origin, "query.result", digest, r.jurisdiction ? "affirmed:" + *r.jurisdiction : "unaffirmed");
        return r;
    }

    /// Query, withholding and travel record for one outgoing transfer. The
    /// origin address must be registered somewhere.
    TransferOutcome originate_transfer(const std::string& origin_address, const std::string& beneficiary_address,
                                       const std::string& asset, const Amount& amount, const Rational& fmv_unit,
                                       const tax::JurisdictionPolicy& policy, const HolderDirectory& directory,
                                       Tick deadline_ticks, std::uint64_t seq) {
        auto origin = registered_in(origin_address);
        if (!origin) fail(Errc::unregistered_origin, "origin " + origin_address + " is not attributable");
        TransferOutcome out;
        out.query = query_beneficiary_jurisdiction(*origin, beneficiary_address, deadline_ticks);
        out.proceeds = value_of(amount, fmv_unit);
        out.withholding = tax::withholding_amount(out.proceeds, out.query.result, policy);

        auto& ev = out.event;
        ev.seq = seq;
        ev.timestamp = static_cast<tax::Timestamp>(now_);
        ev.kind = tax::EventKind::spend;
        ev.asset = asset;
        ev.quantity = amount;
        ev.fmv_unit = fmv_unit;
        ev.counterparty_address = beneficiary_address;
        ev.metadata["attribution"] =
            out.query.result == tax::AttributionResult::affirmed ? "affirmed" : "unaffirmed";
        if (out.query.jurisdiction) ev.metadata["jurisdiction"] = *out.query.jurisdiction;

        if (out.query.jurisdiction) {
            const Identity* from = directory.find(origin_address);
            const Identity* to = directory.find(beneficiary_address);
            if (!from || !to)
                fail(Errc::incomplete_travel_record, "no identity on file for a resolved transfer endpoint");
            out.travel_record = build_travel_rule_record(*from, *to);
        }
        record(*origin, "transfer", digest_of({origin_address, beneficiary_address, amount.to_string()}),
               "withholding=" + out.withholding.to_string());
        return out;
    }

    const std::vector<TraceEntry>& trace() const { return trace_; }

    std::string trace_text() const {
        std::ostringstream os;
        for (const auto& e : trace_) {
            char tick[24];
            std::snprintf(tick, sizeof tick, "%06llu", static_cast<unsigned long long>(e.tick));
            os << tick << ' ' << e.actor << ' ' << e.kind << ' ' << e.digest;
            if (!e.note.empty()) os << ' ' << e.note;
            os << '\n';
        }
        return os.str();
    }

    /// Advances the clock with nothing in flight.
    void advance(Tick ticks) { now_ += ticks; }

private:
    void send(Message m, const std::string& digest) {
        const LinkConfig l = link(m.from, m.to);
        const char* kind = m.kind == MessageKind::query ? "query" : "response";
        if (dropped(m, l.drop)) {
            record(m.from, std::string(kind) + ".drop", digest, m.to);
            return;
        }
        record(m.from, std::string(kind) + ".send", digest, m.to);
        bus_.push(now_ + l.latency, std::move(m));
    }

    // A message's fate depends only on the seed and the message itself, so
    // one link's behaviour never shifts another's.
    bool dropped(const Message& m, double p) const {
        if (p <= 0) return false;
        if (p >= 1) return true;
        Hash256 h = sha256(as_bytes(std::to_string(seed_) + "/" + std::to_string(m.query_id) + "/" + m.from + "/" +
                                    m.to + "/" + std::to_string(static_cast<int>(m.kind))));
        std::uint64_t x = 0;
        for (int i = 0; i < 8; ++i) x = x << 8 | h[static_cast<std::size_t>(i)];
        return static_cast<double>(x >> 11) * 0x1.0p-53 < p;
    }

    static std::string digest_of(std::initializer_list<std::string> parts) {
        std::string joined;
        for (const auto& p : parts) joined += p + '\x1f';
        Hash256 h = sha256(as_bytes(joined));
        return to_hex(ByteView(h.data(), 8));
    }

    void record(const std::string& actor, std::string kind, std::string digest, std::string note) {
        trace_.push_back({now_, actor, std::move(kind), std::move(digest), std::move(note)});
    }

    std::uint64_t seed_;
    const SignatureScheme* scheme_;
    std::map<std::string, TaxAuthority> authorities_;
    std::map<std::string, std::pair<std::string, std::string>> owners_;  // address -> (jurisdiction, tin)
    EoiMatrix eoi_;
    LinkConfig default_link_;
    std::map<std::pair<std::string, std::string>, LinkConfig> links_;
    MessageBus bus_;
    Tick now_ = 0;
    std::uint64_t query_count_ = 0;
    std::vector<TraceEntry> trace_;
};

}  // namespace fisc::attrib
