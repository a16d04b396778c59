#pragma once

// Line-delimited event files and report rendering.
//
// Event file: the first record declares asset decimals,
//   {"assets": {"BTC": 8, "ETH": 18}}
// and every following line is one event,
//   {"seq": 1, "timestamp": "2021-03-01", "kind": "purchase", "asset": "BTC",
//    "quantity": "50000000", "fmv_unit": "40000", "metadata": {...}}
// Quantities are integer base units; fmv_unit is an exact decimal or a/b
// string (integers are accepted as JSON numbers, floats are not).

#include <chrono>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fisc/core/config.hpp"
#include "fisc/tax/engine.hpp"

namespace fisc::tax {

struct EventFile {
    std::map<std::string, unsigned> asset_decimals;
    std::vector<ChainEventRecord> events;
};

namespace detail {

using Json = nlohmann::json;

inline Timestamp parse_timestamp(const Json& j) {
    if (j.is_number_integer()) return j.get<Timestamp>();
    if (!j.is_string()) fail(Errc::schema_violation, "timestamp must be unix seconds or an ISO date");
    const std::string s = j.get<std::string>();
    int y = 0;
    unsigned mo = 0, d = 0, h = 0, mi = 0, se = 0;
    char tail = 0;
    int n = std::sscanf(s.c_str(), "%d-%u-%uT%u:%u:%u%c", &y, &mo, &d, &h, &mi, &se, &tail);
    const bool date_only = n == 3 && s.size() == 10;
    const bool full = (n == 6 || (n == 7 && tail == 'Z' && s.back() == 'Z')) && h < 24 && mi < 60 && se < 60;
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{mo}, std::chrono::day{d}};
    if ((!date_only && !full) || !ymd.ok()) fail(Errc::schema_violation, "bad timestamp '" + s + "'");
    return timestamp_of(y, mo, d) + h * 3600 + mi * 60 + se;
}

inline Rational parse_price(const Json& j) {
    if (j.is_number_integer()) return Rational(BigInt(j.get<std::int64_t>()));
    if (j.is_string()) return KeyValueConfig::parse_rational(j.get<std::string>());
    fail(Errc::schema_violation, "fmv_unit must be a decimal string or an integer");
}

inline BigInt parse_units(const Json& j) {
    std::string text;
    if (j.is_number_unsigned() || j.is_number_integer())
        text = j.dump();
    else if (j.is_string())
        text = j.get<std::string>();
    else
        fail(Errc::schema_violation, "quantity must be integer base units");
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
        fail(Errc::schema_violation, "quantity must be non-negative integer base units, got '" + text + "'");
    return BigInt(text);
}

inline std::string meta_value(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer() || v.is_boolean()) return v.dump();
    fail(Errc::schema_violation, "metadata values must be strings, integers or booleans");
}

inline ChainEventRecord parse_event(const Json& j, const std::map<std::string, unsigned>& decimals) {
    if (!j.is_object()) fail(Errc::schema_violation, "event must be a JSON object");
    static const std::set<std::string> kKnown{"seq",        "timestamp",  "kind",     "asset",      "quantity",
                                              "fmv_unit",   "counterparty_address", "specid_lot", "metadata"};
    for (const auto& [k, v] : j.items())
        if (!kKnown.contains(k)) fail(Errc::schema_violation, "unknown field '" + k + "'");
    for (const char* req : {"seq", "timestamp", "kind", "asset", "quantity"})
        if (!j.contains(req)) fail(Errc::schema_violation, std::string("missing field '") + req + "'");

    ChainEventRecord e;
    if (!j["seq"].is_number_unsigned()) fail(Errc::schema_violation, "seq must be a non-negative integer");
    e.seq = j["seq"].get<std::uint64_t>();
    e.timestamp = parse_timestamp(j["timestamp"]);
    if (!j["kind"].is_string()) fail(Errc::schema_violation, "kind must be a string");
    e.kind = parse_event_kind(j["kind"].get<std::string>());
    if (!j["asset"].is_string()) fail(Errc::schema_violation, "asset must be a string");
    e.asset = j["asset"].get<std::string>();
    auto dec = decimals.find(e.asset);
    if (dec == decimals.end()) fail(Errc::schema_violation, "asset " + e.asset + " not declared in header");
    e.quantity = Amount(narrow(parse_units(j["quantity"])), dec->second);
    if (j.contains("fmv_unit")) e.fmv_unit = parse_price(j["fmv_unit"]);
    if (j.contains("counterparty_address") && !j["counterparty_address"].is_null())
        e.counterparty_address = j["counterparty_address"].get<std::string>();
    if (j.contains("specid_lot") && !j["specid_lot"].is_null()) e.specid_lot = j["specid_lot"].get<std::string>();
    if (j.contains("metadata")) {
        if (!j["metadata"].is_object()) fail(Errc::schema_violation, "metadata must be an object");
        for (const auto& [k, v] : j["metadata"].items()) e.metadata[k] = meta_value(v);
    }
    return e;
}

}  // namespace detail

/// One JSON object per line. The first non-blank line is the {"assets": {...}}
/// header; a file with no records at all is an empty ledger.
inline EventFile read_events(std::istream& in, const std::string& source = "<events>") {
    EventFile file;
    bool have_header = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::string where = source + ":" + std::to_string(line_no) + ": ";
        detail::Json j;
        try {
            j = detail::Json::parse(line);
        } catch (const detail::Json::parse_error& e) {
            fail(Errc::parse_error, where + "invalid JSON: " + e.what());
        }
        try {
            if (!have_header) {
                if (!j.is_object() || !j.contains("assets") || !j["assets"].is_object() || j.size() != 1)
                    fail(Errc::schema_violation, "first record must be {\"assets\": {...}}");
                for (const auto& [asset, d] : j["assets"].items()) {
                    if (!d.is_number_unsigned() || d.get<unsigned>() > 30)
                        fail(Errc::schema_violation, "decimals for " + asset + " must be an integer in [0, 30]");
                    file.asset_decimals[asset] = d.get<unsigned>();
                }
                have_header = true;
                continue;
            }
            file.events.push_back(detail::parse_event(j, file.asset_decimals));
        } catch (const Error& e) {
            fail(e.code(), where + e.what());
        } catch (const detail::Json::exception& e) {
            fail(Errc::schema_violation, where + e.what());
        }
    }
    return file;
}

inline EventFile load_events(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail(Errc::parse_error, path + ": cannot open event file");
    return read_events(f, path);
}

/// Canonical serialization, one record per line; read_events inverts it.
inline void write_events(std::ostream& out, const EventFile& file) {
    nlohmann::ordered_json header;
    header["assets"] = nlohmann::ordered_json::object();
    for (const auto& [a, d] : file.asset_decimals) header["assets"][a] = d;
    out << header.dump() << '\n';
    for (const auto& e : file.events) {
        nlohmann::ordered_json j;
        j["seq"] = e.seq;
        j["timestamp"] = e.timestamp;
        j["kind"] = std::string(to_string(e.kind));
        j["asset"] = e.asset;
        j["quantity"] = e.quantity.units().str();
        std::string price = e.fmv_unit.str();
        j["fmv_unit"] = price;
        if (e.counterparty_address) j["counterparty_address"] = *e.counterparty_address;
        if (e.specid_lot) j["specid_lot"] = *e.specid_lot;
        if (!e.metadata.empty()) {
            j["metadata"] = nlohmann::ordered_json::object();
            for (const auto& [k, v] : e.metadata) j["metadata"][k] = v;
        }
        out << j.dump() << '\n';
    }
}

inline void write_report_csv(std::ostream& out, const TaxReport& report) {
    out << "seq,date,kind,asset,qty,proceeds,basis,gain,term\n";
    for (const auto& l : report.lines) {
        out << l.seq << ',' << format_date(l.timestamp) << ',' << to_string(l.kind) << ',' << l.asset << ','
            << l.qty.to_string() << ',' << l.proceeds.to_string() << ',' << l.basis.to_string() << ','
            << l.gain.to_string() << ',' << to_string(l.term) << '\n';
    }
}

inline std::string report_totals_json(const TaxReport& report) {
    nlohmann::ordered_json j;
    j["method"] = std::string(to_string(report.method));
    j["policy"] = report.policy_name;
    j["lines"] = report.lines.size();
    j["years"] = nlohmann::ordered_json::object();
    for (const auto& [year, t] : report.years) {
        nlohmann::ordered_json y;
        y["ordinary_income"] = t.ordinary_income.to_string();
        y["short_term_gain"] = t.short_term_gain.to_string();
        y["long_term_gain"] = t.long_term_gain.to_string();
        y["deductible_expenses"] = t.deductible_expenses.to_string();
        y["withholding"] = t.withholding.to_string();
        j["years"][std::to_string(year)] = y;
    }
    return j.dump(2) + "\n";
}

}  // namespace fisc::tax
