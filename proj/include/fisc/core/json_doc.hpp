#pragma once

// Strict reading of JSON scenario documents: every lookup is typed, unknown
// keys are rejected, and diagnostics name the file plus the JSON path (or
// the line, for syntax errors).

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fisc/core/amount.hpp"
#include "fisc/core/config.hpp"
#include "fisc/core/error.hpp"

namespace fisc {

using Json = nlohmann::json;

inline Json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        std::size_t line = 1;
        for (std::size_t i = 0; i < e.byte && i < text.size(); ++i)
            if (text[i] == '\n') ++line;
        fail(Errc::parse_error, source + ":" + std::to_string(line) + ": invalid JSON");
    }
}

inline Json load_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail(Errc::parse_error, path + ": cannot open");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_json_text(ss.str(), path);
}

class JsonObject {
public:
    JsonObject(const Json& j, std::string source, std::string path = "")
        : j_(&j), source_(std::move(source)), path_(std::move(path)) {
        if (!j.is_object()) error(path_.empty() ? "document" : path_, "expected an object");
    }

    bool has(const std::string& key) const {
        used_.insert(key);
        return j_->contains(key) && !(*j_)[key].is_null();
    }

    std::string str(const std::string& key) const {
        const Json& v = at(key);
        if (!v.is_string()) error(key, "expected a string");
        return v.get<std::string>();
    }
    std::string str(const std::string& key, std::string fallback) const { return has(key) ? str(key) : fallback; }

    std::uint64_t u64(const std::string& key) const {
        const Json& v = at(key);
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_string()) {
            const std::string s = v.get<std::string>();
            if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos && s.size() <= 19)
                return std::stoull(s);
        }
        error(key, "expected a non-negative integer");
    }
    std::uint64_t u64(const std::string& key, std::uint64_t fallback) const { return has(key) ? u64(key) : fallback; }

    bool boolean(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const Json& v = at(key);
        if (!v.is_boolean()) error(key, "expected true or false");
        return v.get<bool>();
    }

    double real(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        const Json& v = at(key);
        if (!v.is_number()) error(key, "expected a number");
        return v.get<double>();
    }

    /// Exact decimal string ("0.3", "3/10", "30%") or an integer.
    Rational rational(const std::string& key) const {
        const Json& v = at(key);
        try {
            if (v.is_number_integer()) return Rational(BigInt(v.get<std::int64_t>()));
            if (v.is_string()) return KeyValueConfig::parse_rational(v.get<std::string>());
        } catch (const Error& e) {
            error(key, e.what());
        }
        error(key, "expected a decimal string or an integer");
    }
    Rational rational(const std::string& key, Rational fallback) const {
        return has(key) ? rational(key) : fallback;
    }

    /// Integer base units given as a string or a JSON integer.
    Amount units(const std::string& key, unsigned decimals) const {
        const Json& v = at(key);
        std::string text;
        if (v.is_number_unsigned())
            text = v.dump();
        else if (v.is_string())
            text = v.get<std::string>();
        if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
            error(key, "expected non-negative integer base units");
        try {
            return Amount(narrow(BigInt(text)), decimals);
        } catch (const Error& e) {
            error(key, e.what());
        }
    }

    JsonObject object(const std::string& key) const { return JsonObject(at(key), source_, join(key)); }

    std::vector<JsonObject> objects(const std::string& key) const {
        std::vector<JsonObject> out;
        if (!has(key)) return out;
        const Json& v = at(key);
        if (!v.is_array()) error(key, "expected an array");
        for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(v[i], source_, join(key) + "[" + std::to_string(i) + "]");
        return out;
    }

    std::vector<std::string> strings(const std::string& key) const {
        std::vector<std::string> out;
        if (!has(key)) return out;
        const Json& v = at(key);
        if (!v.is_array()) error(key, "expected an array of strings");
        for (const auto& s : v) {
            if (!s.is_string()) error(key, "expected an array of strings");
            out.push_back(s.get<std::string>());
        }
        return out;
    }

    /// Keys of a nested object, in document order of the parser (sorted).
    std::vector<std::string> keys() const {
        std::vector<std::string> out;
        for (const auto& [k, _] : j_->items()) out.push_back(k);
        return out;
    }

    const Json& raw(const std::string& key) const { return at(key); }

    /// Rejects keys nobody asked about.
    void done() const {
        for (const auto& [k, _] : j_->items())
            if (!used_.contains(k)) error(k, "unknown key");
    }

    [[noreturn]] void error(const std::string& key, const std::string& msg) const {
        fail(Errc::schema_violation, source_ + ": " + join(key) + ": " + msg);
    }

    const std::string& source() const { return source_; }

private:
    const Json& at(const std::string& key) const {
        used_.insert(key);
        if (!j_->contains(key) || (*j_)[key].is_null()) error(key, "missing");
        return (*j_)[key];
    }

    std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const Json* j_;
    std::string source_;
    std::string path_;
    mutable std::set<std::string> used_;
};

}  // namespace fisc
