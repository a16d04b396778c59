#pragma once

// "key = value" configuration files. Blank lines and '#' comments are
// skipped; every diagnostic names the file and line.

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "fisc/core/amount.hpp"

namespace fisc {

inline std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

class KeyValueConfig {
public:
    struct Entry {
        std::string value;
        int line = 0;
    };

    static KeyValueConfig parse(std::string_view text, std::string source = "<config>") {
        KeyValueConfig cfg;
        cfg.source_ = std::move(source);
        std::istringstream in{std::string(text)};
        std::string raw;
        int line_no = 0;
        while (std::getline(in, raw)) {
            ++line_no;
            auto hash = raw.find('#');
            std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (line.empty()) continue;
            auto eq = line.find('=');
            if (eq == std::string::npos)
                fail(Errc::parse_error, cfg.source_ + ":" + std::to_string(line_no) + ": expected 'key = value'");
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                fail(Errc::parse_error, cfg.source_ + ":" + std::to_string(line_no) + ": empty key");
            if (!cfg.entries_.emplace(key, Entry{value, line_no}).second)
                fail(Errc::parse_error, cfg.source_ + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
        return cfg;
    }

    static KeyValueConfig load(const std::string& path) {
        std::ifstream f(path);
        if (!f) fail(Errc::parse_error, path + ": cannot open config file");
        std::stringstream ss;
        ss << f.rdbuf();
        return parse(ss.str(), path);
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    const std::string& source() const { return source_; }

    std::optional<std::string> get(const std::string& key) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        used_.insert(key);
        return it->second.value;
    }

    /// Location prefix for diagnostics about `key`.
    std::string where(const std::string& key) const {
        auto it = entries_.find(key);
        return source_ + ":" + (it == entries_.end() ? std::string("?") : std::to_string(it->second.line));
    }

    template <typename Fn>
    void with(const std::string& key, Fn&& fn) const {
        auto v = get(key);
        if (!v) return;
        try {
            fn(*v);
        } catch (const Error& e) {
            fail(Errc::parse_error, where(key) + ": " + key + ": " + e.what());
        } catch (const std::exception& e) {
            fail(Errc::parse_error, where(key) + ": " + key + ": " + e.what());
        }
    }

    void read(const std::string& key, Rational& out) const {
        with(key, [&](const std::string& v) { out = parse_rational(v); });
    }
    void read(const std::string& key, std::uint32_t& out) const {
        with(key, [&](const std::string& v) { out = static_cast<std::uint32_t>(std::stoul(v)); });
    }
    void read(const std::string& key, std::uint64_t& out) const {
        with(key, [&](const std::string& v) { out = std::stoull(v); });
    }
    void read(const std::string& key, bool& out) const {
        with(key, [&](const std::string& v) {
            if (v == "true" || v == "yes" || v == "1")
                out = true;
            else if (v == "false" || v == "no" || v == "0")
                out = false;
            else
                fail(Errc::parse_error, "expected boolean, got '" + v + "'");
        });
    }
    void read(const std::string& key, std::string& out) const {
        with(key, [&](const std::string& v) { out = v; });
    }
    /// Amount given as a decimal in whole units at the target's decimals.
    void read(const std::string& key, Amount& out) const {
        with(key, [&](const std::string& v) { out = Amount::parse(v, out.decimals()); });
    }

    /// Keys present in the file that no reader asked for.
    std::set<std::string> unused_keys() const {
        std::set<std::string> out;
        for (const auto& [k, e] : entries_)
            if (!used_.count(k)) out.insert(k);
        return out;
    }

    void reject_unknown() const {
        auto unused = unused_keys();
        if (!unused.empty()) {
            const auto& key = *unused.begin();
            fail(Errc::schema_violation, where(key) + ": unknown key '" + key + "'");
        }
    }

    /// Accepts "0.003", "3/1000" or "0.3%".
    static Rational parse_rational(std::string_view text) {
        std::string t = trim(text);
        if (!t.empty() && t.back() == '%') return parse_decimal(std::string_view(t).substr(0, t.size() - 1)) / 100;
        auto slash = t.find('/');
        if (slash != std::string::npos) {
            Rational den = parse_decimal(std::string_view(t).substr(slash + 1));
            if (den == 0) fail(Errc::parse_error, "zero denominator");
            return parse_decimal(std::string_view(t).substr(0, slash)) / den;
        }
        return parse_decimal(t);
    }

private:
    std::string source_;
    std::map<std::string, Entry> entries_;
    mutable std::set<std::string> used_;
};

}  // namespace fisc
