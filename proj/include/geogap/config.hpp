#pragma once
// Minimal TOML-style configuration: `key = value` lines, `[section]`
// headers, `#` comments, optionally double-quoted string values.

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "geogap/error.hpp"

namespace geogap {

class Config {
public:
    using Section = std::map<std::string, std::string>;

    static Config parse(std::istream& in, const std::string& origin = "config") {
        Config cfg;
        std::string line, section;
        for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
            auto where = [&] { return origin + ":" + std::to_string(lineno); };
            auto s = strip_comment(line);
            s = trim(s);
            if (s.empty()) continue;
            if (s.front() == '[') {
                if (s.back() != ']' || s.size() < 3) throw usage_error(where() + ": malformed section header");
                section = trim(s.substr(1, s.size() - 2));
                cfg.sections_[section];
                continue;
            }
            auto eq = s.find('=');
            if (eq == std::string::npos) throw usage_error(where() + ": expected key = value");
            auto key = unquote(trim(s.substr(0, eq)));
            auto value = unquote(trim(s.substr(eq + 1)));
            if (key.empty()) throw usage_error(where() + ": empty key");
            if (!cfg.sections_[section].emplace(key, value).second)
                throw usage_error(where() + ": duplicate key '" + key + "'");
        }
        return cfg;
    }

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw usage_error("cannot open config file '" + path + "'");
        return parse(in, path);
    }

    std::optional<std::string> get(const std::string& key, const std::string& section = "") const {
        auto s = sections_.find(section);
        if (s == sections_.end()) return std::nullopt;
        auto it = s->second.find(key);
        if (it == s->second.end()) return std::nullopt;
        return it->second;
    }

    std::optional<double> get_double(const std::string& key, const std::string& section = "") const {
        auto v = get(key, section);
        if (!v) return std::nullopt;
        try {
            std::size_t used = 0;
            double d = std::stod(*v, &used);
            if (used == v->size()) return d;
        } catch (const std::exception&) {
        }
        throw usage_error("config key '" + key + "' is not a number: '" + *v + "'");
    }

    std::optional<long long> get_int(const std::string& key, const std::string& section = "") const {
        auto v = get(key, section);
        if (!v) return std::nullopt;
        try {
            std::size_t used = 0;
            long long n = std::stoll(*v, &used);
            if (used == v->size()) return n;
        } catch (const std::exception&) {
        }
        throw usage_error("config key '" + key + "' is not an integer: '" + *v + "'");
    }

    const Section& section(const std::string& name) const {
        static const Section empty;
        auto it = sections_.find(name);
        return it == sections_.end() ? empty : it->second;
    }

private:
    static std::string trim(const std::string& s) {
        auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    static std::string strip_comment(const std::string& s) {
        bool quoted = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"') quoted = !quoted;
            if (s[i] == '#' && !quoted) return s.substr(0, i);
        }
        return s;
    }

    static std::string unquote(const std::string& s) {
        if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
        return s;
    }

    std::map<std::string, Section> sections_;
};

} // namespace geogap
