#pragma once

// Internal helper for the `family:key=value,key=value` grammars shared by
// the operator and functional parsers. A comma-separated token without '='
// continues the previous value, so vector-valued keys like k0=1,2 work.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace torus::grammar {

inline std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

struct KvList {
    std::vector<std::pair<std::string, std::string>> items;

    bool has(const std::string& key) const {
        for (const auto& [k, v] : items)
            if (k == key) return true;
        return false;
    }
    std::string get(const std::string& key) const {
        for (const auto& [k, v] : items)
            if (k == key) return v;
        throw std::invalid_argument("grammar: missing parameter '" + key + "'");
    }
    void check_known(std::initializer_list<const char*> keys, const std::string& what) const {
        for (const auto& [k, v] : items) {
            bool ok = false;
            for (const char* key : keys)
                if (k == key) ok = true;
            if (!ok) throw std::invalid_argument("grammar: unknown key '" + k + "' for '" + what + "'");
        }
    }
};

inline double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw std::invalid_argument("grammar: bad number '" + s + "'");
    return v;
}

inline int parse_int(const std::string& s) {
    const double v = parse_double(s);
    if (v != std::round(v)) throw std::invalid_argument("grammar: expected integer, got '" + s + "'");
    return static_cast<int>(v);
}

inline KvList parse_kv(const std::string& body) {
    KvList kv;
    std::size_t pos = 0;
    while (pos <= body.size()) {
        std::size_t comma = body.find(',', pos);
        if (comma == std::string::npos) comma = body.size();
        const std::string tok = body.substr(pos, comma - pos);
        if (!tok.empty()) {
            const std::size_t eq = tok.find('=');
            if (eq == std::string::npos) {
                if (kv.items.empty())
                    throw std::invalid_argument("grammar: expected key=value, got '" + tok + "'");
                kv.items.back().second += "," + tok;
            } else {
                kv.items.emplace_back(lower(tok.substr(0, eq)), tok.substr(eq + 1));
            }
        }
        pos = comma + 1;
        if (comma == body.size()) break;
    }
    return kv;
}

inline std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        out.push_back(parse_int(s.substr(pos, comma - pos)));
        pos = comma + 1;
        if (comma == s.size()) break;
    }
    return out;
}

inline std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        out.push_back(parse_double(s.substr(pos, comma - pos)));
        pos = comma + 1;
        if (comma == s.size()) break;
    }
    return out;
}

}  // namespace torus::grammar
