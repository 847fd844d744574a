#include "oldb/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace oldb {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

// number with optional trailing "pi": "3", "0.5pi", "pi"
Real parse_factor(const std::string& text) {
    std::string s = lower(trim(text));
    if (s.empty()) throw std::invalid_argument("config: empty numeric value");
    if (s == "inf" || s == "+inf") return std::numeric_limits<Real>::infinity();
    Real factor = 1.0;
    if (s.size() >= 2 && s.substr(s.size() - 2) == "pi") {
        factor = pi;
        s = trim(s.substr(0, s.size() - 2));
        if (s.empty()) return factor;
    }
    std::size_t used = 0;
    const Real v = std::stod(s, &used);
    if (used != s.size())
        throw std::invalid_argument("config: cannot parse number '" + text + "'");
    return v * factor;
}

}  // namespace

Real Config::parse_real(const std::string& text) {
    const std::string s = trim(text);
    const auto slash = s.find('/');
    if (slash == std::string::npos) return parse_factor(s);
    return parse_factor(s.substr(0, slash)) / parse_factor(s.substr(slash + 1));
}

Config Config::parse_string(const std::string& text) {
    Config cfg;
    std::istringstream is(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config: malformed section header at line " +
                                            std::to_string(line_no));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value at line " +
                                        std::to_string(line_no));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config: empty key at line " + std::to_string(line_no));
        cfg.set(section.empty() ? key : section + "." + key, value);
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_string(buf.str());
}

void Config::set(const std::string& key, const std::string& value) { kv_[key] = value; }

void Config::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("override must be section.key=value: " + assignment);
    const std::string key = trim(assignment.substr(0, eq));
    if (key.empty()) throw std::invalid_argument("override has empty key: " + assignment);
    set(key, trim(assignment.substr(eq + 1)));
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

Real Config::get_real(const std::string& key, Real fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : parse_real(it->second);
}

int Config::get_int(const std::string& key, int fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    const Real v = parse_real(it->second);
    const int i = static_cast<int>(std::llround(v));
    if (std::abs(v - i) > 1e-9)
        throw std::invalid_argument("config: integer expected for " + key);
    return i;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    const std::string v = lower(trim(it->second));
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("config: boolean expected for " + key);
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    return std::stoull(trim(it->second));
}

std::vector<Real> Config::get_real_list(const std::string& key,
                                        std::vector<Real> fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::vector<Real> out;
    std::string item;
    std::istringstream is(it->second);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_real(item));
    }
    if (out.empty()) throw std::invalid_argument("config: empty list for " + key);
    return out;
}

}  // namespace oldb
