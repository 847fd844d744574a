#ifndef OLDB_CONFIG_HPP
#define OLDB_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "oldb/field.hpp"

namespace oldb {

/// Flat key = value configuration with INI-style [section] tables; keys are
/// addressed as "section.key". Numeric values accept an optional trailing
/// "pi" factor and a single "/" (so L = 32pi and dealias = 2/3 parse), plus
/// "inf". Overrides use the same "section.key=value" syntax.
class Config {
  public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    void set(const std::string& key, const std::string& value);
    void apply_override(const std::string& assignment);  // "section.key=value"

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    Real get_real(const std::string& key, Real fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    std::vector<Real> get_real_list(const std::string& key, std::vector<Real> fallback) const;

    static Real parse_real(const std::string& text);

  private:
    std::map<std::string, std::string> kv_;
};

}  // namespace oldb

#endif
