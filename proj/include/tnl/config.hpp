#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tnl/core.hpp"

namespace tnl {

/// Typed command-line configuration. Numeric lengths and times are dyadic
/// rationals parsed exactly; decimal literals that are not dyadic are
/// rejected rather than rounded.
struct Config {
    std::string subcommand;
    std::string positional;  // scenario kind (theorem2 | lifted), if any
    std::map<std::string, std::string> values;

    bool has(const std::string& key) const { return values.count(key) != 0; }
    int get_int(const std::string& key, int fallback) const;
    Dyadic get_dyadic(const std::string& key, Dyadic fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::vector<int> get_int_list(const std::string& key, std::vector<int> fallback) const;

    std::string serialize() const;  // key = value lines, reparseable
};

/// All parse/validation problems at once.
struct ConfigError : std::runtime_error {
    explicit ConfigError(std::vector<std::string> problems_);
    std::vector<std::string> problems;
};

/// Parses `<subcommand> [positional] --key value ...`; `--config <file>`
/// loads `key = value` lines first, with command-line flags overriding.
/// Unknown subcommands and keys, missing required keys, and malformed dyadic
/// literals are all reported together in one ConfigError.
Config parse_config(const std::vector<std::string>& args);

}  // namespace tnl
