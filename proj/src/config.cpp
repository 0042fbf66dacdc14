#include "tnl/config.hpp"

#include <fstream>
#include <sstream>

namespace tnl {

namespace {

enum class Kind { integer, dyadic, text, int_list };

struct KeySpec {
    const char* name;
    Kind kind;
    bool required = false;
};

struct SubSpec {
    const char* name;
    bool takes_positional = false;
    std::vector<KeySpec> keys;
};

const std::vector<SubSpec>& schema() {
    static const std::vector<SubSpec> s = {
        {"exact",
         false,
         {{"branch", Kind::text, true},
          {"i", Kind::integer},
          {"t", Kind::dyadic, true},
          {"level", Kind::integer, true},
          {"window", Kind::integer},
          {"out", Kind::text}}},
        {"simulate",
         false,
         {{"variant", Kind::integer, true},
          {"i", Kind::integer, true},
          {"j", Kind::integer, true},
          {"h", Kind::dyadic, true},
          {"t-end", Kind::dyadic},
          {"window", Kind::integer},
          {"cfl", Kind::dyadic},
          {"out", Kind::text}}},
        {"norms",
         false,
         {{"s", Kind::dyadic},
          {"i", Kind::int_list},
          {"pairs", Kind::integer},
          {"seed", Kind::integer},
          {"out", Kind::text}}},
        {"residual",
         false,
         {{"branch", Kind::text},
          {"dx", Kind::dyadic},
          {"beta", Kind::dyadic},
          {"out", Kind::text}}},
        {"scenario",
         true,
         {{"i", Kind::int_list},
          {"N", Kind::integer},
          {"h", Kind::dyadic},
          {"t", Kind::text},
          {"branch", Kind::text},
          {"level", Kind::integer},
          {"target-scale", Kind::dyadic},
          {"j-start", Kind::integer},
          {"j-max", Kind::integer},
          {"seed", Kind::integer},
          {"out", Kind::text}}},
        {"dump",
         false,
         {{"in", Kind::text, true}, {"pgm", Kind::text}, {"out", Kind::text}}},
    };
    return s;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    size_t e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems_)
    : std::runtime_error([&] {
          std::string msg = "configuration errors:";
          for (const auto& p : problems_) msg += "\n  - " + p;
          return msg;
      }()),
      problems(std::move(problems_)) {}

int Config::get_int(const std::string& key, int fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : std::stoi(it->second);
}

Dyadic Config::get_dyadic(const std::string& key, Dyadic fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : parse_dyadic(it->second);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
}

std::vector<int> Config::get_int_list(const std::string& key, std::vector<int> fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    std::vector<int> out;
    std::stringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(trim(tok)));
    return out;
}

std::string Config::serialize() const {
    std::ostringstream os;
    os << "subcommand = " << subcommand << "\n";
    if (!positional.empty()) os << "positional = " << positional << "\n";
    for (const auto& [k, v] : values) os << k << " = " << v << "\n";
    return os.str();
}

Config parse_config(const std::vector<std::string>& args) {
    std::vector<std::string> problems;
    Config cfg;
    if (args.empty()) {
        problems.push_back("missing subcommand (exact|simulate|norms|residual|scenario|dump)");
        throw ConfigError(problems);
    }
    cfg.subcommand = args[0];
    const SubSpec* sub = nullptr;
    for (const auto& s : schema())
        if (cfg.subcommand == s.name) sub = &s;
    if (!sub) {
        problems.push_back("unknown subcommand: " + cfg.subcommand);
        throw ConfigError(problems);
    }

    // collect raw key/value pairs; --config files load first
    std::map<std::string, std::string> file_values, flag_values;
    size_t k = 1;
    if (sub->takes_positional && k < args.size() && args[k].rfind("--", 0) != 0)
        cfg.positional = args[k++];
    for (; k < args.size(); ++k) {
        const std::string& a = args[k];
        if (a.rfind("--", 0) != 0) {
            problems.push_back("expected --key, got: " + a);
            continue;
        }
        std::string key = a.substr(2);
        if (k + 1 >= args.size()) {
            problems.push_back("missing value for --" + key);
            break;
        }
        std::string value = args[++k];
        if (key == "config") {
            std::ifstream is(value);
            if (!is) {
                problems.push_back("cannot read config file: " + value);
                continue;
            }
            std::string line;
            while (std::getline(is, line)) {
                line = trim(line);
                if (line.empty() || line[0] == '#') continue;
                auto eq = line.find('=');
                if (eq == std::string::npos) {
                    problems.push_back("malformed config line: " + line);
                    continue;
                }
                std::string fk = trim(line.substr(0, eq)), fv = trim(line.substr(eq + 1));
                if (fk == "subcommand" || fk == "positional") continue;
                file_values[fk] = fv;
            }
        } else {
            flag_values[key] = value;
        }
    }
    cfg.values = file_values;
    for (const auto& [key, value] : flag_values) cfg.values[key] = value;

    if (sub->takes_positional && cfg.positional.empty())
        problems.push_back(cfg.subcommand + " needs a kind (theorem2 | lifted)");

    // validate against the schema: unknown keys, required keys, value shapes
    for (const auto& [key, value] : cfg.values) {
        const KeySpec* spec = nullptr;
        for (const auto& ks : sub->keys)
            if (key == ks.name) spec = &ks;
        if (!spec) {
            problems.push_back("unknown key for " + cfg.subcommand + ": --" + key);
            continue;
        }
        try {
            switch (spec->kind) {
                case Kind::integer:
                    (void)std::stoi(value);
                    break;
                case Kind::dyadic:
                    (void)parse_dyadic(value);
                    break;
                case Kind::int_list: {
                    std::stringstream ss(value);
                    std::string tok;
                    while (std::getline(ss, tok, ',')) (void)std::stoi(trim(tok));
                    break;
                }
                case Kind::text:
                    break;
            }
        } catch (const std::exception& e) {
            problems.push_back("bad value for --" + key + ": " + value + " (" + e.what() + ")");
        }
    }
    for (const auto& ks : sub->keys)
        if (ks.required && !cfg.values.count(ks.name))
            problems.push_back("missing required key --" + std::string(ks.name) + " for " +
                               cfg.subcommand);

    if (!problems.empty()) throw ConfigError(problems);
    return cfg;
}

}  // namespace tnl
