#ifndef LOGNLS_CONFIG_HPP
#define LOGNLS_CONFIG_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lognls/category.hpp"

namespace lognls {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flat "key = value" text with dotted keys; '#' starts a comment. Lists are
// comma separated; potential.wells separates points with ';' and
// coordinates with ','.
struct RunConfig {
    ExperimentConfig experiment;
    std::string output_dir;
    std::string source;                                         // raw text, hashed into the manifest
    std::vector<std::pair<std::string, std::string>> entries;  // in file order
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Throws ConfigError naming the first missing list.
void require_lists(const RunConfig& cfg, bool eps, bool a, bool mu, bool wells);

nlohmann::json config_echo(const RunConfig& cfg);

}  // namespace lognls

#endif  // LOGNLS_CONFIG_HPP
