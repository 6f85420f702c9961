#ifndef LOGNLS_COMMANDS_HPP
#define LOGNLS_COMMANDS_HPP

#include <string>

#include "lognls/config.hpp"

namespace lognls {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNumeric = 1;
inline constexpr int kExitUsage = 2;

struct CommandOptions {
    std::string output_override;  // --output
    int jobs = 0;                 // 0: hardware threads
    bool quiet = false;
};

/// --output, then output_dir from the config, then $LOGNLS_OUTPUT, then
/// "lognls_out".
std::string resolve_output_dir(const RunConfig& cfg, const CommandOptions& opts);

int cmd_limit(const RunConfig& cfg, const CommandOptions& opts);
int cmd_solve(const RunConfig& cfg, const CommandOptions& opts);
int cmd_sweep_eps(const RunConfig& cfg, const CommandOptions& opts);
int cmd_sweep_a(const RunConfig& cfg, const CommandOptions& opts);
int cmd_verify(const RunConfig& cfg, const CommandOptions& opts);

/// Parses the command line and dispatches. ConfigError and usage errors
/// map to exit 2.
int run_cli(int argc, char** argv);

}  // namespace lognls

#endif  // LOGNLS_COMMANDS_HPP
