#pragma once

#include "config.hpp"
#include "output.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace bhd::cli {

/// poincare, entropy-map, spectrum, fotoc, fotoc-grid.
std::vector<std::string> command_names();

/// Command-specific checks on top of RunConfig::validate. Throws
/// InvalidArgument before any computation.
void validate_for(const std::string& command, const RunConfig& config);

/// Runs `command`, writes its tables and finally manifest.json into
/// config.output_dir, and returns the manifest. A task that fails (for
/// example a propagator that does not converge) is recorded as failed and
/// the remaining tasks still run. Progress lines go to `log` when given.
Manifest run_command(const std::string& command, const RunConfig& config, std::ostream* log = nullptr);

}  // namespace bhd::cli
