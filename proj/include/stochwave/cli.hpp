#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stochwave/integrators.hpp"

namespace stochwave {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by parse_config for --help; what() holds the usage text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;  // simulate, strong-rate, weak-rate, table1, selftest
  std::string preset;
  std::size_t n_modes = 256;
  std::vector<SchemeKind> schemes;
  std::vector<std::size_t> steps;
  SchemeKind reference_scheme = SchemeKind::CrankNicolson;
  std::size_t reference_steps = 2048;
  std::size_t samples = 200;
  std::uint64_t seed = 42;
  std::string functional = "paper_phi";
  std::optional<double> horizon;
  std::filesystem::path output;
  bool output_given = false;
  bool sup_norm = false;
  bool variance_reduction = true;
  bool control_variate = true;
  bool emit_plot = false;
  bool timestamp = true;
  bool paper_scale = false;
  std::size_t threads = 0;
};

/// Parses command-line arguments (without the program name). A config file
/// named by --config holds `key = value` lines with `#` comments; keys are the
/// long flag names (dashes or underscores). Command-line flags override file
/// keys, and the STOCHWAVE_SEED environment variable is used only when neither
/// sets the seed. Throws ConfigError on unknown keys or flags, malformed
/// values and a missing command.
RunConfig parse_config(const std::vector<std::string>& args);
RunConfig parse_config(int argc, const char* const* argv);

/// Executes a parsed configuration. Returns the process exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace stochwave
