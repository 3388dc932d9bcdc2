#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "pelflow/estimator.hpp"
#include "pelflow/synth.hpp"

namespace pelflow {

/// Ordered key=value settings, the on-disk form of a run configuration.
using Settings = std::map<std::string, std::string>;

/// Parses sidecar text: one `key=value` per line, blank lines and lines
/// starting with '#' ignored, whitespace around key and value trimmed.
/// Throws ParseError on a line without '=' or with an empty key.
Settings parse_sidecar(const std::string& text);
std::string format_sidecar(const Settings& settings);

/// Everything needed to repeat a run.
struct RunConfig {
  std::string command;
  EstimatorConfig estimator;
  RectSceneParams scene;
  double snr_db = std::numeric_limits<double>::infinity();
  std::filesystem::path out = ".";
  std::vector<std::filesystem::path> frames;  ///< user frames; empty means synthetic
  std::vector<std::filesystem::path> flows;   ///< metrics input
  std::vector<std::filesystem::path> truth;
  std::vector<std::filesystem::path> prior;   ///< external initialization
  std::string name = "estimate";              ///< column label for metrics
};

/// Applies known keys on top of `base`. Throws ParameterError for unknown
/// keys or malformed values.
RunConfig apply_settings(RunConfig base, const Settings& settings);
/// Full effective configuration, including defaults.
Settings to_settings(const RunConfig& cfg);

/// Gain applied to |DFD| in error-map images before clamping to 255.
inline constexpr double kErrorMapGain = 4.0;

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

/// Entry point behind the `pelflow` executable; args exclude argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pelflow
