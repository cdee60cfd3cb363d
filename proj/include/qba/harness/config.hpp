#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qba/engine/protocol.hpp"
#include "qba/engine/transcript.hpp"

namespace qba::harness {

using engine::ConfigError;
using engine::Json;

/// |alpha| maximizing q, sqrt((sqrt(5) - 1) / 2).
inline constexpr double kOptimalAlpha = 0.78615137775742328;

struct RunConfig {
  std::string scenario = "honest";
  int n = 256;
  double alpha = kOptimalAlpha;
  int message_bit = -1;  // -1 draws a fresh bit per trial
  double message_fraction = 0.75;
  double classical_flip_prob = 0.0;
  double epsilon = 0.0;
  std::size_t k_min = 1;
  std::size_t min_runs = 16;
  double cheat_fraction = 1.0;
  std::string c_mixed_target = "A";
  int trials = 100;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 leaves the OpenMP default

  std::string report_path;
  std::string summary_path;
  std::string transcript_path;
  int transcript_trial = 0;

  /// Throws ConfigError on the first invalid field.
  void validate() const;
};

struct SweepGrid {
  std::vector<int> n_values;
  std::vector<double> alpha_values;
  std::vector<std::string> scenarios;
  std::string output_path;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Flat key=value lines ('#' starts a comment) or a JSON object, chosen by
/// the first non-blank character. List values become comma-joined strings.
KeyValues parse_config_text(const std::string& text);
KeyValues read_config_file(const std::string& path);

/// Applies settings in order. Sweep keys (n_values, alpha_values,
/// scenarios, output) need a grid. Unknown keys or malformed values throw
/// ConfigError.
void apply_settings(RunConfig& config, const KeyValues& values, SweepGrid* grid = nullptr);

Json to_json(const RunConfig& config);
RunConfig config_from_json(const Json& j);

engine::ProtocolConfig protocol_config(const RunConfig& config, std::uint64_t seed, int message_bit);

}  // namespace qba::harness
