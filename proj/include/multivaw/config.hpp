#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "multivaw/features.hpp"

namespace multivaw {

enum class Algorithm { multivaw, metavaw, ftrl, ogd };
enum class RegularizationKind { scaled_identity, kronecker };

std::string_view to_string(Algorithm algorithm) noexcept;
Algorithm parse_algorithm(std::string_view name);
std::string_view to_string(RegularizationKind kind) noexcept;
RegularizationKind parse_regularization(std::string_view name);

/// 17 log-spaced points over [1e-4, 1e4].
std::vector<double> default_lambda_grid();
std::vector<double> log_spaced_grid(double lo, double hi, std::size_t points);

/// Everything needed to reproduce one experiment or sweep.
///
/// With an empty `dataset` the stream is generated from `seed` and the
/// synth_* fields. Relative paths are resolved against the directory of the
/// config file.
struct ExperimentConfig {
  std::string dataset;
  std::string hierarchy;  // empty: the built-in 8-node two-level tree
  Algorithm algorithm = Algorithm::multivaw;
  // scaled_identity: Lambda = lambda I_{dm}; kronecker: lambda I_m (x) S^T S.
  RegularizationKind regularization = RegularizationKind::scaled_identity;
  double lambda = 1.0;
  std::vector<double> lambda_grid = default_lambda_grid();
  FeatureRecipe features;
  std::string output = "out";
  std::uint64_t seed = 0;

  std::size_t synth_steps = 200;
  Index synth_feature_dim = 8;
  double synth_noise = 0.1;

  std::optional<double> ogd_step;  // defaults to 1e-9 / lambda
  double ogd_bound = 1e6;

  // Probability that a non-root node is missing from a step, which makes S_t
  // time-varying. 0 keeps S fixed.
  double node_dropout = 0.0;

  double tolerance = 1e-7;  // audit threshold
  unsigned threads = 0;     // sweep workers, 0 = hardware concurrency
};

/// Throws ConfigError (or InvalidPeriod) for an unusable configuration.
void validate(const ExperimentConfig& config);

/// Parses a JSON document. `base_dir` anchors relative paths.
ExperimentConfig parse_config_json(std::string_view text, const std::string& base_dir = "");
/// Parses a TOML document with the same keys, `[features]`, `[synth]` and
/// `[ogd]` becoming tables.
ExperimentConfig parse_config_toml(std::string_view text, const std::string& base_dir = "");
/// Chooses the format from the extension (.toml, otherwise JSON).
ExperimentConfig load_config(const std::string& path);

std::string config_to_json(const ExperimentConfig& config);

}  // namespace multivaw
