#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "multivaw/features.hpp"
#include "multivaw/hierarchy.hpp"

namespace multivaw {

/// A hierarchical time series ready for an experiment.
///
/// Dataset CSV layout: a header row, then one row per step. Recognized
/// columns are `t` (ignored on input), node ids from the hierarchy, and
/// exogenous feature columns whose names start with `x_`. Other columns are
/// ignored. Every bottom node must be present; absent aggregated nodes are
/// recomputed as S b_t, present ones are kept verbatim.
struct DatasetBundle {
  std::size_t steps = 0;
  SummingMatrix summing;  // node_ids give the response column order
  Matrix responses;       // steps x n
  std::vector<std::string> exogenous_ids;
  Matrix exogenous;       // steps x k
  Matrix features;        // steps x m, filled by attach_features
  std::vector<double> coherence_residuals;  // |y_t - P_S y_t| per step
  double max_coherence_residual = 0.0;

  const std::vector<std::string>& node_ids() const noexcept { return summing.node_ids; }
};

DatasetBundle ingest_csv(const std::string& path, const HierarchySpec& spec);
DatasetBundle parse_dataset_csv(std::istream& in, const HierarchySpec& spec, const std::string& source = "<stream>");

/// Writes the header `t,<node ids>,<exogenous ids>` and shortest round-trip
/// decimal values, so ingesting the output reproduces the bundle bit-exactly.
void write_dataset_csv(const DatasetBundle& bundle, std::ostream& out);

/// features = [make_features(steps, recipe) | exogenous].
void attach_features(DatasetBundle& bundle, const FeatureRecipe& recipe);

struct SynthOptions {
  std::uint64_t seed = 0;
  std::size_t steps = 200;
  Index feature_dim = 8;  // m, including the recipe columns
  double noise = 0.0;     // sigma
  FeatureRecipe recipe;
};

struct SynthResult {
  DatasetBundle bundle;  // features attached
  Matrix theta;          // ground truth, d x m
};

/// Draws Theta_0 (d x m, standard normal), fills the columns beyond the
/// recipe with standard-normal noise features, and sets
/// y_t = S Theta_0 x_t + sigma eps_t. The same options always give the same
/// bundle.
SynthResult synth_generate(const SynthOptions& options, const HierarchySpec& spec);

}  // namespace multivaw
