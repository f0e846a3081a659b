#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "multivaw/config.hpp"
#include "multivaw/dataset.hpp"
#include "multivaw/evaluation.hpp"
#include "multivaw/ohf.hpp"

namespace multivaw {

/// The stream an experiment runs on. With node dropout, step t only reveals
/// the rows active_rows[t] of S and y.
struct ExperimentData {
  DatasetBundle bundle;
  std::vector<std::vector<Index>> active_rows;  // empty: every row, every step
  std::optional<Matrix> ground_truth;           // Theta_0 for generated streams

  bool time_varying() const noexcept { return !active_rows.empty(); }
  Matrix summing_at(std::size_t t) const;  // 0-based step
  Vector response_at(std::size_t t) const;
  Vector features_at(std::size_t t) const;
};

/// Loads or generates the dataset named by the config and attaches features.
ExperimentData prepare_data(const ExperimentConfig& config);

/// Per-step row subsets: the first node is always kept, every other node is
/// dropped independently with probability p.
std::vector<std::vector<Index>> dropout_masks(Index nodes, std::size_t steps, double p, std::uint64_t seed);

std::unique_ptr<OhfForecaster> make_forecaster(const ExperimentConfig& config, const SummingMatrix& summing,
                                               Index feature_dim, double lambda);

struct RunResult {
  double lambda = 0.0;
  RegretReport report;  // against theta_star, bound_values filled for multivaw/metavaw
  Matrix theta_star;    // best fixed competitor in hindsight, d x m
  Matrix predictions;   // steps x n, NaN where a node was not revealed
};

/// Runs the configured forecaster over the stream and evaluates it.
RunResult run_experiment(const ExperimentConfig& config, const ExperimentData& data, double lambda);

/// Evaluates recorded predictions (steps x n, NaN for unrevealed nodes): fits
/// the competitor once over the full stream, computes the regret report and
/// the bounds that apply to the configured algorithm.
RunResult evaluate_predictions(const ExperimentConfig& config, const ExperimentData& data, double lambda,
                               Matrix predictions);

/// Names of the bound columns, in output order.
inline constexpr const char* kLogDetBound = "log_det";
inline constexpr const char* kClosedFormBound = "closed_form";

/// Writes regret.csv, predictions.csv, forecast_total.csv and summary.json.
void write_run_outputs(const ExperimentConfig& config, const ExperimentData& data, const RunResult& run,
                       const std::string& directory);

/// Reads a predictions.csv written by write_run_outputs.
Matrix read_predictions_csv(const std::string& path, const ExperimentData& data);

struct SweepResult {
  std::vector<RunResult> runs;  // grid order
  std::size_t best = 0;         // index of the smallest regret
};

/// Independent runs, one per lambda, executed on up to `threads` workers
/// (0 = hardware concurrency). Results do not depend on the thread count.
SweepResult run_sweep(const ExperimentConfig& config, const ExperimentData& data, std::span<const double> grid,
                      unsigned threads = 0);

/// Writes sweep.csv (lambda,regret,cumulative_loss,competitor_loss,
/// bound_log_det,bound_closed_form), regret_lambda_<k>.csv per grid point,
/// summary.json, and the full run outputs of the best lambda under best/.
void write_sweep_outputs(const ExperimentConfig& config, const ExperimentData& data, const SweepResult& sweep,
                         const std::string& directory);

struct AuditReport {
  double woodbury_deviation = 0.0;
  std::optional<double> kronecker_deviation;  // needs a fixed S
  std::optional<double> metavaw_deviation;    // needs a fixed S
  double response_scale = 0.0;                // 1 + max_t |y_t|
  double tolerance = 0.0;
  bool passed = false;
};

/// Dual-route checks on the configured stream at config.lambda. Woodbury
/// deviation is relative to |theta|, the others are compared against
/// tolerance * response_scale.
AuditReport run_audits(const ExperimentConfig& config, const ExperimentData& data);
std::string audit_to_json(const AuditReport& report);

}  // namespace multivaw
