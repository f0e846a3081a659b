#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "multivaw/linalg.hpp"

namespace multivaw {

/// One recorded protocol round. Evaluation works from these records only, so
/// it is the same for every learner.
struct StepRecord {
  Matrix features;  // X_t, n_t x d
  Vector response;  // y_t
  Vector prediction;
};

struct RegretReport {
  std::vector<double> per_step_losses;
  std::vector<double> competitor_losses;
  std::vector<double> prefix_regret;         // R_t for t = 1..T
  std::vector<double> average_regret_curve;  // R_t / t
  double cumulative_loss = 0.0;
  double competitor_loss = 0.0;
  double regret = 0.0;
  std::map<std::string, double> bound_values;
};

/// R_T(theta) = sum |y_hat_t - y_t|^2 - sum |X_t theta - y_t|^2.
RegretReport regret(std::span<const StepRecord> stream, const Vector& competitor);

/// Minimum-norm minimizer of the total competitor loss, i.e. the minimum-norm
/// solution of (sum X^T X) theta = sum X^T y. Throws DimensionMismatch on an
/// empty stream.
Vector best_competitor(std::span<const StepRecord> stream);

/// CSV with header t,loss,cumulative_loss,regret_prefix,average_regret.
void write_regret_csv(const RegretReport& report, std::ostream& out);

}  // namespace multivaw
