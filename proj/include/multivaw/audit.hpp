#pragma once

#include <span>

#include "multivaw/linalg.hpp"
#include "multivaw/schedule.hpp"

// Dual-route consistency checks. Each audit feeds one stream to two
// independent implementations of the same predictor and reports the largest
// per-step disagreement. An empty stream has deviation 0.

namespace multivaw {

struct RegressionStep {
  Matrix features;
  Vector response;
};

struct OhfStep {
  Vector x;
  Vector y;
};

/// Woodbury-updated inverse vs a fresh Cholesky solve at every step, for a
/// constant schedule: max_t |theta_W - theta_F| / (1 + |theta_F|).
double woodbury_path_audit(const RegularizationSchedule& schedule, std::span<const RegressionStep> stream);

/// Closed-form structured learner with V fixed vs the vectorized learner on
/// X_t = w_t^T (x) V with Lambda = small (x) V^T V: max_t |y_hat_K - y_hat_V|.
double kronecker_path_audit(const Matrix& v, const Matrix& small, std::span<const OhfStep> stream);

/// Projected per-node forward learners vs the vectorized hierarchical learner
/// with Lambda = lambda I_m (x) S^T S: max_t |y_hat_meta - y_hat_multi|.
double metavaw_equivalence_audit(const Matrix& s, double lambda, std::span<const OhfStep> stream);

}  // namespace multivaw
