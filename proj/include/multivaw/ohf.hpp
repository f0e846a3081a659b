#pragma once

#include <memory>
#include <string_view>

#include "multivaw/learner.hpp"

// Online hierarchical forecasting: at each step a summing matrix S_t
// (n_t x d) and features x_t (length m) arrive, the forecaster commits to a
// coherent y_hat_t in image(S_t), then y_t is revealed. With Theta of shape
// d x m the forecast S_t Theta x_t equals X_t vec(Theta) for
// X_t = x_t^T (x) S_t, which turns the problem into plain multivariate online
// regression in dimension dm.

namespace multivaw {

/// x^T (x) S_t, shape n_t x (d m).
Matrix ohf_feature_matrix(const Matrix& s_t, const Vector& x);

class OhfForecaster {
 public:
  virtual ~OhfForecaster() = default;

  virtual Vector predict(const Matrix& s_t, const Vector& x) = 0;
  virtual void observe(const Vector& y) = 0;

  virtual std::string_view name() const noexcept = 0;
  virtual bool supports_time_varying() const noexcept = 0;
  /// vec(Theta_t) of the pending prediction.
  virtual Vector parameter() const = 0;
};

/// Runs any vectorized learner of dimension basis_dim * feature_dim on
/// X_t = x_t^T (x) S_t. Accepts time-varying S_t.
std::unique_ptr<OhfForecaster> make_vectorized_ohf(std::unique_ptr<OnlineLearner> learner, Index basis_dim,
                                                   Index feature_dim);

/// Closed-form structured learner with regularization lambda I_m (x) S^T S.
std::unique_ptr<OhfForecaster> make_kronecker_ohf(const Matrix& s, double lambda, Index feature_dim);

/// Per-node ridge forward learners reconciled by projection onto image(S).
std::unique_ptr<OhfForecaster> make_metavaw_ohf(const Matrix& s, double lambda, Index feature_dim);

}  // namespace multivaw
