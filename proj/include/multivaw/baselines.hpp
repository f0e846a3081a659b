#pragma once

#include <cstdint>

#include "multivaw/learner.hpp"

namespace multivaw {

/// Follow-the-regularized-leader with squared loss and a ridge regularizer:
/// theta_t = (lambda I + sum_{s<t} X_s^T X_s)^{-1} b_{t-1}. Unlike MultiVaw the
/// current features do not enter the normal matrix.
class Ftrl final : public OnlineLearner {
 public:
  Ftrl(Index dim, double lambda);

  Vector predict(const Matrix& features) override;
  void observe(const Vector& response) override;

  Index dim() const noexcept override { return b_.size(); }
  std::uint64_t steps() const noexcept override { return guard_.completed(); }
  const Vector& parameter() const noexcept override { return theta_; }
  std::string_view name() const noexcept override { return "ftrl"; }

 private:
  Matrix a_;
  Matrix a_inv_;
  Vector b_;
  Vector theta_;
  Matrix pending_features_;
  detail::ProtocolGuard guard_;
  std::uint64_t updates_since_refresh_ = 0;
};

/// Projected online gradient descent on the squared loss,
///   theta_{t+1} = clip_[-M, M](theta_t - 2 eta X_t^T (X_t theta_t - y_t)),
/// starting from theta_1 = 0.
class Ogd final : public OnlineLearner {
 public:
  /// Default box radius. Large enough to be inactive on well-scaled data.
  static constexpr double kDefaultBound = 1e6;

  Ogd(Index dim, double eta, double bound = kDefaultBound);

  /// eta = 1e-9 / lambda, the step size used for the lambda sweeps.
  static double default_step(double lambda) { return 1e-9 / lambda; }

  Vector predict(const Matrix& features) override;
  void observe(const Vector& response) override;

  Index dim() const noexcept override { return theta_.size(); }
  std::uint64_t steps() const noexcept override { return guard_.completed(); }
  const Vector& parameter() const noexcept override { return theta_; }
  std::string_view name() const noexcept override { return "ogd"; }

  double step_size() const noexcept { return eta_; }
  double bound() const noexcept { return bound_; }

 private:
  double eta_;
  double bound_;
  Vector theta_;
  Matrix pending_features_;
  Vector pending_prediction_;
  detail::ProtocolGuard guard_;
};

}  // namespace multivaw
