#pragma once

#include <cstdint>

#include "multivaw/linalg.hpp"

namespace multivaw {

/// n independent ridge forward learners, one per series, followed by an
/// orthogonal projection of the stacked forecasts onto image(S):
///
///   y_hat_t = P_S (sum_{s<t} y_s x_s^T) (lambda I_m + sum_{s<=t} x_s x_s^T)^{-1} x_t.
///
/// S must be time-invariant with full column rank. The projection is applied
/// as S (S^+ v), so a step costs O(m^2 + nm + nd).
class MetaVaw {
 public:
  MetaVaw(Matrix s, double lambda, Index feature_dim);

  Vector predict(const Vector& x);
  void observe(const Vector& y);

  Index response_dim() const noexcept { return s_.rows(); }
  Index feature_dim() const noexcept { return gram_inv_.rows(); }
  double lambda() const noexcept { return lambda_; }
  std::uint64_t steps() const noexcept { return t_; }

  const Matrix& projection() const noexcept { return projection_; }
  /// (lambda I + sum x x^T)^{-1}, including the pending x_t.
  const Matrix& gram_inverse() const noexcept { return gram_inv_; }
  /// sum y x^T, n x m.
  const Matrix& response_accumulator() const noexcept { return response_; }
  /// Base forecasts of the pending step before reconciliation.
  const Vector& base_forecast() const noexcept { return base_; }

 private:
  double lambda_;
  Matrix s_;
  Matrix s_pinv_;
  Matrix projection_;
  Matrix gram_;
  Matrix gram_inv_;
  Matrix response_;
  Vector base_;
  Vector pending_x_;
  bool pending_ = false;
  std::uint64_t t_ = 0;
  std::uint64_t updates_since_refresh_ = 0;
};

}  // namespace multivaw
