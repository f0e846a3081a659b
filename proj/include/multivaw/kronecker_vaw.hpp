#pragma once

#include <cstdint>

#include "multivaw/learner.hpp"
#include "multivaw/schedule.hpp"

namespace multivaw {

/// Multivariate VAW for the matrix model Y_t = V Theta W_t with a fixed
/// injective V (n x d), vector features W_t (length m) and the structured
/// regularization Lambda = small (x) V^T V. The closed form
///
///   Theta_t = (V^T V)^{-1} V^T (sum_{s<t} Y_s W_s^T) (small + sum_{s<=t} W_s W_s^T)^{-1}
///
/// costs O(m^2 + nm + nd) per step instead of a factorization in dimension dm.
class KroneckerMultiVaw {
 public:
  KroneckerMultiVaw(Matrix v, Matrix small);

  /// Receives W_t and returns V Theta_t W_t.
  Vector predict(const Vector& w);
  void observe(const Vector& y);

  Index response_dim() const noexcept { return v_.rows(); }
  Index basis_dim() const noexcept { return v_.cols(); }
  Index feature_dim() const noexcept { return small_.rows(); }
  std::uint64_t steps() const noexcept { return t_; }

  /// Theta_t (d x m) behind the pending prediction.
  Matrix coefficients() const;

  /// small (x) V^T V: the regularization of the equivalent vectorized learner.
  RegularizationSchedule equivalent_schedule() const;

 private:
  Matrix v_;
  Matrix v_pinv_;
  Matrix small_;
  Matrix gram_;      // small + sum W W^T
  Matrix gram_inv_;
  Matrix response_;  // sum Y W^T, n x m
  Vector pending_w_;
  bool pending_ = false;
  std::uint64_t t_ = 0;
  std::uint64_t updates_since_refresh_ = 0;
};

}  // namespace multivaw
