#pragma once

#include <cstdint>

#include "multivaw/linalg.hpp"

namespace multivaw {

/// Univariate Vovk-Azoury-Warmuth forward algorithm,
///
///   theta_t = argmin sum_{s<t} (x_s^T theta - y_s)^2 + (x_t^T theta)^2 + lambda |theta|^2,
///
/// with an O(d^2) Sherman-Morrison update per step.
class Vaw {
 public:
  Vaw(Index dim, double lambda);

  double predict(const Vector& x);
  void observe(double y);

  Index dim() const noexcept { return b_.size(); }
  const Vector& parameter() const noexcept { return theta_; }
  std::uint64_t steps() const noexcept { return t_; }

 private:
  double lambda_;
  Matrix a_;
  Matrix a_inv_;
  Vector b_;
  Vector theta_;
  Vector pending_x_;
  bool pending_ = false;
  std::uint64_t t_ = 0;
  std::uint64_t updates_since_refresh_ = 0;
};

}  // namespace multivaw
