#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>

#include "multivaw/learner.hpp"
#include "multivaw/schedule.hpp"

namespace multivaw {

/// Sufficient statistics of the multivariate forward algorithm.
///
///   A_t = Lambda_t + sum_{s<=t} X_s^T X_s,   b_t = sum_{s<=t} X_s^T y_s,
///
/// and the parameter used at step t solves A_t theta_t = b_{t-1}.
struct LearnerState {
  std::uint64_t t = 0;
  Matrix a;
  std::optional<Matrix> a_inv;  // maintained on the Woodbury path only
  Vector b;
  Matrix lambda_prev;
};

/// How theta_t is obtained from A_t.
enum class SolvePath {
  automatic,  // Woodbury for constant schedules, factorization otherwise
  woodbury,   // rank-n_t update of A^{-1}; falls back to a refresh when Lambda moves
  factorize,  // fresh Cholesky of A_t at every step
};

/// Multivariate Vovk-Azoury-Warmuth learner:
///
///   theta_t = argmin sum_{s<t} |X_s theta - y_s|^2 + |X_t theta|^2 + |theta|^2_{Lambda_t}.
class MultiVaw final : public OnlineLearner {
 public:
  /// A_inv is rebuilt from A after this many Woodbury updates.
  static constexpr std::uint64_t kRefreshInterval = 512;

  explicit MultiVaw(RegularizationSchedule schedule, SolvePath path = SolvePath::automatic);

  /// Uses the schedule's matrix for the next step.
  Vector predict(const Matrix& features) override;
  /// Uses an explicitly supplied Lambda_t; it must dominate the previous one.
  Vector predict(const Matrix& features, const Matrix& next_lambda);
  void observe(const Vector& response) override;

  Index dim() const noexcept override { return state_.b.size(); }
  std::uint64_t steps() const noexcept override { return state_.t; }
  const Vector& parameter() const noexcept override { return theta_; }
  std::string_view name() const noexcept override { return "multivaw"; }

  const LearnerState& state() const noexcept { return state_; }
  const RegularizationSchedule& schedule() const noexcept { return schedule_; }
  bool uses_woodbury() const noexcept { return woodbury_; }

  /// Binary checkpoint: magic "MVAWCKP1", uint64 dim, row-major A (dim*dim
  /// doubles), b (dim doubles), uint64 t. Native endianness.
  void save_checkpoint(std::ostream& out) const;
  /// Rebuilds a learner from a checkpoint; the schedule must be the one the
  /// checkpointed run used.
  static MultiVaw load_checkpoint(std::istream& in, RegularizationSchedule schedule,
                                  SolvePath path = SolvePath::automatic);

 private:
  RegularizationSchedule schedule_;
  LearnerState state_;
  Vector theta_;
  Matrix pending_features_;
  detail::ProtocolGuard guard_;
  bool woodbury_ = false;
  std::uint64_t updates_since_refresh_ = 0;
};

}  // namespace multivaw
