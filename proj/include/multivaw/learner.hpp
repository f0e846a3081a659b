#pragma once

#include <cstdint>
#include <string_view>

#include "multivaw/linalg.hpp"

namespace multivaw {

/// Step-wise online regression contract: features in, prediction out,
/// response in. Calling predict twice, or observe without a pending predict,
/// throws ProtocolViolation.
class OnlineLearner {
 public:
  virtual ~OnlineLearner() = default;

  /// Receives X_t (n_t x dim) and returns X_t theta_t.
  virtual Vector predict(const Matrix& features) = 0;
  /// Receives y_t (length n_t) for the pending features.
  virtual void observe(const Vector& response) = 0;

  virtual Index dim() const noexcept = 0;
  /// Completed rounds.
  virtual std::uint64_t steps() const noexcept = 0;
  /// theta_t of the latest prediction (zero before the first step).
  virtual const Vector& parameter() const noexcept = 0;
  virtual std::string_view name() const noexcept = 0;
};

struct StepOutcome {
  std::size_t t = 0;
  Vector prediction;
  Vector response;
  double loss = 0.0;
  double theta_norm = 0.0;
};

/// One full protocol round on any learner.
StepOutcome run_step(OnlineLearner& learner, const Matrix& features, const Vector& response);

namespace detail {

/// Tracks the two-phase alternation shared by every learner.
class ProtocolGuard {
 public:
  /// Validates the feature matrix shape and enters the awaiting-response phase.
  void begin(const Matrix& features, Index dim, std::string_view who);
  /// Validates the response length and returns to the awaiting-features phase.
  void end(const Vector& response, std::string_view who);

  bool pending() const noexcept { return pending_; }
  Index pending_rows() const noexcept { return rows_; }
  std::uint64_t completed() const noexcept { return completed_; }

 private:
  bool pending_ = false;
  Index rows_ = 0;
  std::uint64_t completed_ = 0;
};

}  // namespace detail

}  // namespace multivaw
