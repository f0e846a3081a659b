#include "multivaw/learner.hpp"

#include <cmath>
#include <string>

namespace multivaw {

StepOutcome run_step(OnlineLearner& learner, const Matrix& features, const Vector& response) {
  StepOutcome out;
  out.prediction = learner.predict(features);
  if (response.size() != out.prediction.size()) {
    throw DimensionMismatch("response has length " + std::to_string(response.size()) + ", expected " +
                            std::to_string(out.prediction.size()));
  }
  out.theta_norm = learner.parameter().norm();
  out.response = response;
  out.loss = (out.prediction - response).squaredNorm();
  learner.observe(response);
  out.t = learner.steps();
  return out;
}

namespace detail {

void ProtocolGuard::begin(const Matrix& features, Index dim, std::string_view who) {
  if (pending_) {
    throw ProtocolViolation(std::string(who) + ": features received twice without a response");
  }
  if (features.cols() != dim) {
    throw DimensionMismatch(std::string(who) + ": features have " + std::to_string(features.cols()) +
                            " columns, expected " + std::to_string(dim));
  }
  if (!features.allFinite()) throw DimensionMismatch(std::string(who) + ": features contain non-finite values");
  pending_ = true;
  rows_ = features.rows();
}

void ProtocolGuard::end(const Vector& response, std::string_view who) {
  if (!pending_) throw ProtocolViolation(std::string(who) + ": response received before features");
  if (response.size() != rows_) {
    throw DimensionMismatch(std::string(who) + ": response has length " + std::to_string(response.size()) +
                            ", expected " + std::to_string(rows_));
  }
  pending_ = false;
  ++completed_;
}

}  // namespace detail

}  // namespace multivaw
