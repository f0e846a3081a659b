#include "multivaw/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace multivaw {

RegularizationSchedule RegularizationSchedule::scaled_identity(Index dim, double lambda) {
  if (dim <= 0) throw DimensionMismatch("scaled identity schedule: dimension must be positive");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw NotPositiveDefinite("scaled identity schedule: lambda must be positive, got " + std::to_string(lambda));
  }
  return RegularizationSchedule(ScaledIdentity{dim, lambda});
}

RegularizationSchedule RegularizationSchedule::constant(Matrix lambda) {
  return RegularizationSchedule(ConstantMatrix{std::move(lambda)});
}

RegularizationSchedule RegularizationSchedule::kronecker(Matrix small, Matrix gram) {
  return RegularizationSchedule(KroneckerConstant{std::move(small), std::move(gram)});
}

RegularizationSchedule RegularizationSchedule::explicit_sequence(std::vector<Matrix> matrices) {
  if (matrices.empty()) throw DimensionMismatch("explicit schedule: sequence is empty");
  return RegularizationSchedule(ExplicitSequence{std::move(matrices)});
}

RegularizationSchedule::RegularizationSchedule(Kind kind) : kind_(std::move(kind)) {
  if (const auto* s = std::get_if<ScaledIdentity>(&kind_)) {
    matrices_.push_back(s->lambda * Matrix::Identity(s->dim, s->dim));
  } else if (const auto* c = std::get_if<ConstantMatrix>(&kind_)) {
    if (!is_positive_definite(c->lambda)) {
      throw NotPositiveDefinite("constant schedule: regularization matrix is not SPD");
    }
    matrices_.push_back(c->lambda);
  } else if (const auto* k = std::get_if<KroneckerConstant>(&kind_)) {
    if (!is_positive_definite(k->small)) throw NotPositiveDefinite("kronecker schedule: small factor is not SPD");
    if (!is_positive_definite(k->gram)) throw NotPositiveDefinite("kronecker schedule: gram factor is not SPD");
    matrices_.push_back(multivaw::kronecker(k->small, k->gram));
  } else {
    const auto& seq = std::get<ExplicitSequence>(kind_).matrices;
    const Index d = seq.front().rows();
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (seq[i].rows() != d || seq[i].cols() != d) {
        throw DimensionMismatch("explicit schedule: entry " + std::to_string(i) + " has the wrong shape");
      }
      if (!is_positive_definite(seq[i])) {
        throw NotPositiveDefinite("explicit schedule: entry " + std::to_string(i) + " is not SPD");
      }
      if (i > 0) {
        if (!loewner_nondecreasing(seq[i - 1], seq[i])) {
          throw ScheduleViolation("explicit schedule: entry " + std::to_string(i) +
                                  " is smaller than its predecessor in the Loewner order");
        }
        if (seq[i] != seq[i - 1]) constant_ = false;
      }
    }
    matrices_ = seq;
  }
  dim_ = matrices_.front().rows();
}

const Matrix& RegularizationSchedule::at(std::size_t t) const {
  if (t == 0) return matrices_.front();
  const std::size_t i = std::min(t, matrices_.size()) - 1;
  return matrices_[i];
}

double RegularizationSchedule::scalar_lambda() const noexcept {
  if (const auto* s = std::get_if<ScaledIdentity>(&kind_)) return s->lambda;
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace multivaw
