#include "multivaw/kronecker_vaw.hpp"

#include <string>

#include "multivaw/multivaw.hpp"

namespace multivaw {

KroneckerMultiVaw::KroneckerMultiVaw(Matrix v, Matrix small)
    : v_(std::move(v)), v_pinv_(left_pseudo_inverse(v_)), small_(std::move(small)) {
  if (!is_positive_definite(small_)) throw NotPositiveDefinite("kronecker learner: small regularizer is not SPD");
  gram_ = small_;
  gram_inv_ = spd_inverse(gram_);
  response_ = Matrix::Zero(v_.rows(), small_.rows());
}

Vector KroneckerMultiVaw::predict(const Vector& w) {
  if (pending_) throw ProtocolViolation("kronecker learner: features received twice without a response");
  if (w.size() != feature_dim()) {
    throw DimensionMismatch("kronecker learner: feature vector has length " + std::to_string(w.size()) +
                            ", expected " + std::to_string(feature_dim()));
  }
  const Matrix row = w.transpose();
  add_gram(gram_, row);
  if (++updates_since_refresh_ >= MultiVaw::kRefreshInterval) {
    gram_inv_ = spd_inverse(gram_);
    updates_since_refresh_ = 0;
  } else {
    woodbury_update_in_place(gram_inv_, row);
  }
  pending_w_ = w;
  pending_ = true;
  const Vector mixed = response_ * (gram_inv_ * w);
  return v_ * (v_pinv_ * mixed);
}

void KroneckerMultiVaw::observe(const Vector& y) {
  if (!pending_) throw ProtocolViolation("kronecker learner: response received before features");
  if (y.size() != response_dim()) {
    throw DimensionMismatch("kronecker learner: response has length " + std::to_string(y.size()) +
                            ", expected " + std::to_string(response_dim()));
  }
  response_.noalias() += y * pending_w_.transpose();
  pending_ = false;
  ++t_;
}

Matrix KroneckerMultiVaw::coefficients() const {
  // Exact Theta_t while a prediction is pending; after observe() it already
  // includes y_t.
  return v_pinv_ * response_ * gram_inv_;
}

RegularizationSchedule KroneckerMultiVaw::equivalent_schedule() const {
  return RegularizationSchedule::kronecker(small_, v_.transpose() * v_);
}

}  // namespace multivaw
