#include "multivaw/metavaw.hpp"

#include <cmath>
#include <string>

#include "multivaw/multivaw.hpp"

namespace multivaw {

MetaVaw::MetaVaw(Matrix s, double lambda, Index feature_dim)
    : lambda_(lambda), s_(std::move(s)), s_pinv_(left_pseudo_inverse(s_)) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw NotPositiveDefinite("metavaw: lambda must be positive");
  if (feature_dim <= 0) throw DimensionMismatch("metavaw: feature dimension must be positive");
  projection_ = projection_onto_image(s_);
  gram_ = lambda * Matrix::Identity(feature_dim, feature_dim);
  gram_inv_ = Matrix::Identity(feature_dim, feature_dim) / lambda;
  response_ = Matrix::Zero(s_.rows(), feature_dim);
}

Vector MetaVaw::predict(const Vector& x) {
  if (pending_) throw ProtocolViolation("metavaw: features received twice without a response");
  if (x.size() != feature_dim()) {
    throw DimensionMismatch("metavaw: feature vector has length " + std::to_string(x.size()) + ", expected " +
                            std::to_string(feature_dim()));
  }
  gram_.noalias() += x * x.transpose();
  if (++updates_since_refresh_ >= MultiVaw::kRefreshInterval) {
    gram_inv_ = spd_inverse(gram_);
    updates_since_refresh_ = 0;
  } else {
    const Vector u = gram_inv_ * x;
    gram_inv_.noalias() -= (u * u.transpose()) / (1.0 + x.dot(u));
  }
  base_ = response_ * (gram_inv_ * x);
  pending_x_ = x;
  pending_ = true;
  return s_ * (s_pinv_ * base_);
}

void MetaVaw::observe(const Vector& y) {
  if (!pending_) throw ProtocolViolation("metavaw: response received before features");
  if (y.size() != response_dim()) {
    throw DimensionMismatch("metavaw: response has length " + std::to_string(y.size()) + ", expected " +
                            std::to_string(response_dim()));
  }
  response_.noalias() += y * pending_x_.transpose();
  pending_ = false;
  ++t_;
}

}  // namespace multivaw
