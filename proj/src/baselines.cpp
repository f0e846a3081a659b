#include "multivaw/baselines.hpp"

#include <cmath>
#include <string>

#include "multivaw/multivaw.hpp"

namespace multivaw {

Ftrl::Ftrl(Index dim, double lambda) {
  if (dim <= 0) throw DimensionMismatch("ftrl: dimension must be positive");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw NotPositiveDefinite("ftrl: lambda must be positive");
  a_ = lambda * Matrix::Identity(dim, dim);
  a_inv_ = Matrix::Identity(dim, dim) / lambda;
  b_ = Vector::Zero(dim);
  theta_ = Vector::Zero(dim);
}

Vector Ftrl::predict(const Matrix& features) {
  guard_.begin(features, dim(), name());
  theta_ = a_inv_ * b_;
  pending_features_ = features;
  return features * theta_;
}

void Ftrl::observe(const Vector& response) {
  guard_.end(response, name());
  add_gram(a_, pending_features_);
  if (++updates_since_refresh_ >= MultiVaw::kRefreshInterval) {
    a_inv_ = spd_inverse(a_);
    updates_since_refresh_ = 0;
  } else {
    woodbury_update_in_place(a_inv_, pending_features_);
  }
  b_.noalias() += pending_features_.transpose() * response;
}

Ogd::Ogd(Index dim, double eta, double bound) : eta_(eta), bound_(bound) {
  if (dim <= 0) throw DimensionMismatch("ogd: dimension must be positive");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("ogd: step size must be positive");
  if (!(bound > 0.0)) throw ConfigError("ogd: projection bound must be positive");
  theta_ = Vector::Zero(dim);
}

Vector Ogd::predict(const Matrix& features) {
  guard_.begin(features, dim(), name());
  pending_features_ = features;
  pending_prediction_ = features * theta_;
  return pending_prediction_;
}

void Ogd::observe(const Vector& response) {
  guard_.end(response, name());
  const Vector gradient = 2.0 * (pending_features_.transpose() * (pending_prediction_ - response));
  theta_ = (theta_ - eta_ * gradient).cwiseMax(-bound_).cwiseMin(bound_);
}

}  // namespace multivaw
