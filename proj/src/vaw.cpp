#include "multivaw/vaw.hpp"

#include <cmath>
#include <string>

#include "multivaw/multivaw.hpp"

namespace multivaw {

Vaw::Vaw(Index dim, double lambda) : lambda_(lambda) {
  if (dim <= 0) throw DimensionMismatch("vaw: dimension must be positive");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw NotPositiveDefinite("vaw: lambda must be positive");
  a_ = lambda_ * Matrix::Identity(dim, dim);
  a_inv_ = Matrix::Identity(dim, dim) / lambda_;
  b_ = Vector::Zero(dim);
  theta_ = Vector::Zero(dim);
}

double Vaw::predict(const Vector& x) {
  if (pending_) throw ProtocolViolation("vaw: features received twice without a response");
  if (x.size() != dim()) {
    throw DimensionMismatch("vaw: feature vector has length " + std::to_string(x.size()) + ", expected " +
                            std::to_string(dim()));
  }
  a_.noalias() += x * x.transpose();
  if (++updates_since_refresh_ >= MultiVaw::kRefreshInterval) {
    a_inv_ = spd_inverse(a_);
    updates_since_refresh_ = 0;
  } else {
    const Vector u = a_inv_ * x;
    a_inv_.noalias() -= (u * u.transpose()) / (1.0 + x.dot(u));
  }
  theta_ = a_inv_ * b_;
  pending_x_ = x;
  pending_ = true;
  return x.dot(theta_);
}

void Vaw::observe(double y) {
  if (!pending_) throw ProtocolViolation("vaw: response received before features");
  b_ += y * pending_x_;
  pending_ = false;
  ++t_;
}

}  // namespace multivaw
