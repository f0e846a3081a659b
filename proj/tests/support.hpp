#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

#include "multivaw/linalg.hpp"

// Random instances and dense reference computations for the tests. The
// references use Eigen's LU and eigen solvers, never the library's own
// factorizations.

namespace testing {

using multivaw::Index;
using multivaw::Matrix;
using multivaw::Vector;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

  Matrix matrix(Index rows, Index cols) {
    Matrix out(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) out(i, j) = normal();
    return out;
  }
  Vector vector(Index n) { return matrix(n, 1).col(0); }

  /// M^T M + shift I.
  Matrix spd(Index n, double shift = 1.0) {
    const Matrix m = matrix(n, n);
    Matrix out = m.transpose() * m + shift * Matrix::Identity(n, n);
    return 0.5 * (out + out.transpose());
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline Matrix lu_inverse(const Matrix& a) { return a.partialPivLu().inverse(); }
inline Vector lu_solve(const Matrix& a, const Vector& b) { return a.partialPivLu().solve(b); }

inline Vector reference_eigenvalues(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().reverse();
}

/// Relative Frobenius distance |a - b| / max(1, |b|).
inline double rel_diff(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

/// Forward algorithm evaluated from its definition with a dense LU solve:
/// theta_t = (Lambda_t + sum_{s<=t} X_s^T X_s)^{-1} sum_{s<t} X_s^T y_s.
class ReferenceForward {
 public:
  explicit ReferenceForward(Index dim) : gram_(Matrix::Zero(dim, dim)), rhs_(Vector::Zero(dim)) {}

  Vector theta(const Matrix& x, const Matrix& lambda) const {
    return lu_solve(lambda + gram_ + x.transpose() * x, rhs_);
  }
  void add(const Matrix& x, const Vector& y) {
    gram_ += x.transpose() * x;
    rhs_ += x.transpose() * y;
  }

 private:
  Matrix gram_;
  Vector rhs_;
};

}  // namespace testing
