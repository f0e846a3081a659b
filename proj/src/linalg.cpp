#include "multivaw/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "multivaw/simd/kernels.hpp"

namespace multivaw {

namespace {

std::size_t usize(Index n) { return static_cast<std::size_t>(n); }

void symmetrize(Matrix& a) {
  const Index n = a.rows();
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      const double m = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = m;
      a(j, i) = m;
    }
  }
}

void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw DimensionMismatch(std::string(what) + ": matrix is " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + ", expected square");
  }
}

}  // namespace

bool is_symmetric(const Matrix& a) noexcept {
  if (a.rows() != a.cols()) return false;
  const Index n = a.rows();
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      const double aij = a(i, j);
      if (!std::isfinite(aij)) return false;
      if (std::abs(aij - a(j, i)) > 1e-12 * std::max(1.0, std::abs(aij))) return false;
    }
  }
  return true;
}

Cholesky::Cholesky(const Matrix& a, PivotRule rule) : lower_(a) {
  require_square(a, "cholesky");
  if (!is_symmetric(a)) throw NotPositiveDefinite("cholesky: matrix is not symmetric");

  const auto& k = simd::active();
  const Index n = a.rows();
  double max_diag = 0.0;
  for (Index i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
  const double threshold = rule == PivotRule::relative
                               ? static_cast<double>(n) * std::numeric_limits<double>::epsilon() * max_diag
                               : 0.0;

  // Left-looking column variant: every update is a contiguous axpy on a
  // column segment of the column-major factor.
  double* base = lower_.data();
  for (Index j = 0; j < n; ++j) {
    double* col_j = base + j * n;
    for (Index p = 0; p < j; ++p) {
      const double* col_p = base + p * n;
      k.axpy(-col_p[j], col_p + j, col_j + j, usize(n - j));
    }
    const double pivot = col_j[j];
    if (!(pivot > threshold)) {
      throw NotPositiveDefinite("cholesky: pivot " + std::to_string(j) + " is " + std::to_string(pivot) +
                                    " (threshold " + std::to_string(threshold) + ")",
                                j);
    }
    const double d = std::sqrt(pivot);
    col_j[j] = d;
    k.scal(1.0 / d, col_j + j + 1, usize(n - j - 1));
  }
  lower_.triangularView<Eigen::StrictlyUpper>().setZero();
}

Vector Cholesky::solve(const Vector& b) const {
  const Index n = dim();
  if (b.size() != n) {
    throw DimensionMismatch("cholesky solve: rhs has length " + std::to_string(b.size()) +
                            ", expected " + std::to_string(n));
  }
  const auto& k = simd::active();
  const double* base = lower_.data();
  Vector x = b;
  double* xs = x.data();
  for (Index j = 0; j < n; ++j) {
    const double* col = base + j * n;
    xs[j] /= col[j];
    k.axpy(-xs[j], col + j + 1, xs + j + 1, usize(n - j - 1));
  }
  for (Index j = n - 1; j >= 0; --j) {
    const double* col = base + j * n;
    xs[j] = (xs[j] - k.dot(col + j + 1, xs + j + 1, usize(n - j - 1))) / col[j];
  }
  return x;
}

Matrix Cholesky::inverse() const {
  const Index n = dim();
  Matrix inv(n, n);
  Vector e = Vector::Zero(n);
  for (Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    inv.col(j) = solve(e);
    e[j] = 0.0;
  }
  symmetrize(inv);
  return inv;
}

double Cholesky::log_determinant() const {
  double acc = 0.0;
  for (Index i = 0; i < dim(); ++i) acc += std::log(lower_(i, i));
  return 2.0 * acc;
}

Vector spd_solve(const Matrix& a, const Vector& b) {
  require_square(a, "spd_solve");
  if (b.size() != a.rows()) {
    throw DimensionMismatch("spd_solve: rhs has length " + std::to_string(b.size()) + ", expected " +
                            std::to_string(a.rows()));
  }
  return Cholesky(a).solve(b);
}

Matrix spd_inverse(const Matrix& a) { return Cholesky(a).inverse(); }

bool is_positive_definite(const Matrix& a) noexcept {
  try {
    Cholesky chol(a);
    return true;
  } catch (const Error&) {
    return false;
  }
}

Matrix woodbury_update(const Matrix& a_inv, const Matrix& x) {
  Matrix out = a_inv;
  woodbury_update_in_place(out, x);
  return out;
}

void woodbury_update_in_place(Matrix& a_inv, const Matrix& x) {
  require_square(a_inv, "woodbury_update");
  const Index d = a_inv.rows();
  if (x.cols() != d) {
    throw DimensionMismatch("woodbury_update: features have " + std::to_string(x.cols()) +
                            " columns, expected " + std::to_string(d));
  }
  const Index n = x.rows();
  if (n == 0) return;

  const auto& k = simd::active();
  const Matrix xt = x.transpose();  // column r is row r of X

  // ut(:, r) = A^{-1} x_r (A^{-1} symmetric, so rows are columns).
  Matrix ut(d, n);
  for (Index r = 0; r < n; ++r) {
    for (Index j = 0; j < d; ++j) ut(j, r) = k.dot(a_inv.col(j).data(), xt.col(r).data(), usize(d));
  }

  // inner = I + X A^{-1} X^T
  Matrix inner(n, n);
  for (Index s = 0; s < n; ++s) {
    for (Index r = 0; r < n; ++r) inner(r, s) = k.dot(ut.col(r).data(), xt.col(s).data(), usize(d));
    inner(s, s) += 1.0;
  }
  symmetrize(inner);
  const Matrix inner_inv = Cholesky(inner).inverse();

  // zt = ut * inner^{-1}
  Matrix zt = Matrix::Zero(d, n);
  for (Index s = 0; s < n; ++s) {
    for (Index r = 0; r < n; ++r) k.axpy(inner_inv(r, s), ut.col(r).data(), zt.col(s).data(), usize(d));
  }

  // Lower triangle only, then mirror.
  for (Index j = 0; j < d; ++j) {
    double* col = a_inv.col(j).data() + j;
    const auto len = usize(d - j);
    for (Index r = 0; r < n; ++r) k.axpy(-zt(j, r), ut.col(r).data() + j, col, len);
  }
  for (Index j = 1; j < d; ++j) {
    for (Index i = 0; i < j; ++i) a_inv(i, j) = a_inv(j, i);
  }
}

void add_gram(Matrix& a, const Matrix& x) {
  require_square(a, "add_gram");
  const Index d = a.rows();
  if (x.cols() != d) {
    throw DimensionMismatch("add_gram: features have " + std::to_string(x.cols()) + " columns, expected " +
                            std::to_string(d));
  }
  const auto& k = simd::active();
  const Matrix xt = x.transpose();
  for (Index r = 0; r < xt.cols(); ++r) {
    const double* row = xt.col(r).data();
    for (Index j = 0; j < d; ++j) {
      if (row[j] != 0.0) k.axpy(row[j], row, a.col(j).data(), usize(d));
    }
  }
}

Matrix kronecker(const Matrix& u, const Matrix& v) {
  Matrix out(u.rows() * v.rows(), u.cols() * v.cols());
  for (Index j = 0; j < u.cols(); ++j) {
    for (Index i = 0; i < u.rows(); ++i) {
      out.block(i * v.rows(), j * v.cols(), v.rows(), v.cols()) = u(i, j) * v;
    }
  }
  return out;
}

Vector vec(const Matrix& m) {
  // Eigen storage is column-major, so the raw buffer is already vec(m).
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvec(const Vector& v, Index rows, Index cols) {
  if (rows * cols != v.size()) {
    throw DimensionMismatch("unvec: " + std::to_string(v.size()) + " entries cannot fill " +
                            std::to_string(rows) + "x" + std::to_string(cols));
  }
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

SymmetricEigen symmetric_eigen(const Matrix& a, int max_sweeps) {
  require_square(a, "symmetric_eigen");
  if (!is_symmetric(a)) throw NotPositiveDefinite("symmetric_eigen: matrix is not symmetric");

  const auto& k = simd::active();
  const Index n = a.rows();
  Matrix w = a;
  Matrix v = Matrix::Identity(n, n);
  const double norm = a.norm();

  auto off_diagonal = [&]() {
    double acc = 0.0;
    for (Index j = 0; j < n; ++j) {
      for (Index i = j + 1; i < n; ++i) acc += w(i, j) * w(i, j);
    }
    return std::sqrt(2.0 * acc);
  };

  SymmetricEigen out;
  int sweep = 0;
  for (;; ++sweep) {
    const double off = off_diagonal();
    if (off == 0.0 || off <= 1e-15 * norm) break;
    if (sweep == max_sweeps) {
      throw ConvergenceFailure("symmetric_eigen: off-diagonal norm " + std::to_string(off) +
                                   " after " + std::to_string(sweep) + " sweeps",
                               sweep);
    }
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = w(p, q);
        if (apq == 0.0) continue;
        const double app = w(p, p);
        const double aqq = w(q, q);
        // Negligible against both diagonal entries: zero it and move on.
        const double g = 100.0 * std::abs(apq);
        if (sweep > 3 && std::abs(app) + g == std::abs(app) && std::abs(aqq) + g == std::abs(aqq)) {
          w(p, q) = 0.0;
          w(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        k.rot(w.col(p).data(), w.col(q).data(), usize(n), c, s);
        for (Index r = 0; r < n; ++r) {
          w(p, r) = w(r, p);
          w(q, r) = w(r, q);
        }
        w(p, p) = app - t * apq;
        w(q, q) = aqq + t * apq;
        w(p, q) = 0.0;
        w(q, p) = 0.0;
        k.rot(v.col(p).data(), v.col(q).data(), usize(n), c, s);
      }
    }
  }

  std::vector<Index> order(usize(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return w(i, i) > w(j, j); });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    out.values[i] = w(order[usize(i)], order[usize(i)]);
    out.vectors.col(i) = v.col(order[usize(i)]);
  }
  out.sweeps = sweep;
  return out;
}

Vector symmetric_eigenvalues(const Matrix& a) { return symmetric_eigen(a).values; }

Matrix left_pseudo_inverse(const Matrix& s) {
  Matrix g = s.transpose() * s;
  symmetrize(g);
  try {
    return Cholesky(g).inverse() * s.transpose();
  } catch (const NotPositiveDefinite& e) {
    throw RankDeficient(std::string("matrix does not have full column rank: ") + e.what());
  }
}

Matrix projection_onto_image(const Matrix& s) {
  Matrix p = s * left_pseudo_inverse(s);
  symmetrize(p);
  return p;
}

bool loewner_nondecreasing(const Matrix& prev, const Matrix& next, double slack) {
  if (prev.rows() != next.rows() || prev.cols() != next.cols()) {
    throw DimensionMismatch("loewner_nondecreasing: shape mismatch");
  }
  Matrix diff = next - prev;
  if (diff.isZero(0.0)) return true;
  diff.diagonal().array() += slack;
  symmetrize(diff);
  try {
    Cholesky chol(diff, Cholesky::PivotRule::strict);
    return true;
  } catch (const NotPositiveDefinite&) {
    return false;
  }
}

}  // namespace multivaw
