#pragma once

#include <Eigen/Core>

#include "multivaw/errors.hpp"

// Dense symmetric-positive-definite linear algebra and Kronecker/vec helpers
// shared by all learners. Factorizations run on the dispatched kernels in
// multivaw/simd/kernels.hpp and use a fixed summation order.

namespace multivaw {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Symmetry test used by every SPD entry point:
/// |a(i,j) - a(j,i)| <= 1e-12 * max(1, |a(i,j)|).
bool is_symmetric(const Matrix& a) noexcept;

/// Lower Cholesky factor of a symmetric positive-definite matrix.
///
/// With PivotRule::relative (the default) a pivot is accepted only when it
/// exceeds dim * machine-epsilon * max-diagonal; PivotRule::strict accepts any
/// positive pivot and is meant for semi-definiteness probes with explicit
/// slack.
class Cholesky {
 public:
  enum class PivotRule { relative, strict };

  explicit Cholesky(const Matrix& a, PivotRule rule = PivotRule::relative);

  Index dim() const noexcept { return lower_.rows(); }
  const Matrix& lower() const noexcept { return lower_; }

  Vector solve(const Vector& b) const;
  Matrix inverse() const;
  double log_determinant() const;

 private:
  Matrix lower_;
};

/// Solves a x = b for SPD a. Throws NotPositiveDefinite or DimensionMismatch.
Vector spd_solve(const Matrix& a, const Vector& b);

Matrix spd_inverse(const Matrix& a);

bool is_positive_definite(const Matrix& a) noexcept;

/// (A + X^T X)^{-1} from A^{-1} by the Woodbury identity,
///   A^{-1} - A^{-1} X^T (I + X A^{-1} X^T)^{-1} X A^{-1},
/// at O(n d^2 + n^2 d + n^3) cost for X of shape n x d.
Matrix woodbury_update(const Matrix& a_inv, const Matrix& x);
/// Same update applied to a_inv directly; a_inv stays exactly symmetric.
void woodbury_update_in_place(Matrix& a_inv, const Matrix& x);

/// a += X^T X, keeping a exactly symmetric when it was on entry.
void add_gram(Matrix& a, const Matrix& x);

Matrix kronecker(const Matrix& u, const Matrix& v);

/// Column-stacking vectorization.
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, Index rows, Index cols);

struct SymmetricEigen {
  Vector values;   // descending
  Matrix vectors;  // column i pairs with values[i]
  int sweeps = 0;
};

/// Cyclic Jacobi eigensolver. Throws ConvergenceFailure after max_sweeps.
SymmetricEigen symmetric_eigen(const Matrix& a, int max_sweeps = 64);

/// Eigenvalues in descending order.
Vector symmetric_eigenvalues(const Matrix& a);

/// S (S^T S)^{-1} S^T for full-column-rank S. Throws RankDeficient otherwise.
Matrix projection_onto_image(const Matrix& s);

/// (S^T S)^{-1} S^T, the pseudo-inverse of an injective S.
Matrix left_pseudo_inverse(const Matrix& s);

/// True when next - prev + slack * I is positive definite, i.e. the pair is
/// nondecreasing in the Loewner order up to the slack.
bool loewner_nondecreasing(const Matrix& prev, const Matrix& next, double slack = 1e-10);

}  // namespace multivaw
