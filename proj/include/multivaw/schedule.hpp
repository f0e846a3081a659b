#pragma once

#include <variant>
#include <vector>

#include "multivaw/linalg.hpp"

namespace multivaw {

/// Rule producing the regularization matrix used at each step t = 1, 2, ...
///
/// Every produced matrix is SPD and the sequence is nondecreasing in the
/// Loewner order; both are checked at construction. An explicit sequence
/// holds its last matrix once t runs past its end.
class RegularizationSchedule {
 public:
  struct ScaledIdentity {
    Index dim;
    double lambda;
  };
  struct ConstantMatrix {
    Matrix lambda;
  };
  /// small (m x m) (x) gram (d x d), a dm x dm matrix.
  struct KroneckerConstant {
    Matrix small;
    Matrix gram;
  };
  struct ExplicitSequence {
    std::vector<Matrix> matrices;
  };
  using Kind = std::variant<ScaledIdentity, ConstantMatrix, KroneckerConstant, ExplicitSequence>;

  static RegularizationSchedule scaled_identity(Index dim, double lambda);
  static RegularizationSchedule constant(Matrix lambda);
  static RegularizationSchedule kronecker(Matrix small, Matrix gram);
  static RegularizationSchedule explicit_sequence(std::vector<Matrix> matrices);

  const Kind& kind() const noexcept { return kind_; }
  Index dim() const noexcept { return dim_; }

  /// True for every kind except ExplicitSequence with distinct entries.
  bool is_constant() const noexcept { return constant_; }

  /// Matrix used at step t (1-based). t = 0 returns the first matrix, which
  /// plays the role of the initial regularizer.
  const Matrix& at(std::size_t t) const;

  const Matrix& first() const { return at(1); }

  /// Scalar lambda for the ScaledIdentity kind, NaN otherwise.
  double scalar_lambda() const noexcept;

 private:
  explicit RegularizationSchedule(Kind kind);

  Kind kind_;
  Index dim_ = 0;
  bool constant_ = true;
  // Materialized matrices: one entry for constant kinds, the full list
  // otherwise.
  std::vector<Matrix> matrices_;
};

}  // namespace multivaw
