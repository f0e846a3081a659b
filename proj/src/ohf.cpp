#include "multivaw/ohf.hpp"

#include <string>

#include "multivaw/kronecker_vaw.hpp"
#include "multivaw/metavaw.hpp"

namespace multivaw {

Matrix ohf_feature_matrix(const Matrix& s_t, const Vector& x) {
  return kronecker(x.transpose(), s_t);
}

namespace {

void require_fixed(const Matrix& expected, const Matrix& s_t, std::string_view who) {
  if (s_t.rows() != expected.rows() || s_t.cols() != expected.cols() || s_t != expected) {
    throw ConfigError(std::string(who) + " requires a time-invariant summing matrix");
  }
}

class VectorizedOhf final : public OhfForecaster {
 public:
  VectorizedOhf(std::unique_ptr<OnlineLearner> learner, Index basis_dim, Index feature_dim)
      : learner_(std::move(learner)), basis_dim_(basis_dim), feature_dim_(feature_dim) {
    if (learner_->dim() != basis_dim * feature_dim) {
      throw DimensionMismatch("vectorized forecaster: learner dimension " + std::to_string(learner_->dim()) +
                              " != " + std::to_string(basis_dim) + " * " + std::to_string(feature_dim));
    }
  }

  Vector predict(const Matrix& s_t, const Vector& x) override {
    if (s_t.cols() != basis_dim_ || x.size() != feature_dim_) {
      throw DimensionMismatch("vectorized forecaster: summing matrix or features have the wrong shape");
    }
    return learner_->predict(ohf_feature_matrix(s_t, x));
  }
  void observe(const Vector& y) override { learner_->observe(y); }
  std::string_view name() const noexcept override { return learner_->name(); }
  bool supports_time_varying() const noexcept override { return true; }
  Vector parameter() const override { return learner_->parameter(); }

 private:
  std::unique_ptr<OnlineLearner> learner_;
  Index basis_dim_;
  Index feature_dim_;
};

class KroneckerOhf final : public OhfForecaster {
 public:
  KroneckerOhf(const Matrix& s, double lambda, Index feature_dim)
      : s_(s), learner_(s, lambda * Matrix::Identity(feature_dim, feature_dim)) {}

  Vector predict(const Matrix& s_t, const Vector& x) override {
    require_fixed(s_, s_t, "kronecker forecaster");
    return learner_.predict(x);
  }
  void observe(const Vector& y) override { learner_.observe(y); }
  std::string_view name() const noexcept override { return "multivaw-kronecker"; }
  bool supports_time_varying() const noexcept override { return false; }
  Vector parameter() const override { return vec(learner_.coefficients()); }

 private:
  Matrix s_;
  KroneckerMultiVaw learner_;
};

class MetaVawOhf final : public OhfForecaster {
 public:
  MetaVawOhf(const Matrix& s, double lambda, Index feature_dim)
      : s_(s), s_pinv_(left_pseudo_inverse(s)), learner_(s, lambda, feature_dim) {}

  Vector predict(const Matrix& s_t, const Vector& x) override {
    require_fixed(s_, s_t, "metavaw");
    return learner_.predict(x);
  }
  void observe(const Vector& y) override { learner_.observe(y); }
  std::string_view name() const noexcept override { return "metavaw"; }
  bool supports_time_varying() const noexcept override { return false; }
  Vector parameter() const override {
    return vec(s_pinv_ * learner_.response_accumulator() * learner_.gram_inverse());
  }

 private:
  Matrix s_;
  Matrix s_pinv_;
  MetaVaw learner_;
};

}  // namespace

std::unique_ptr<OhfForecaster> make_vectorized_ohf(std::unique_ptr<OnlineLearner> learner, Index basis_dim,
                                                   Index feature_dim) {
  return std::make_unique<VectorizedOhf>(std::move(learner), basis_dim, feature_dim);
}

std::unique_ptr<OhfForecaster> make_kronecker_ohf(const Matrix& s, double lambda, Index feature_dim) {
  return std::make_unique<KroneckerOhf>(s, lambda, feature_dim);
}

std::unique_ptr<OhfForecaster> make_metavaw_ohf(const Matrix& s, double lambda, Index feature_dim) {
  return std::make_unique<MetaVawOhf>(s, lambda, feature_dim);
}

}  // namespace multivaw
