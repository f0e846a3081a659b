#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "multivaw/bounds.hpp"
#include "multivaw/evaluation.hpp"
#include "multivaw/hierarchy.hpp"
#include "multivaw/multivaw.hpp"
#include "multivaw/ohf.hpp"
#include "support.hpp"

using namespace multivaw;

namespace {

std::vector<StepRecord> run_forward(testing::Rng& rng, const RegularizationSchedule& schedule, int steps,
                                    int max_rows, double y_scale = 1.0) {
  MultiVaw learner(schedule);
  std::vector<StepRecord> out;
  for (int t = 0; t < steps; ++t) {
    StepRecord rec;
    rec.features = rng.matrix(rng.integer(1, max_rows), schedule.dim());
    rec.response = y_scale * rng.vector(rec.features.rows());
    rec.prediction = learner.predict(rec.features);
    learner.observe(rec.response);
    out.push_back(std::move(rec));
  }
  return out;
}

double competitor_loss(const std::vector<StepRecord>& stream, const Vector& theta) {
  double acc = 0.0;
  for (const auto& s : stream) acc += (s.features * theta - s.response).squaredNorm();
  return acc;
}

StepRecord record(Matrix x, Vector y, Vector pred) { return {std::move(x), std::move(y), std::move(pred)}; }

}  // namespace

TEST_CASE("regret hand values") {
  std::vector<StepRecord> zeros{record(Matrix::Ones(1, 1), Vector::Zero(1), Vector::Zero(1))};
  CHECK(regret(zeros, Vector::Zero(1)).regret == 0.0);

  std::vector<StepRecord> one{record(Matrix::Ones(1, 1), Vector::Ones(1), Vector::Zero(1))};
  const auto r = regret(one, Vector::Ones(1));
  CHECK(r.regret == 1.0);
  CHECK(r.cumulative_loss == 1.0);
  CHECK(r.competitor_loss == 0.0);
  CHECK_THROWS_AS(regret(one, Vector::Ones(2)), DimensionMismatch);
}

TEST_CASE("regret report invariants") {
  testing::Rng rng(1);
  const auto stream = run_forward(rng, RegularizationSchedule::scaled_identity(4, 1.0), 50, 3);
  const Vector theta = rng.vector(4);
  const auto r = regret(stream, theta);
  CHECK(r.per_step_losses.size() == 50);
  CHECK(std::abs(r.regret - (r.cumulative_loss - r.competitor_loss)) <= 1e-9 * std::abs(r.regret));
  for (std::size_t t = 0; t < 50; ++t) {
    CHECK(r.per_step_losses[t] >= 0.0);
    CHECK(std::abs(r.average_regret_curve[t] * static_cast<double>(t + 1) - r.prefix_regret[t]) <=
          1e-9 * (1.0 + std::abs(r.prefix_regret[t])));
  }
  CHECK(r.competitor_loss == doctest::Approx(competitor_loss(stream, theta)).epsilon(1e-12));
}

TEST_CASE("regret CSV layout") {
  std::vector<StepRecord> stream{record(Matrix::Ones(1, 1), Vector::Ones(1), Vector::Zero(1)),
                                 record(Matrix::Ones(1, 1), Vector::Ones(1), Vector::Constant(1, 0.5))};
  std::ostringstream out;
  write_regret_csv(regret(stream, Vector::Zero(1)), out);
  CHECK(out.str() == "t,loss,cumulative_loss,regret_prefix,average_regret\n1,1,1,0,0\n2,0.25,1.25,-0.75,-0.375\n");
}

TEST_CASE("best competitor: minimum norm and realizable cases") {
  std::vector<StepRecord> under{record(Matrix::Ones(1, 2), Vector::Constant(1, 2.0), Vector::Zero(1))};
  const Vector mn = best_competitor(under);
  CHECK(mn[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mn[1] == doctest::Approx(1.0).epsilon(1e-12));

  testing::Rng rng(2);
  const Vector theta0 = rng.vector(5);
  std::vector<StepRecord> realizable;
  for (int t = 0; t < 30; ++t) {
    Matrix x = rng.matrix(2, 5);
    realizable.push_back(record(x, x * theta0, Vector::Zero(2)));
  }
  CHECK((best_competitor(realizable) - theta0).norm() <= 1e-8 * (1.0 + theta0.norm()));
  CHECK_THROWS_AS(best_competitor({}), DimensionMismatch);
}

TEST_CASE("best competitor on a rank-deficient design is the minimum-norm solution") {
  testing::Rng rng(3);
  // Two identical columns: only their sum is identified.
  std::vector<StepRecord> stream;
  for (int t = 0; t < 20; ++t) {
    Matrix x(2, 3);
    x.col(0) = rng.vector(2);
    x.col(1) = x.col(0);
    x.col(2) = rng.vector(2);
    stream.push_back(record(x, rng.vector(2), Vector::Zero(2)));
  }
  const Vector theta = best_competitor(stream);
  CHECK(std::abs(theta[0] - theta[1]) <= 1e-9 * (1.0 + theta.norm()));
  // Normal-equation residual.
  Matrix normal = Matrix::Zero(3, 3);
  Vector rhs = Vector::Zero(3);
  for (const auto& s : stream) {
    normal += s.features.transpose() * s.features;
    rhs += s.features.transpose() * s.response;
  }
  CHECK((normal * theta - rhs).norm() <= 1e-8 * (1.0 + rhs.norm()));
}

TEST_CASE("best competitor is a local and sampled global optimum") {
  testing::Rng rng(4);
  const auto stream = run_forward(rng, RegularizationSchedule::scaled_identity(4, 1.0), 60, 3);
  const Vector best = best_competitor(stream);
  const double base = competitor_loss(stream, best);
  for (int k = 0; k < 100; ++k) {
    CHECK(competitor_loss(stream, best + 1e-3 * rng.vector(4)) >= base - 1e-9 * base);
  }
  const double best_regret = regret(stream, best).regret;
  for (int k = 0; k < 100; ++k) CHECK(best_regret >= regret(stream, 2.0 * rng.vector(4)).regret - 1e-9);
}

TEST_CASE("log-det bound hand values") {
  const auto schedule = RegularizationSchedule::scaled_identity(1, 1.0);
  const Vector theta = Vector::Constant(1, 2.0);
  CHECK(log_det_regret_bound(schedule, {}, theta) == doctest::Approx(4.0));
  std::vector<StepRecord> one{record(Matrix::Ones(1, 1), Vector::Ones(1), Vector::Zero(1))};
  CHECK(log_det_regret_bound(schedule, one, Vector::Zero(1)) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(log_det_regret_bound(schedule, one, Vector::Zero(2)), DimensionMismatch);
}

TEST_CASE("ridge bound hand values") {
  CHECK(ridge_regret_bound(2.0, {}, (Vector(2) << 1, 1).finished()) == doctest::Approx(4.0));
  std::vector<StepRecord> one{record(Matrix::Ones(1, 1), Vector::Ones(1), Vector::Zero(1))};
  CHECK(ridge_regret_bound(1.0, one, Vector::Zero(1)) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("ridge bound dominates the log-det bound and both dominate regret") {
  testing::Rng rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    const Index d = rng.integer(1, 6);
    const double lambda = rng.uniform(0.05, 5.0);
    const auto schedule = RegularizationSchedule::scaled_identity(d, lambda);
    const auto stream = run_forward(rng, schedule, rng.integer(1, 120), 4, rng.uniform(0.1, 10.0));
    std::vector<Vector> competitors{Vector::Zero(d), best_competitor(stream)};
    for (int k = 0; k < 5; ++k) competitors.push_back(rng.vector(d));
    for (const Vector& theta : competitors) {
      const double ld = log_det_regret_bound(schedule, stream, theta);
      const double ridge = ridge_regret_bound(lambda, stream, theta);
      const double r = regret(stream, theta).regret;
      CHECK(ridge >= ld - 1e-9);
      CHECK(r <= ld + 1e-6);
      CHECK(r <= ridge + 1e-6);
    }
  }
}

TEST_CASE("log-det bound holds for time-varying schedules") {
  testing::Rng rng(6);
  const Index d = 4;
  std::vector<Matrix> seq{rng.spd(d, 0.3)};
  for (int i = 0; i < 80; ++i) {
    const Matrix v = rng.matrix(1, d);
    seq.push_back(seq.back() + 0.05 * v.transpose() * v);
  }
  const auto schedule = RegularizationSchedule::explicit_sequence(seq);
  const auto stream = run_forward(rng, schedule, 80, 3);
  for (int k = 0; k < 10; ++k) {
    const Vector theta = k == 0 ? best_competitor(stream) : rng.vector(d);
    CHECK(regret(stream, theta).regret <= log_det_regret_bound(schedule, stream, theta) + 1e-6);
  }
}

TEST_CASE("hierarchical bounds") {
  const Matrix s = build_summing_matrix(two_level_tree()).s;
  const Vector gram_eigs = symmetric_eigenvalues(s.transpose() * s);
  CHECK(gram_eigs[gram_eigs.size() - 1] == doctest::Approx(1.0).epsilon(1e-12));

  testing::Rng rng(7);
  const Matrix theta = rng.matrix(5, 3);
  OhfStreamSummary empty;
  CHECK(ohf_ridge_bound(2.0, empty, theta) == doctest::Approx(2.0 * theta.squaredNorm()));

  for (int rep = 0; rep < 20; ++rep) {
    OhfStreamSummary summary;
    summary.steps = static_cast<std::size_t>(rng.integer(1, 500));
    summary.max_feature_norm = rng.uniform(0.1, 5.0);
    summary.max_summing_norm = s.norm();
    summary.max_response_norm = rng.uniform(0.1, 5.0);
    const double lambda = rng.uniform(0.01, 10.0);
    const Matrix th = rng.matrix(5, 3);
    // Each term of the standard bound is at most the matching projected term
    // because the smallest eigenvalue of S^T S is 1 here.
    const double y2 = summary.max_response_norm * summary.max_response_norm;
    const double standard_log =
        ohf_ridge_bound(lambda, summary, th) - lambda * th.squaredNorm();
    const double projected_log =
        ohf_projected_bound(lambda, summary, s, th) - lambda * (s * th).squaredNorm();
    CHECK(lambda * th.squaredNorm() <= lambda * (s * th).squaredNorm() + 1e-12);
    CHECK(standard_log <= projected_log + 1e-9 * y2);
  }
  Matrix dup(3, 2);
  dup << 1, 1, 1, 1, 0, 0;
  CHECK_THROWS_AS(ohf_projected_bound(1.0, empty, dup, Matrix::Ones(2, 1)), RankDeficient);
}

TEST_CASE("hierarchical bounds dominate realized regret") {
  const Matrix s = build_summing_matrix(two_level_tree()).s;
  testing::Rng rng(8);
  for (double lambda : {0.1, 1.0, 10.0}) {
    const Index m = 3;
    auto standard = make_vectorized_ohf(
        std::make_unique<MultiVaw>(RegularizationSchedule::scaled_identity(5 * m, lambda)), 5, m);
    auto projected = make_metavaw_ohf(s, lambda, m);
    std::vector<StepRecord> a, b;
    OhfStreamSummary summary;
    for (int t = 0; t < 100; ++t) {
      const Vector x = rng.vector(m);
      const Vector y = 3.0 * rng.vector(8);
      const Matrix xt = ohf_feature_matrix(s, x);
      a.push_back(record(xt, y, standard->predict(s, x)));
      b.push_back(record(xt, y, projected->predict(s, x)));
      standard->observe(y);
      projected->observe(y);
      summary.steps += 1;
      summary.max_feature_norm = std::max(summary.max_feature_norm, x.norm());
      summary.max_summing_norm = s.norm();
      summary.max_response_norm = std::max(summary.max_response_norm, y.norm());
    }
    for (int k = 0; k < 5; ++k) {
      const Vector theta = k == 0 ? best_competitor(a) : rng.vector(5 * m);
      const Matrix th = unvec(theta, 5, m);
      CHECK(regret(a, theta).regret <= ohf_ridge_bound(lambda, summary, th) + 1e-6);
      CHECK(regret(b, theta).regret <= ohf_projected_bound(lambda, summary, s, th) + 1e-6);
    }
  }
}
