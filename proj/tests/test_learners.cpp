#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "multivaw/baselines.hpp"
#include "multivaw/kronecker_vaw.hpp"
#include "multivaw/multivaw.hpp"
#include "multivaw/vaw.hpp"
#include "support.hpp"

using namespace multivaw;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }
Vector scalar_vec(double v) { return Vector::Constant(1, v); }

std::vector<RegularizationSchedule> schedules_of_every_kind(testing::Rng& rng, Index d) {
  std::vector<RegularizationSchedule> out;
  out.push_back(RegularizationSchedule::scaled_identity(d, rng.uniform(0.1, 3.0)));
  out.push_back(RegularizationSchedule::constant(rng.spd(d, 0.5)));
  if (d % 2 == 0) {
    out.push_back(RegularizationSchedule::kronecker(rng.spd(2, 0.5), rng.spd(d / 2, 0.5)));
  }
  std::vector<Matrix> seq{rng.spd(d, 0.2)};
  for (int i = 0; i < 20; ++i) {
    const Matrix step = rng.matrix(1, d);
    seq.push_back(seq.back() + 0.1 * step.transpose() * step);
  }
  out.push_back(RegularizationSchedule::explicit_sequence(std::move(seq)));
  return out;
}

}  // namespace

TEST_CASE("forward learner hand values in one dimension") {
  MultiVaw learner(RegularizationSchedule::scaled_identity(1, 1.0));
  CHECK(learner.predict(scalar(1.0))[0] == 0.0);
  CHECK(learner.state().a(0, 0) == 2.0);
  learner.observe(scalar_vec(1.0));
  CHECK(learner.state().b[0] == 1.0);
  CHECK(learner.predict(scalar(1.0))[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(learner.parameter()[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(learner.state().a(0, 0) == 3.0);
}

TEST_CASE("response step adds X^T y") {
  testing::Rng rng(1);
  MultiVaw learner(RegularizationSchedule::scaled_identity(4, 1.0));
  for (int t = 0; t < 5; ++t) {
    const Matrix x = rng.matrix(3, 4);
    const Vector y = rng.vector(3);
    const Vector before = learner.state().b;
    learner.predict(x);
    learner.observe(y);
    Vector expected = before;
    for (Index j = 0; j < 4; ++j)
      for (Index i = 0; i < 3; ++i) expected[j] += x(i, j) * y[i];
    CHECK((learner.state().b - expected).norm() <= 1e-12 * (1.0 + expected.norm()));
  }
  const Vector before = learner.state().b;
  learner.predict(Matrix::Zero(2, 4));
  learner.observe(rng.vector(2));
  CHECK(learner.state().b == before);
}

TEST_CASE("forward learner matches its defining equations for every schedule kind") {
  testing::Rng rng(2);
  for (int rep = 0; rep < 10; ++rep) {
    const Index d = 2 * rng.integer(1, 4);
    for (const auto& schedule : schedules_of_every_kind(rng, d)) {
      for (SolvePath path : {SolvePath::automatic, SolvePath::factorize}) {
        MultiVaw learner(schedule, path);
        testing::ReferenceForward ref(d);
        for (std::size_t t = 1; t <= 30; ++t) {
          const Matrix x = rng.matrix(rng.integer(1, 4), d);
          const Vector y = rng.vector(x.rows());
          const Vector expected = ref.theta(x, schedule.at(t));
          const Vector pred = learner.predict(x);
          CHECK((learner.parameter() - expected).norm() <= 1e-8 * (1.0 + expected.norm()));
          CHECK((pred - x * expected).norm() <= 1e-8 * (1.0 + (x * expected).norm()));
          learner.observe(y);
          ref.add(x, y);
        }
      }
    }
  }
}

TEST_CASE("state tracks Lambda_t plus the gram sum, and A_inv stays an inverse") {
  testing::Rng rng(3);
  const Index d = 5;
  MultiVaw learner(RegularizationSchedule::scaled_identity(d, 0.7));
  CHECK(learner.uses_woodbury());
  Matrix gram = Matrix::Zero(d, d);
  for (int t = 0; t < 40; ++t) {
    const Matrix x = rng.matrix(2, d);
    learner.predict(x);
    learner.observe(rng.vector(2));
    gram += x.transpose() * x;
  }
  const Matrix expected = 0.7 * Matrix::Identity(d, d) + gram;
  CHECK(testing::rel_diff(learner.state().a, expected) <= 1e-9);
  CHECK((learner.state().a * *learner.state().a_inv - Matrix::Identity(d, d)).norm() <= 1e-8);
  CHECK(learner.state().t == 40);
}

TEST_CASE("woodbury path and fresh factorization agree") {
  testing::Rng rng(4);
  const auto schedule = RegularizationSchedule::scaled_identity(6, 0.5);
  MultiVaw fast(schedule, SolvePath::woodbury);
  MultiVaw slow(schedule, SolvePath::factorize);
  CHECK(fast.uses_woodbury());
  CHECK_FALSE(slow.uses_woodbury());
  for (int t = 0; t < 50; ++t) {
    const Matrix x = rng.matrix(3, 6);
    const Vector y = rng.vector(3);
    fast.predict(x);
    slow.predict(x);
    CHECK((fast.parameter() - slow.parameter()).norm() <= 1e-8 * (1.0 + slow.parameter().norm()));
    fast.observe(y);
    slow.observe(y);
  }
}

TEST_CASE("woodbury path survives the periodic refresh") {
  testing::Rng rng(5);
  const auto schedule = RegularizationSchedule::scaled_identity(3, 1.0);
  MultiVaw fast(schedule, SolvePath::woodbury);
  MultiVaw slow(schedule, SolvePath::factorize);
  double worst = 0.0;
  for (std::uint64_t t = 0; t < MultiVaw::kRefreshInterval + 40; ++t) {
    const Matrix x = rng.matrix(1, 3);
    const Vector y = rng.vector(1);
    fast.predict(x);
    slow.predict(x);
    worst = std::max(worst, (fast.parameter() - slow.parameter()).norm() / (1.0 + slow.parameter().norm()));
    fast.observe(y);
    slow.observe(y);
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("schedules must be nondecreasing and positive definite") {
  const Matrix i2 = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(RegularizationSchedule::explicit_sequence({2.0 * i2, i2}), ScheduleViolation);
  CHECK_THROWS_AS(RegularizationSchedule::scaled_identity(2, 0.0), NotPositiveDefinite);
  CHECK_THROWS_AS(RegularizationSchedule::constant(-i2), NotPositiveDefinite);
  CHECK_NOTHROW(RegularizationSchedule::explicit_sequence({i2, i2 + 1e-12 * i2, i2}));

  MultiVaw learner(RegularizationSchedule::scaled_identity(2, 1.0));
  CHECK_THROWS_AS(learner.predict(Matrix::Ones(1, 2), 0.5 * i2), ScheduleViolation);
  // The failed call must not leave the learner half-stepped.
  CHECK_NOTHROW(learner.predict(Matrix::Ones(1, 2), 2.0 * i2));
}

TEST_CASE("explicit schedule holds its last matrix") {
  const Matrix i2 = Matrix::Identity(2, 2);
  const auto s = RegularizationSchedule::explicit_sequence({i2, 2.0 * i2});
  CHECK(s.at(0) == i2);
  CHECK(s.at(1) == i2);
  CHECK(s.at(2) == 2.0 * i2);
  CHECK(s.at(50) == 2.0 * i2);
  CHECK_FALSE(s.is_constant());
  CHECK(RegularizationSchedule::scaled_identity(3, 2.0).scalar_lambda() == 2.0);
}

TEST_CASE("protocol violations") {
  MultiVaw learner(RegularizationSchedule::scaled_identity(2, 1.0));
  CHECK_THROWS_AS(learner.observe(scalar_vec(1.0)), ProtocolViolation);
  learner.predict(Matrix::Ones(1, 2));
  CHECK_THROWS_AS(learner.predict(Matrix::Ones(1, 2)), ProtocolViolation);
  CHECK_THROWS_AS(learner.observe(Vector::Ones(2)), DimensionMismatch);
  learner.observe(scalar_vec(1.0));
  CHECK_THROWS_AS(learner.predict(Matrix::Ones(1, 3)), DimensionMismatch);
  Matrix bad = Matrix::Ones(1, 2);
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(learner.predict(bad), DimensionMismatch);
}

TEST_CASE("empty step only advances the regularization") {
  const Matrix i2 = Matrix::Identity(2, 2);
  MultiVaw learner(RegularizationSchedule::explicit_sequence({i2, 3.0 * i2}));
  learner.predict(Matrix::Ones(1, 2));
  learner.observe(scalar_vec(2.0));
  const Vector b = learner.state().b;
  const Vector pred = learner.predict(Matrix::Zero(0, 2));
  CHECK(pred.size() == 0);
  learner.observe(Vector(0));
  CHECK(learner.state().b == b);
  CHECK(testing::rel_diff(learner.state().a, 3.0 * i2 + Matrix::Ones(2, 2)) <= 1e-15);
}

TEST_CASE("prediction is linear in the feature rows") {
  testing::Rng rng(6);
  MultiVaw base(RegularizationSchedule::scaled_identity(4, 1.0));
  for (int t = 0; t < 10; ++t) {
    base.predict(rng.matrix(2, 4));
    base.observe(rng.vector(2));
  }
  const Matrix x1 = rng.matrix(2, 4), x2 = rng.matrix(3, 4);
  Matrix stacked(5, 4);
  stacked << x1, x2;
  // The parameter depends on the features through A_t, so linearity is a
  // statement about a fixed theta: apply the stacked theta to each block.
  MultiVaw copy = base;
  const Vector joint = copy.predict(stacked);
  const Vector& theta = copy.parameter();
  CHECK((joint.head(2) - x1 * theta).norm() <= 1e-12);
  CHECK((joint.tail(3) - x2 * theta).norm() <= 1e-12);
}

TEST_CASE("run_step reports the squared loss") {
  MultiVaw learner(RegularizationSchedule::scaled_identity(1, 1.0));
  run_step(learner, scalar(1.0), scalar_vec(1.0));
  const StepOutcome out = run_step(learner, scalar(1.0), scalar_vec(2.0));
  CHECK(out.t == 2);
  CHECK(out.loss == doctest::Approx((2.0 - 1.0 / 3.0) * (2.0 - 1.0 / 3.0)).epsilon(1e-12));
  CHECK(out.theta_norm == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("checkpoint round trip resumes the same run") {
  testing::Rng rng(7);
  const auto schedule = RegularizationSchedule::scaled_identity(3, 0.5);
  MultiVaw original(schedule);
  for (int t = 0; t < 15; ++t) {
    original.predict(rng.matrix(2, 3));
    original.observe(rng.vector(2));
  }
  std::stringstream buffer;
  original.save_checkpoint(buffer);
  MultiVaw resumed = MultiVaw::load_checkpoint(buffer, schedule);
  CHECK(resumed.state().t == original.state().t);
  CHECK(resumed.state().a == original.state().a);
  CHECK(resumed.state().b == original.state().b);
  for (int t = 0; t < 10; ++t) {
    const Matrix x = rng.matrix(2, 3);
    const Vector y = rng.vector(2);
    CHECK((resumed.predict(x) - original.predict(x)).norm() <= 1e-12);
    resumed.observe(y);
    original.observe(y);
  }
  std::stringstream garbage("not a checkpoint");
  CHECK_THROWS_AS(MultiVaw::load_checkpoint(garbage, schedule), DataError);
  std::stringstream again;
  original.save_checkpoint(again);
  CHECK_THROWS_AS(MultiVaw::load_checkpoint(again, RegularizationSchedule::scaled_identity(4, 0.5)),
                  DimensionMismatch);
}

TEST_CASE("structured closed form: hand example") {
  KroneckerMultiVaw learner(Matrix::Identity(2, 2), Matrix::Identity(1, 1));
  CHECK(learner.predict(Vector::Ones(1)).isZero());
  learner.observe((Vector(2) << 2, 4).finished());
  const Vector pred = learner.predict(Vector::Ones(1));
  CHECK(pred[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(pred[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(KroneckerMultiVaw(Matrix::Ones(3, 2), Matrix::Identity(1, 1)), RankDeficient);
}

TEST_CASE("structured closed form matches the vectorized learner") {
  testing::Rng rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    const Index n = rng.integer(1, 8), d = rng.integer(1, std::min<int>(5, static_cast<int>(n)));
    const Index m = rng.integer(1, 4);
    const Matrix v = rng.matrix(n, d);
    const Matrix small = rng.spd(m, 0.5);
    KroneckerMultiVaw closed(v, small);
    MultiVaw vectorized(closed.equivalent_schedule(), SolvePath::factorize);
    for (int t = 0; t < 30; ++t) {
      const Vector w = rng.vector(m);
      const Vector y = rng.vector(n);
      const Vector a = closed.predict(w);
      const Vector b = vectorized.predict(kronecker(w.transpose(), v));
      CHECK((a - b).norm() <= 1e-8 * (1.0 + y.norm()));
      CHECK((vec(closed.coefficients()) - vectorized.parameter()).norm() <=
            1e-8 * (1.0 + vectorized.parameter().norm()));
      closed.observe(y);
      vectorized.observe(y);
    }
  }
}

TEST_CASE("univariate forward learner") {
  Vaw vaw(1, 1.0);
  CHECK(vaw.predict(scalar_vec(1.0)) == 0.0);
  vaw.observe(1.0);
  CHECK(vaw.predict(scalar_vec(1.0)) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  testing::Rng rng(9);
  for (int rep = 0; rep < 10; ++rep) {
    const double lambda = rng.uniform(0.1, 5.0);
    Vaw uni(5, lambda);
    MultiVaw multi(RegularizationSchedule::scaled_identity(5, lambda));
    for (int t = 0; t < 100; ++t) {
      const Vector x = rng.vector(5);
      const double y = rng.normal();
      const double a = uni.predict(x);
      const double b = multi.predict(x.transpose())[0];
      CHECK(std::abs(a - b) <= 1e-10);
      uni.observe(y);
      multi.observe(scalar_vec(y));
    }
  }
  CHECK_THROWS_AS(Vaw(2, 1.0).predict(Vector::Ones(3)), DimensionMismatch);
}

TEST_CASE("follow the regularized leader") {
  Ftrl ftrl(1, 1.0);
  CHECK(ftrl.predict(scalar(1.0))[0] == 0.0);
  ftrl.observe(scalar_vec(1.0));
  CHECK(ftrl.predict(scalar(1.0))[0] == doctest::Approx(0.5).epsilon(1e-15));

  // Structural oracle: theta_t = (lambda I + sum_{s<t} X^T X)^{-1} b_{t-1}.
  testing::Rng rng(10);
  Ftrl learner(4, 0.8);
  testing::ReferenceForward ref(4);
  for (int t = 0; t < 60; ++t) {
    const Matrix x = rng.matrix(2, 4);
    const Vector y = rng.vector(2);
    learner.predict(x);
    const Vector expected = ref.theta(Matrix::Zero(1, 4), 0.8 * Matrix::Identity(4, 4));
    CHECK((learner.parameter() - expected).norm() <= 1e-9 * (1.0 + expected.norm()));
    learner.observe(y);
    ref.add(x, y);
  }
}

TEST_CASE("first step of every learner predicts zero") {
  testing::Rng rng(11);
  const Matrix x = rng.matrix(2, 3);
  MultiVaw mv(RegularizationSchedule::scaled_identity(3, 1.0));
  Ftrl ftrl(3, 1.0);
  Ogd ogd(3, 0.1);
  CHECK(mv.predict(x).isZero());
  CHECK(ftrl.predict(x).isZero());
  CHECK(ogd.predict(x).isZero());
}

TEST_CASE("projected online gradient descent") {
  Ogd ogd(1, 0.1, 10.0);
  CHECK(ogd.predict(scalar(1.0))[0] == 0.0);
  ogd.observe(scalar_vec(1.0));
  CHECK(ogd.parameter()[0] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(ogd.predict(scalar(1.0))[0] == doctest::Approx(0.2).epsilon(1e-15));

  Ogd clipped(1, 1.0, 1.0);
  clipped.predict(scalar(1.0));
  clipped.observe(scalar_vec(100.0));
  CHECK(clipped.parameter()[0] == 1.0);

  CHECK(Ogd::default_step(10.0) == doctest::Approx(1e-10));
  CHECK(Ogd(2, 0.1).bound() == Ogd::kDefaultBound);
  CHECK_THROWS_AS(Ogd(2, -1.0), ConfigError);
}
