#include <vector>

#include "doctest.h"
#include "multivaw/audit.hpp"
#include "multivaw/hierarchy.hpp"
#include "multivaw/metavaw.hpp"
#include "multivaw/multivaw.hpp"
#include "multivaw/ohf.hpp"
#include "multivaw/vaw.hpp"
#include "support.hpp"

using namespace multivaw;

namespace {

Matrix two_level_tree_matrix() {
  Matrix s(8, 5);
  s << 1, 1, 1, 1, 1,
       1, 1, 1, 0, 0,
       0, 0, 0, 1, 1,
       1, 0, 0, 0, 0,
       0, 1, 0, 0, 0,
       0, 0, 1, 0, 0,
       0, 0, 0, 1, 0,
       0, 0, 0, 0, 1;
  return s;
}

std::vector<OhfStep> random_ohf_stream(testing::Rng& rng, Index n, Index m, int steps) {
  std::vector<OhfStep> out;
  for (int t = 0; t < steps; ++t) out.push_back({rng.vector(m), rng.vector(n)});
  return out;
}

}  // namespace

TEST_CASE("summing matrix of the two-level tree") {
  const SummingMatrix sm = build_summing_matrix(two_level_tree());
  CHECK(sm.s == two_level_tree_matrix());
  CHECK(sm.node_ids == std::vector<std::string>{"1", "2", "3", "4", "5", "6", "7", "8"});
  CHECK(sm.bottom_ids == std::vector<std::string>{"4", "5", "6", "7", "8"});
  CHECK(sm.row_of("3") == 2);
  CHECK(sm.row_of("nope") == -1);
}

TEST_CASE("summing matrix small cases") {
  const auto single = build_summing_matrix(HierarchySpec::from_edges({"a"}, {}));
  CHECK(single.s == Matrix::Ones(1, 1));

  const auto star = build_summing_matrix(HierarchySpec::from_edges({"r", "x", "y", "z"}, {{"r", "x"}, {"r", "y"}, {"r", "z"}}));
  Matrix expected(4, 3);
  expected << Matrix::Ones(1, 3), Matrix::Identity(3, 3);
  CHECK(star.s == expected);
}

TEST_CASE("aggregated rows are ordered breadth first whatever the declaration order") {
  // Same tree as above with nodes declared leaves-first.
  const auto spec = HierarchySpec::from_edges({"8", "7", "6", "5", "4", "3", "2", "1"},
                                              {{"1", "2"}, {"1", "3"}, {"2", "4"}, {"2", "5"}, {"2", "6"},
                                               {"3", "7"}, {"3", "8"}});
  const auto sm = build_summing_matrix(spec);
  CHECK(sm.node_ids == std::vector<std::string>{"1", "2", "3", "8", "7", "6", "5", "4"});
  CHECK(sm.s.bottomRows(5) == Matrix::Identity(5, 5));
  CHECK(is_positive_definite(sm.s.transpose() * sm.s));
}

TEST_CASE("hierarchy validation errors") {
  CHECK_THROWS_AS(HierarchySpec::from_edges({"a", "a"}, {}), DuplicateNode);
  CHECK_THROWS_AS(HierarchySpec::from_edges({"a", "b"}, {{"a", "b"}, {"b", "a"}}), CyclicHierarchy);
  CHECK_THROWS_AS(HierarchySpec::from_edges({"a"}, {{"a", "a"}}), CyclicHierarchy);
  CHECK_THROWS_AS(HierarchySpec::from_edges({"a", "b", "c"}, {{"a", "c"}, {"b", "c"}}), HierarchyError);
  CHECK_THROWS_AS(HierarchySpec::from_edges({"a"}, {{"a", "zz"}}), HierarchyError);
  CHECK_THROWS_AS(parse_hierarchy_json("{\"nodes\": 3}"), HierarchyError);
  CHECK_THROWS_AS(parse_hierarchy_json("not json"), HierarchyError);
}

TEST_CASE("hierarchy JSON round trip") {
  const auto spec = two_level_tree();
  const auto again = parse_hierarchy_json(hierarchy_to_json(spec));
  CHECK(again.nodes == spec.nodes);
  CHECK(again.bottom == spec.bottom);
  CHECK(build_summing_matrix(again).s == build_summing_matrix(spec).s);
}

TEST_CASE("explicit summing matrices must be injective") {
  Matrix dup(3, 2);
  dup << 1, 1, 1, 1, 1, 1;
  CHECK_THROWS_AS(summing_matrix_from(dup), RankDeficient);
  const auto ok = summing_matrix_from(two_level_tree_matrix());
  CHECK(ok.n() == 8);
  CHECK(ok.d() == 5);
}

TEST_CASE("coherence check") {
  const Matrix s = two_level_tree_matrix();
  testing::Rng rng(1);
  const auto coherent = coherence_check(s, s * rng.vector(5));
  CHECK(coherent.coherent);
  CHECK(coherent.residual <= 1e-10);

  Vector root_only = Vector::Zero(8);
  root_only[0] = 1.0;
  const auto bad = coherence_check(s, root_only);
  CHECK_FALSE(bad.coherent);
  CHECK(bad.residual > 0.1);

  CHECK(coherence_check(s, Vector::Zero(8)).coherent);
  CHECK_THROWS_AS(coherence_check(s, Vector::Zero(7)), DimensionMismatch);
  CHECK(coherence_check(s, root_only, 10.0).coherent);
}

TEST_CASE("projection reproduces S on the two-level tree") {
  const Matrix s = two_level_tree_matrix();
  const Matrix p = projection_onto_image(s);
  CHECK((p * s - s).norm() <= 1e-10);
}

TEST_CASE("hierarchical feature matrix and the vec trick") {
  CHECK(ohf_feature_matrix(Matrix::Identity(2, 2), Vector::Ones(1)) == Matrix::Identity(2, 2));

  const Matrix x = ohf_feature_matrix(Matrix::Ones(2, 1), (Vector(2) << 1, 2).finished());
  Matrix expected(2, 2);
  expected << 1, 2, 1, 2;
  CHECK(x == expected);
  Matrix theta(1, 2);
  theta << 3, 4;
  CHECK(x * vec(theta) == (Vector(2) << 11, 11).finished());
  CHECK(Matrix::Ones(2, 1) * theta * (Vector(2) << 1, 2).finished() == (Vector(2) << 11, 11).finished());

  testing::Rng rng(2);
  for (int rep = 0; rep < 100; ++rep) {
    const Matrix s = rng.matrix(4, 2);
    const Vector w = rng.vector(3);
    const Matrix th = rng.matrix(2, 3);
    const Vector lhs = ohf_feature_matrix(s, w) * vec(th);
    const Vector rhs = s * th * w;
    CHECK((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
  }
}

TEST_CASE("projected per-node learner: hand value") {
  MetaVaw meta(Matrix::Ones(1, 1), 1.0, 1);
  CHECK(meta.predict(Vector::Ones(1))[0] == 0.0);
  meta.observe(Vector::Ones(1));
  CHECK(meta.predict(Vector::Ones(1))[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(MetaVaw(Matrix::Ones(3, 2), 1.0, 2), RankDeficient);
}

TEST_CASE("projected per-node learner state and coherence") {
  const Matrix s = two_level_tree_matrix();
  testing::Rng rng(3);
  MetaVaw meta(s, 0.5, 4);
  const Matrix p = projection_onto_image(s);
  Matrix gram = 0.5 * Matrix::Identity(4, 4);
  Matrix acc = Matrix::Zero(8, 4);
  for (int t = 0; t < 40; ++t) {
    const Vector x = rng.vector(4);
    const Vector y = rng.vector(8);  // deliberately incoherent
    gram += x * x.transpose();
    const Vector pred = meta.predict(x);
    CHECK((pred - p * pred).norm() <= 1e-10 * (1.0 + pred.norm()));
    CHECK((meta.gram_inverse() * gram - Matrix::Identity(4, 4)).norm() <= 1e-8);
    const Vector expected = p * acc * testing::lu_solve(gram, x);
    CHECK((pred - expected).norm() <= 1e-9 * (1.0 + expected.norm()));
    meta.observe(y);
    acc += y * x.transpose();
    CHECK((meta.response_accumulator() - acc).norm() <= 1e-12 * (1.0 + acc.norm()));
  }
  CHECK((meta.projection() * meta.projection() - meta.projection()).norm() <= 1e-10);
}

TEST_CASE("projected learner with identity S reduces to per-node univariate learners") {
  testing::Rng rng(4);
  MetaVaw meta(Matrix::Identity(3, 3), 2.0, 2);
  std::vector<Vaw> nodes(3, Vaw(2, 2.0));
  for (int t = 0; t < 30; ++t) {
    const Vector x = rng.vector(2);
    const Vector y = rng.vector(3);
    const Vector pred = meta.predict(x);
    for (Index i = 0; i < 3; ++i) {
      CHECK(std::abs(pred[i] - nodes[static_cast<std::size_t>(i)].predict(x)) <= 1e-12);
      nodes[static_cast<std::size_t>(i)].observe(y[i]);
    }
    meta.observe(y);
  }
}

TEST_CASE("equivalence audits on the two-level tree") {
  const Matrix s = two_level_tree_matrix();
  testing::Rng rng(5);
  CHECK(metavaw_equivalence_audit(s, 1.0, {}) == 0.0);
  const std::vector<OhfStep> one = random_ohf_stream(rng, 8, 3, 1);
  CHECK(metavaw_equivalence_audit(s, 1.0, one) == 0.0);
  for (double lambda : {0.1, 1.0, 10.0}) {
    const auto stream = random_ohf_stream(rng, 8, 4, 60);
    double y_max = 0.0;
    for (const auto& step : stream) y_max = std::max(y_max, step.y.norm());
    CHECK(metavaw_equivalence_audit(s, lambda, stream) <= 1e-7 * (1.0 + y_max));
    CHECK(kronecker_path_audit(s, lambda * Matrix::Identity(4, 4), stream) <= 1e-8 * (1.0 + y_max));
  }
}

TEST_CASE("audits detect a mismatched pairing") {
  // The projected learner is equivalent only under lambda I (x) S^T S; the
  // audit must see a difference against a different lambda.
  const Matrix s = two_level_tree_matrix();
  testing::Rng rng(6);
  const auto stream = random_ohf_stream(rng, 8, 3, 20);
  MetaVaw meta(s, 1.0, 3);
  auto vectorized = make_vectorized_ohf(
      std::make_unique<MultiVaw>(RegularizationSchedule::scaled_identity(15, 1.0), SolvePath::factorize), 5, 3);
  double worst = 0.0;
  for (const auto& step : stream) {
    worst = std::max(worst, (meta.predict(step.x) - vectorized->predict(s, step.x)).norm());
    meta.observe(step.y);
    vectorized->observe(step.y);
  }
  CHECK(worst > 1e-3);
}

TEST_CASE("woodbury audit on a random constant schedule") {
  testing::Rng rng(7);
  std::vector<RegressionStep> stream;
  for (int t = 0; t < 80; ++t) stream.push_back({rng.matrix(3, 6), rng.vector(3)});
  CHECK(woodbury_path_audit(RegularizationSchedule::constant(rng.spd(6)), stream) <= 1e-8);
  CHECK(woodbury_path_audit(RegularizationSchedule::scaled_identity(6, 1.0), {}) == 0.0);
}

TEST_CASE("hierarchical forecasters") {
  const Matrix s = two_level_tree_matrix();
  testing::Rng rng(8);
  auto kron = make_kronecker_ohf(s, 1.0, 3);
  auto meta = make_metavaw_ohf(s, 1.0, 3);
  auto vectorized = make_vectorized_ohf(
      std::make_unique<MultiVaw>(RegularizationSchedule::kronecker(Matrix::Identity(3, 3), s.transpose() * s)), 5, 3);
  CHECK_FALSE(kron->supports_time_varying());
  CHECK_FALSE(meta->supports_time_varying());
  CHECK(vectorized->supports_time_varying());
  for (int t = 0; t < 25; ++t) {
    const Vector x = rng.vector(3);
    const Vector y = rng.vector(8);
    const Vector a = kron->predict(s, x);
    const Vector b = meta->predict(s, x);
    const Vector c = vectorized->predict(s, x);
    CHECK((a - c).norm() <= 1e-8 * (1.0 + y.norm()));
    CHECK((b - c).norm() <= 1e-7 * (1.0 + y.norm()));
    CHECK((kron->parameter() - vectorized->parameter()).norm() <= 1e-8 * (1.0 + c.norm()));
    CHECK((meta->parameter() - vectorized->parameter()).norm() <= 1e-7 * (1.0 + c.norm()));
    kron->observe(y);
    meta->observe(y);
    vectorized->observe(y);
  }
  // Fixed-S forecasters refuse a different summing matrix.
  CHECK_THROWS_AS(meta->predict(s.topRows(4), rng.vector(3)), ConfigError);
  CHECK_THROWS_AS(kron->predict(s.topRows(4), rng.vector(3)), ConfigError);
  // The vectorized one accepts any S_t with d columns.
  CHECK(vectorized->predict(s.topRows(4), rng.vector(3)).size() == 4);
}
