#include "multivaw/audit.hpp"

#include <algorithm>

#include "multivaw/kronecker_vaw.hpp"
#include "multivaw/metavaw.hpp"
#include "multivaw/multivaw.hpp"
#include "multivaw/ohf.hpp"

namespace multivaw {

double woodbury_path_audit(const RegularizationSchedule& schedule, std::span<const RegressionStep> stream) {
  MultiVaw woodbury(schedule, SolvePath::woodbury);
  MultiVaw factorize(schedule, SolvePath::factorize);
  double worst = 0.0;
  for (const auto& step : stream) {
    woodbury.predict(step.features);
    factorize.predict(step.features);
    const Vector& reference = factorize.parameter();
    worst = std::max(worst, (woodbury.parameter() - reference).norm() / (1.0 + reference.norm()));
    woodbury.observe(step.response);
    factorize.observe(step.response);
  }
  return worst;
}

double kronecker_path_audit(const Matrix& v, const Matrix& small, std::span<const OhfStep> stream) {
  KroneckerMultiVaw structured(v, small);
  MultiVaw vectorized(structured.equivalent_schedule(), SolvePath::factorize);
  double worst = 0.0;
  for (const auto& step : stream) {
    const Vector a = structured.predict(step.x);
    const Vector b = vectorized.predict(ohf_feature_matrix(v, step.x));
    worst = std::max(worst, (a - b).norm());
    structured.observe(step.y);
    vectorized.observe(step.y);
  }
  return worst;
}

double metavaw_equivalence_audit(const Matrix& s, double lambda, std::span<const OhfStep> stream) {
  if (stream.empty()) return 0.0;
  const Index m = stream.front().x.size();
  MetaVaw meta(s, lambda, m);
  MultiVaw multi(RegularizationSchedule::kronecker(lambda * Matrix::Identity(m, m), s.transpose() * s),
                 SolvePath::factorize);
  double worst = 0.0;
  for (const auto& step : stream) {
    const Vector a = meta.predict(step.x);
    const Vector b = multi.predict(ohf_feature_matrix(s, step.x));
    worst = std::max(worst, (a - b).norm());
    meta.observe(step.y);
    multi.observe(step.y);
  }
  return worst;
}

}  // namespace multivaw
