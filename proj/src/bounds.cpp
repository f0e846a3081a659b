#include "multivaw/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace multivaw {

namespace {

double max_response_norm(std::span<const StepRecord> stream) {
  double out = 0.0;
  for (const auto& step : stream) out = std::max(out, step.response.norm());
  return out;
}

double log_ratio_sum(const Vector& top, const Vector& bottom) {
  double acc = 0.0;
  for (Index i = 0; i < top.size(); ++i) acc += std::log(top[i] / bottom[i]);
  return acc;
}

}  // namespace

double log_det_regret_bound(const RegularizationSchedule& schedule, std::span<const StepRecord> stream,
                            const Vector& theta) {
  const Index d = schedule.dim();
  if (theta.size() != d) throw DimensionMismatch("log_det_regret_bound: competitor has the wrong length");
  // The schedule constructor already enforced monotonicity; this guards
  // against an inconsistent pairing of schedule and stream.
  const Matrix& first = schedule.at(1);
  const Matrix& last = schedule.at(std::max<std::size_t>(stream.size(), 1));
  if (!loewner_nondecreasing(first, last)) throw ScheduleViolation("log_det_regret_bound: schedule decreases");

  Matrix a = last;
  for (const auto& step : stream) add_gram(a, step.features);
  const double y_bar = max_response_norm(stream);
  return theta.dot(last * theta) +
         y_bar * y_bar * log_ratio_sum(symmetric_eigenvalues(a), symmetric_eigenvalues(first));
}

double ridge_regret_bound(double lambda, std::span<const StepRecord> stream, const Vector& theta) {
  const auto d = static_cast<double>(theta.size());
  double x_bar = 0.0;
  for (const auto& step : stream) x_bar = std::max(x_bar, step.features.norm());
  const double y_bar = max_response_norm(stream);
  const auto t = static_cast<double>(stream.size());
  return lambda * theta.squaredNorm() + d * y_bar * y_bar * std::log1p(t * x_bar * x_bar / (d * lambda));
}

double ohf_ridge_bound(double lambda, const OhfStreamSummary& summary, const Matrix& theta) {
  const auto dm = static_cast<double>(theta.size());
  const double y2 = summary.max_response_norm * summary.max_response_norm;
  const double growth = static_cast<double>(summary.steps) * summary.max_feature_norm * summary.max_feature_norm *
                        summary.max_summing_norm * summary.max_summing_norm;
  return lambda * theta.squaredNorm() + dm * y2 * std::log1p(growth / (dm * lambda));
}

double ohf_projected_bound(double lambda, const OhfStreamSummary& summary, const Matrix& s, const Matrix& theta) {
  if (theta.rows() != s.cols()) throw DimensionMismatch("ohf_projected_bound: competitor rows must match S columns");
  Matrix gram = s.transpose() * s;
  gram = 0.5 * (gram + gram.transpose()).eval();
  const Vector eig = symmetric_eigenvalues(gram);
  const auto d = static_cast<double>(s.cols());
  const auto m = static_cast<double>(theta.cols());
  const double smallest = eig[eig.size() - 1];
  if (!(smallest > static_cast<double>(s.cols()) * 1e-14 * eig[0])) {
    throw RankDeficient("ohf_projected_bound: summing matrix is not injective");
  }
  const double y2 = summary.max_response_norm * summary.max_response_norm;
  const double growth =
      1.0 + static_cast<double>(summary.steps) * summary.max_feature_norm * summary.max_feature_norm / (m * lambda);
  const double conditioning = s.squaredNorm() / (d * smallest);
  return lambda * (s * theta).squaredNorm() + d * m * y2 * std::log(growth * conditioning);
}

TraceLogGap trace_log_inequality(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("trace_log_inequality: shape mismatch");
  const Cholesky chol(a);
  TraceLogGap out;
  const Matrix diff = a - b;
  for (Index j = 0; j < a.cols(); ++j) out.trace += chol.solve(diff.col(j))[j];
  out.log_ratio_sum = log_ratio_sum(symmetric_eigenvalues(a), symmetric_eigenvalues(b));
  return out;
}

}  // namespace multivaw
