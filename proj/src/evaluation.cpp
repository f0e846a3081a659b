#include "multivaw/evaluation.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "multivaw/csv.hpp"

namespace multivaw {

RegretReport regret(std::span<const StepRecord> stream, const Vector& competitor) {
  RegretReport report;
  double regret_so_far = 0.0;
  std::size_t t = 0;
  for (const auto& step : stream) {
    ++t;
    if (step.features.cols() != competitor.size() || step.response.size() != step.features.rows() ||
        step.prediction.size() != step.response.size()) {
      throw DimensionMismatch("regret: step " + std::to_string(t) + " has inconsistent dimensions");
    }
    const double loss = (step.prediction - step.response).squaredNorm();
    const double competitor_loss = (step.features * competitor - step.response).squaredNorm();
    report.per_step_losses.push_back(loss);
    report.competitor_losses.push_back(competitor_loss);
    report.cumulative_loss += loss;
    report.competitor_loss += competitor_loss;
    regret_so_far = report.cumulative_loss - report.competitor_loss;
    report.prefix_regret.push_back(regret_so_far);
    report.average_regret_curve.push_back(regret_so_far / static_cast<double>(t));
  }
  report.regret = report.cumulative_loss - report.competitor_loss;
  return report;
}

Vector best_competitor(std::span<const StepRecord> stream) {
  if (stream.empty()) throw DimensionMismatch("best_competitor: empty stream");
  const Index d = stream.front().features.cols();
  Matrix normal = Matrix::Zero(d, d);
  Vector rhs = Vector::Zero(d);
  for (const auto& step : stream) {
    if (step.features.cols() != d || step.response.size() != step.features.rows()) {
      throw DimensionMismatch("best_competitor: inconsistent step dimensions");
    }
    add_gram(normal, step.features);
    rhs.noalias() += step.features.transpose() * step.response;
  }

  const SymmetricEigen eig = symmetric_eigen(normal);
  const double largest = eig.values.size() > 0 ? eig.values[0] : 0.0;
  const double cutoff = static_cast<double>(d) * std::numeric_limits<double>::epsilon() * 16.0 * largest;
  Vector theta = Vector::Zero(d);
  for (Index i = 0; i < d; ++i) {
    if (eig.values[i] > cutoff) {
      const auto v = eig.vectors.col(i);
      theta += (v.dot(rhs) / eig.values[i]) * v;
    }
  }
  return theta;
}

void write_regret_csv(const RegretReport& report, std::ostream& out) {
  out << "t,loss,cumulative_loss,regret_prefix,average_regret\n";
  double cumulative = 0.0;
  for (std::size_t i = 0; i < report.per_step_losses.size(); ++i) {
    cumulative += report.per_step_losses[i];
    out << (i + 1) << ',' << csv::format_double(report.per_step_losses[i]) << ','
        << csv::format_double(cumulative) << ',' << csv::format_double(report.prefix_regret[i]) << ','
        << csv::format_double(report.average_regret_curve[i]) << '\n';
  }
}

}  // namespace multivaw
