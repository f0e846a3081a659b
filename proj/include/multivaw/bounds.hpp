#pragma once

#include <span>

#include "multivaw/evaluation.hpp"
#include "multivaw/schedule.hpp"

// Closed-form regret bounds for the multivariate forward algorithm. The
// response and feature magnitudes (y_bar, X_bar, ...) are taken from the
// realized stream, which makes every bound exactly evaluable after a run.

namespace multivaw {

/// |theta|^2_{Lambda_T} + y_bar^2 sum_i log(lambda_i(A_T) / lambda_i(Lambda_1)),
/// A_T = Lambda_T + sum X_t^T X_t, y_bar = max_t |y_t|_2. Holds for any
/// nondecreasing SPD schedule.
double log_det_regret_bound(const RegularizationSchedule& schedule, std::span<const StepRecord> stream,
                            const Vector& theta);

/// lambda |theta|^2 + d y_bar^2 log(1 + T X_bar^2 / (d lambda)) with
/// X_bar = max_t |X_t|_F: the constant-ridge specialization of the bound above.
double ridge_regret_bound(double lambda, std::span<const StepRecord> stream, const Vector& theta);

/// Magnitudes of a hierarchical stream.
struct OhfStreamSummary {
  std::size_t steps = 0;
  double max_feature_norm = 0.0;   // max_t |x_t|_2
  double max_summing_norm = 0.0;   // max_t |S_t|_F
  double max_response_norm = 0.0;  // max_t |y_t|_2
};

/// Hierarchical learner with Lambda = lambda I_{dm}, competitor Theta (d x m):
/// lambda |Theta|_F^2 + dm y_bar^2 log(1 + T x_bar^2 S_bar^2 / (dm lambda)).
double ohf_ridge_bound(double lambda, const OhfStreamSummary& summary, const Matrix& theta);

/// Projected per-node learner (fixed injective S), competitor Theta (d x m):
/// lambda |S Theta|_F^2
///   + dm y_bar^2 log((1 + T x_bar^2 / (m lambda)) |S|_F^2 / (d lambda_d(S^T S))).
/// Throws RankDeficient when S is not injective.
double ohf_projected_bound(double lambda, const OhfStreamSummary& summary, const Matrix& s, const Matrix& theta);

/// Both sides of tr(A^{-1}(A - B)) <= sum_i log(lambda_i(A) / lambda_i(B))
/// for SPD A >= B.
struct TraceLogGap {
  double trace = 0.0;
  double log_ratio_sum = 0.0;
};
TraceLogGap trace_log_inequality(const Matrix& a, const Matrix& b);

}  // namespace multivaw
