#pragma once

#include <cstddef>

#include "multivaw/linalg.hpp"

namespace multivaw {

enum class Seasonality { none, day_of_week, month_of_year, custom };

/// Deterministic calendar-free feature recipe. Step t (1-based) maps to the
/// one-hot slot ((t - 1 + phase) mod period).
struct FeatureRecipe {
  bool time_index = true;
  Seasonality seasonal = Seasonality::none;
  int period = 0;  // used when seasonal == custom
  int phase = 0;

  /// 7 for day_of_week, 12 for month_of_year, `period` for custom, 0 for none.
  int effective_period() const;
  /// Number of columns make_features produces.
  Index width() const;
};

/// T x width matrix: optional time index t in column 0, then the one-hot
/// seasonal block. Throws InvalidPeriod for a custom period below 2.
Matrix make_features(std::size_t steps, const FeatureRecipe& recipe);

}  // namespace multivaw
