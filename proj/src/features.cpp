#include "multivaw/features.hpp"

#include <string>

namespace multivaw {

int FeatureRecipe::effective_period() const {
  switch (seasonal) {
    case Seasonality::none:
      return 0;
    case Seasonality::day_of_week:
      return 7;
    case Seasonality::month_of_year:
      return 12;
    case Seasonality::custom:
      if (period < 2) throw InvalidPeriod("feature recipe: seasonal period must be at least 2, got " + std::to_string(period));
      return period;
  }
  return 0;
}

Index FeatureRecipe::width() const { return (time_index ? 1 : 0) + effective_period(); }

Matrix make_features(std::size_t steps, const FeatureRecipe& recipe) {
  const int period = recipe.effective_period();
  const Index offset = recipe.time_index ? 1 : 0;
  Matrix out = Matrix::Zero(static_cast<Index>(steps), recipe.width());
  for (std::size_t i = 0; i < steps; ++i) {
    const auto row = static_cast<Index>(i);
    if (recipe.time_index) out(row, 0) = static_cast<double>(i + 1);
    if (period > 0) {
      const long long slot = ((static_cast<long long>(i) + recipe.phase) % period + period) % period;
      out(row, offset + slot) = 1.0;
    }
  }
  return out;
}

}  // namespace multivaw
