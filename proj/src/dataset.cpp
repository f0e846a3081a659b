#include "multivaw/dataset.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>

#include "multivaw/csv.hpp"

namespace multivaw {

namespace {

void compute_coherence(DatasetBundle& bundle) {
  const Matrix projection = projection_onto_image(bundle.summing.s);
  bundle.coherence_residuals.clear();
  bundle.max_coherence_residual = 0.0;
  for (Index t = 0; t < bundle.responses.rows(); ++t) {
    const Vector y = bundle.responses.row(t).transpose();
    const double r = coherence_check_projected(projection, y).residual;
    bundle.coherence_residuals.push_back(r);
    bundle.max_coherence_residual = std::max(bundle.max_coherence_residual, r);
  }
}

}  // namespace

DatasetBundle parse_dataset_csv(std::istream& in, const HierarchySpec& spec, const std::string& source) {
  std::string line;
  if (!std::getline(in, line) || line.find_first_not_of(" \t\r") == std::string::npos) {
    throw EmptyFile(source + ": file is empty");
  }
  const std::vector<std::string> header = csv::split_line(line);

  DatasetBundle bundle;
  bundle.summing = build_summing_matrix(spec);
  const SummingMatrix& sm = bundle.summing;

  std::map<std::string, std::size_t> column_of;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!column_of.emplace(header[c], c).second) {
      throw DataError(source + ": duplicate column '" + header[c] + "'");
    }
  }
  for (const auto& id : sm.bottom_ids) {
    if (!column_of.count(id)) throw MissingColumn(source + ": missing bottom-level column '" + id + "'");
  }
  std::vector<std::size_t> exo_columns;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].rfind("x_", 0) == 0 && sm.row_of(header[c]) < 0) {
      exo_columns.push_back(c);
      bundle.exogenous_ids.push_back(header[c]);
    }
  }

  std::vector<std::vector<double>> rows;
  std::size_t row_number = 1;  // header is row 1
  while (std::getline(in, line)) {
    ++row_number;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = csv::split_line(line);
    if (cells.size() != header.size()) {
      throw DataError(source + ": row " + std::to_string(row_number) + " has " + std::to_string(cells.size()) +
                      " cells, expected " + std::to_string(header.size()));
    }
    std::vector<double> values(cells.size(), 0.0);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const bool needed = sm.row_of(header[c]) >= 0 || header[c].rfind("x_", 0) == 0;
      if (!needed) continue;
      const auto v = csv::parse_double(cells[c]);
      if (!v) {
        throw NonNumericCell(source + ": row " + std::to_string(row_number) + ", column '" + header[c] +
                                 "': cannot parse '" + cells[c] + "'",
                             row_number, c + 1);
      }
      values[c] = *v;
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw EmptyFile(source + ": no data rows");

  bundle.steps = rows.size();
  const auto steps = static_cast<Index>(rows.size());
  bundle.responses = Matrix::Zero(steps, sm.n());
  bundle.exogenous = Matrix::Zero(steps, static_cast<Index>(exo_columns.size()));
  for (Index t = 0; t < steps; ++t) {
    const auto& values = rows[static_cast<std::size_t>(t)];
    Vector bottom(sm.d());
    for (Index j = 0; j < sm.d(); ++j) bottom[j] = values[column_of.at(sm.bottom_ids[static_cast<std::size_t>(j)])];
    const Vector aggregated = sm.s * bottom;
    for (Index i = 0; i < sm.n(); ++i) {
      auto it = column_of.find(sm.node_ids[static_cast<std::size_t>(i)]);
      bundle.responses(t, i) = it == column_of.end() ? aggregated[i] : values[it->second];
    }
    for (std::size_t k = 0; k < exo_columns.size(); ++k) {
      bundle.exogenous(t, static_cast<Index>(k)) = values[exo_columns[k]];
    }
  }
  compute_coherence(bundle);
  return bundle;
}

DatasetBundle ingest_csv(const std::string& path, const HierarchySpec& spec) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset '" + path + "'");
  return parse_dataset_csv(in, spec, path);
}

void write_dataset_csv(const DatasetBundle& bundle, std::ostream& out) {
  out << 't';
  for (const auto& id : bundle.node_ids()) out << ',' << id;
  for (const auto& id : bundle.exogenous_ids) out << ',' << id;
  out << '\n';
  for (Index t = 0; t < bundle.responses.rows(); ++t) {
    out << (t + 1);
    for (Index i = 0; i < bundle.responses.cols(); ++i) out << ',' << csv::format_double(bundle.responses(t, i));
    for (Index k = 0; k < bundle.exogenous.cols(); ++k) out << ',' << csv::format_double(bundle.exogenous(t, k));
    out << '\n';
  }
}

void attach_features(DatasetBundle& bundle, const FeatureRecipe& recipe) {
  const Matrix engineered = make_features(bundle.steps, recipe);
  bundle.features.resize(static_cast<Index>(bundle.steps), engineered.cols() + bundle.exogenous.cols());
  bundle.features << engineered, bundle.exogenous;
}

SynthResult synth_generate(const SynthOptions& options, const HierarchySpec& spec) {
  if (options.steps < 1) throw ConfigError("synth: at least one step is required");
  if (!(options.noise >= 0.0)) throw ConfigError("synth: noise level must be nonnegative");
  const Index recipe_width = options.recipe.width();
  const Index noise_columns = options.feature_dim - recipe_width;
  if (noise_columns < 0) {
    throw ConfigError("synth: feature dimension " + std::to_string(options.feature_dim) +
                      " is smaller than the recipe width " + std::to_string(recipe_width));
  }
  if (options.feature_dim < 1) throw ConfigError("synth: feature dimension must be positive");

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  SynthResult out;
  DatasetBundle& bundle = out.bundle;
  bundle.summing = build_summing_matrix(spec);
  const SummingMatrix& sm = bundle.summing;
  bundle.steps = options.steps;
  const auto steps = static_cast<Index>(options.steps);

  out.theta.resize(sm.d(), options.feature_dim);
  for (Index i = 0; i < sm.d(); ++i) {
    for (Index j = 0; j < options.feature_dim; ++j) out.theta(i, j) = normal(rng);
  }
  bundle.exogenous.resize(steps, noise_columns);
  for (Index t = 0; t < steps; ++t) {
    for (Index k = 0; k < noise_columns; ++k) bundle.exogenous(t, k) = normal(rng);
  }
  for (Index k = 0; k < noise_columns; ++k) bundle.exogenous_ids.push_back("x_" + std::to_string(k + 1));
  attach_features(bundle, options.recipe);

  bundle.responses.resize(steps, sm.n());
  const Matrix mean_map = sm.s * out.theta;
  for (Index t = 0; t < steps; ++t) {
    Vector y = mean_map * bundle.features.row(t).transpose();
    if (options.noise > 0.0) {
      for (Index i = 0; i < y.size(); ++i) y[i] += options.noise * normal(rng);
    }
    bundle.responses.row(t) = y.transpose();
  }
  compute_coherence(bundle);
  return out;
}

}  // namespace multivaw
