#include "multivaw/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <random>
#include <thread>

#include "json.hpp"
#include "multivaw/audit.hpp"
#include "multivaw/baselines.hpp"
#include "multivaw/bounds.hpp"
#include "multivaw/csv.hpp"
#include "multivaw/multivaw.hpp"

namespace multivaw {

using nlohmann::json;

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

std::string cell(double v) { return std::isnan(v) ? std::string() : csv::format_double(v); }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double bound_or_nan(const RegretReport& report, const char* name) {
  auto it = report.bound_values.find(name);
  return it == report.bound_values.end() ? kMissing : it->second;
}

}  // namespace

Matrix ExperimentData::summing_at(std::size_t t) const {
  const Matrix& s = bundle.summing.s;
  if (active_rows.empty()) return s;
  const auto& rows = active_rows[t];
  Matrix out(static_cast<Index>(rows.size()), s.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = s.row(rows[i]);
  return out;
}

Vector ExperimentData::response_at(std::size_t t) const {
  const auto row = static_cast<Index>(t);
  if (active_rows.empty()) return bundle.responses.row(row).transpose();
  const auto& rows = active_rows[t];
  Vector out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Index>(i)] = bundle.responses(row, rows[i]);
  return out;
}

Vector ExperimentData::features_at(std::size_t t) const {
  return bundle.features.row(static_cast<Index>(t)).transpose();
}

std::vector<std::vector<Index>> dropout_masks(Index nodes, std::size_t steps, double p, std::uint64_t seed) {
  // Separate stream from the data generator so dropout does not perturb it.
  std::mt19937_64 rng(seed ^ 0x6d61736b73ULL);
  std::bernoulli_distribution drop(p);
  std::vector<std::vector<Index>> out(steps);
  for (auto& rows : out) {
    rows.push_back(0);
    for (Index i = 1; i < nodes; ++i) {
      if (!drop(rng)) rows.push_back(i);
    }
  }
  return out;
}

ExperimentData prepare_data(const ExperimentConfig& config) {
  validate(config);
  const HierarchySpec spec = config.hierarchy.empty() ? two_level_tree() : load_hierarchy(config.hierarchy);
  ExperimentData data;
  if (config.dataset.empty()) {
    SynthOptions options;
    options.seed = config.seed;
    options.steps = config.synth_steps;
    options.feature_dim = config.synth_feature_dim;
    options.noise = config.synth_noise;
    options.recipe = config.features;
    SynthResult synth = synth_generate(options, spec);
    data.bundle = std::move(synth.bundle);
    data.ground_truth = std::move(synth.theta);
  } else {
    data.bundle = ingest_csv(config.dataset, spec);
    attach_features(data.bundle, config.features);
  }
  if (data.bundle.features.cols() == 0) throw ConfigError("feature recipe and dataset give no feature columns");
  if (config.node_dropout > 0.0) {
    data.active_rows = dropout_masks(data.bundle.summing.n(), data.bundle.steps, config.node_dropout, config.seed);
  }
  return data;
}

std::unique_ptr<OhfForecaster> make_forecaster(const ExperimentConfig& config, const SummingMatrix& summing,
                                               Index feature_dim, double lambda) {
  const Index d = summing.d();
  const Index dm = d * feature_dim;
  switch (config.algorithm) {
    case Algorithm::multivaw:
      if (config.regularization == RegularizationKind::kronecker) {
        return make_kronecker_ohf(summing.s, lambda, feature_dim);
      }
      return make_vectorized_ohf(std::make_unique<MultiVaw>(RegularizationSchedule::scaled_identity(dm, lambda)), d,
                                 feature_dim);
    case Algorithm::metavaw:
      return make_metavaw_ohf(summing.s, lambda, feature_dim);
    case Algorithm::ftrl:
      return make_vectorized_ohf(std::make_unique<Ftrl>(dm, lambda), d, feature_dim);
    case Algorithm::ogd:
      return make_vectorized_ohf(
          std::make_unique<Ogd>(dm, config.ogd_step.value_or(Ogd::default_step(lambda)), config.ogd_bound), d,
          feature_dim);
  }
  throw ConfigError("unsupported algorithm");
}

RunResult run_experiment(const ExperimentConfig& config, const ExperimentData& data, double lambda) {
  if (data.time_varying() && config.algorithm == Algorithm::metavaw) {
    throw ConfigError("metavaw requires a time-invariant summing matrix");
  }
  const DatasetBundle& b = data.bundle;
  auto forecaster = make_forecaster(config, b.summing, b.features.cols(), lambda);
  Matrix predictions = Matrix::Constant(static_cast<Index>(b.steps), b.summing.n(), kMissing);
  for (std::size_t t = 0; t < b.steps; ++t) {
    const Vector y_hat = forecaster->predict(data.summing_at(t), data.features_at(t));
    forecaster->observe(data.response_at(t));
    const auto row = static_cast<Index>(t);
    if (data.time_varying()) {
      const auto& rows = data.active_rows[t];
      for (std::size_t i = 0; i < rows.size(); ++i) predictions(row, rows[i]) = y_hat[static_cast<Index>(i)];
    } else {
      predictions.row(row) = y_hat.transpose();
    }
  }
  return evaluate_predictions(config, data, lambda, std::move(predictions));
}

RunResult evaluate_predictions(const ExperimentConfig& config, const ExperimentData& data, double lambda,
                               Matrix predictions) {
  const DatasetBundle& b = data.bundle;
  if (predictions.rows() != static_cast<Index>(b.steps) || predictions.cols() != b.summing.n()) {
    throw DimensionMismatch("predictions must be steps x nodes");
  }
  const Index d = b.summing.d();
  const Index m = b.features.cols();

  std::vector<StepRecord> records;
  records.reserve(b.steps);
  OhfStreamSummary summary;
  summary.steps = b.steps;
  for (std::size_t t = 0; t < b.steps; ++t) {
    const Matrix s_t = data.summing_at(t);
    const Vector x = data.features_at(t);
    StepRecord rec;
    rec.features = ohf_feature_matrix(s_t, x);
    rec.response = data.response_at(t);
    rec.prediction.resize(rec.response.size());
    for (Index i = 0; i < rec.response.size(); ++i) {
      const Index node = data.time_varying() ? data.active_rows[t][static_cast<std::size_t>(i)] : i;
      const double v = predictions(static_cast<Index>(t), node);
      if (std::isnan(v)) {
        throw DataError("prediction missing for node '" + b.node_ids()[static_cast<std::size_t>(node)] +
                        "' at step " + std::to_string(t + 1));
      }
      rec.prediction[i] = v;
    }
    summary.max_feature_norm = std::max(summary.max_feature_norm, x.norm());
    summary.max_summing_norm = std::max(summary.max_summing_norm, s_t.norm());
    summary.max_response_norm = std::max(summary.max_response_norm, rec.response.norm());
    records.push_back(std::move(rec));
  }

  RunResult out;
  out.lambda = lambda;
  out.predictions = std::move(predictions);
  const Vector theta = best_competitor(records);
  out.theta_star = unvec(theta, d, m);
  out.report = regret(records, theta);

  const bool structured =
      config.algorithm == Algorithm::metavaw ||
      (config.algorithm == Algorithm::multivaw && config.regularization == RegularizationKind::kronecker);
  if (structured) {
    const Matrix gram = b.summing.s.transpose() * b.summing.s;
    const auto schedule = RegularizationSchedule::kronecker(lambda * Matrix::Identity(m, m), gram);
    out.report.bound_values[kLogDetBound] = log_det_regret_bound(schedule, records, theta);
    out.report.bound_values[kClosedFormBound] = ohf_projected_bound(lambda, summary, b.summing.s, out.theta_star);
  } else if (config.algorithm == Algorithm::multivaw) {
    const auto schedule = RegularizationSchedule::scaled_identity(d * m, lambda);
    out.report.bound_values[kLogDetBound] = log_det_regret_bound(schedule, records, theta);
    out.report.bound_values[kClosedFormBound] = ohf_ridge_bound(lambda, summary, out.theta_star);
  }
  return out;
}

void write_run_outputs(const ExperimentConfig& config, const ExperimentData& data, const RunResult& run,
                       const std::string& directory) {
  namespace fs = std::filesystem;
  const fs::path dir(directory);
  fs::create_directories(dir);
  const DatasetBundle& b = data.bundle;

  {
    auto out = open_output(dir / "regret.csv");
    write_regret_csv(run.report, out);
  }
  {
    auto out = open_output(dir / "predictions.csv");
    out << 't';
    for (const auto& id : b.node_ids()) out << ',' << id;
    out << '\n';
    for (Index t = 0; t < run.predictions.rows(); ++t) {
      out << (t + 1);
      for (Index i = 0; i < run.predictions.cols(); ++i) out << ',' << cell(run.predictions(t, i));
      out << '\n';
    }
  }
  {
    // First node in hierarchy order is the total.
    auto out = open_output(dir / "forecast_total.csv");
    out << "t,response,prediction,optimal\n";
    const Vector total_row = b.summing.s.row(0).transpose();
    for (std::size_t t = 0; t < b.steps; ++t) {
      const auto row = static_cast<Index>(t);
      const double optimal = total_row.dot(run.theta_star * data.features_at(t));
      out << (t + 1) << ',' << csv::format_double(b.responses(row, 0)) << ',' << cell(run.predictions(row, 0)) << ','
          << csv::format_double(optimal) << '\n';
    }
  }
  {
    json summary;
    summary["algorithm"] = std::string(to_string(config.algorithm));
    summary["regularization"] = std::string(to_string(config.regularization));
    summary["lambda"] = run.lambda;
    summary["steps"] = b.steps;
    summary["nodes"] = b.summing.n();
    summary["bottom_nodes"] = b.summing.d();
    summary["feature_dim"] = b.features.cols();
    summary["time_varying"] = data.time_varying();
    summary["cumulative_loss"] = run.report.cumulative_loss;
    summary["competitor_loss"] = run.report.competitor_loss;
    summary["regret"] = run.report.regret;
    summary["final_average_regret"] =
        run.report.average_regret_curve.empty() ? json(nullptr) : json(run.report.average_regret_curve.back());
    json bounds = json::object();
    for (const auto& [name, value] : run.report.bound_values) bounds[name] = number_or_null(value);
    summary["bounds"] = bounds;
    summary["input_max_coherence_residual"] = b.max_coherence_residual;
    auto out = open_output(dir / "summary.json");
    out << summary.dump(2) << '\n';
  }
}

Matrix read_predictions_csv(const std::string& path, const ExperimentData& data) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open predictions '" + path + "'");
  const DatasetBundle& b = data.bundle;
  std::string line;
  if (!std::getline(in, line)) throw EmptyFile(path + ": file is empty");
  const auto header = csv::split_line(line);
  if (header.size() != b.node_ids().size() + 1) throw DataError(path + ": header does not match the hierarchy");
  for (std::size_t i = 0; i < b.node_ids().size(); ++i) {
    if (header[i + 1] != b.node_ids()[i]) {
      throw MissingColumn(path + ": expected column '" + b.node_ids()[i] + "', found '" + header[i + 1] + "'");
    }
  }
  Matrix out = Matrix::Constant(static_cast<Index>(b.steps), b.summing.n(), kMissing);
  std::size_t t = 0;
  std::size_t row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (line.empty() || line == "\r") continue;
    if (t >= b.steps) throw DataError(path + ": more rows than dataset steps");
    const auto cells = csv::split_line(line);
    if (cells.size() != header.size()) throw DataError(path + ": row " + std::to_string(row_number) + " is ragged");
    for (std::size_t c = 1; c < cells.size(); ++c) {
      if (cells[c].find_first_not_of(" \r") == std::string::npos) continue;
      const auto v = csv::parse_double(cells[c]);
      if (!v) throw NonNumericCell(path + ": row " + std::to_string(row_number) + ": cannot parse '" + cells[c] + "'",
                                   row_number, c + 1);
      out(static_cast<Index>(t), static_cast<Index>(c - 1)) = *v;
    }
    ++t;
  }
  if (t != b.steps) throw DataError(path + ": expected " + std::to_string(b.steps) + " rows, found " + std::to_string(t));
  return out;
}

SweepResult run_sweep(const ExperimentConfig& config, const ExperimentData& data, std::span<const double> grid,
                      unsigned threads) {
  if (grid.empty()) throw ConfigError("sweep needs at least one lambda");
  SweepResult out;
  out.runs.resize(grid.size());
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(grid.size()));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) out.runs[i] = run_experiment(config, data, grid[i]);
  };
  std::vector<std::future<void>> pending;
  for (unsigned w = 1; w < workers; ++w) pending.push_back(std::async(std::launch::async, work));
  work();
  for (auto& f : pending) f.get();

  for (std::size_t i = 1; i < out.runs.size(); ++i) {
    if (out.runs[i].report.regret < out.runs[out.best].report.regret) out.best = i;
  }
  return out;
}

void write_sweep_outputs(const ExperimentConfig& config, const ExperimentData& data, const SweepResult& sweep,
                         const std::string& directory) {
  namespace fs = std::filesystem;
  const fs::path dir(directory);
  fs::create_directories(dir);
  const int width = sweep.runs.size() > 99 ? 3 : 2;
  {
    auto out = open_output(dir / "sweep.csv");
    out << "lambda,regret,cumulative_loss,competitor_loss,bound_log_det,bound_closed_form\n";
    for (const auto& run : sweep.runs) {
      out << csv::format_double(run.lambda) << ',' << csv::format_double(run.report.regret) << ','
          << csv::format_double(run.report.cumulative_loss) << ',' << csv::format_double(run.report.competitor_loss)
          << ',' << cell(bound_or_nan(run.report, kLogDetBound)) << ','
          << cell(bound_or_nan(run.report, kClosedFormBound)) << '\n';
    }
  }
  for (std::size_t i = 0; i < sweep.runs.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "regret_lambda_%0*zu.csv", width, i);
    auto out = open_output(dir / name);
    write_regret_csv(sweep.runs[i].report, out);
  }
  {
    json summary;
    summary["algorithm"] = std::string(to_string(config.algorithm));
    summary["regularization"] = std::string(to_string(config.regularization));
    json grid = json::array();
    for (const auto& run : sweep.runs) grid.push_back(run.lambda);
    summary["lambda_grid"] = grid;
    summary["best_index"] = sweep.best;
    summary["best_lambda"] = sweep.runs[sweep.best].lambda;
    summary["best_regret"] = sweep.runs[sweep.best].report.regret;
    auto out = open_output(dir / "summary.json");
    out << summary.dump(2) << '\n';
  }
  write_run_outputs(config, data, sweep.runs[sweep.best], (dir / "best").string());
}

AuditReport run_audits(const ExperimentConfig& config, const ExperimentData& data) {
  const DatasetBundle& b = data.bundle;
  const Index d = b.summing.d();
  const Index m = b.features.cols();
  AuditReport report;
  report.tolerance = config.tolerance;

  std::vector<RegressionStep> regression;
  std::vector<OhfStep> hierarchical;
  double y_max = 0.0;
  for (std::size_t t = 0; t < b.steps; ++t) {
    const Vector x = data.features_at(t);
    const Vector y = data.response_at(t);
    y_max = std::max(y_max, y.norm());
    regression.push_back({ohf_feature_matrix(data.summing_at(t), x), y});
    hierarchical.push_back({x, y});
  }
  report.response_scale = 1.0 + y_max;

  report.woodbury_deviation =
      woodbury_path_audit(RegularizationSchedule::scaled_identity(d * m, config.lambda), regression);
  bool ok = report.woodbury_deviation <= config.tolerance;
  if (!data.time_varying()) {
    const Matrix identity = Matrix::Identity(m, m);
    report.kronecker_deviation = kronecker_path_audit(b.summing.s, config.lambda * identity, hierarchical);
    report.metavaw_deviation = metavaw_equivalence_audit(b.summing.s, config.lambda, hierarchical);
    const double limit = config.tolerance * report.response_scale;
    ok = ok && *report.kronecker_deviation <= limit && *report.metavaw_deviation <= limit;
  }
  report.passed = ok;
  return report;
}

std::string audit_to_json(const AuditReport& report) {
  json out;
  out["woodbury_max_relative_deviation"] = report.woodbury_deviation;
  out["kronecker_max_deviation"] = report.kronecker_deviation ? json(*report.kronecker_deviation) : json(nullptr);
  out["metavaw_max_deviation"] = report.metavaw_deviation ? json(*report.metavaw_deviation) : json(nullptr);
  out["response_scale"] = report.response_scale;
  out["tolerance"] = report.tolerance;
  out["passed"] = report.passed;
  return out.dump(2);
}

}  // namespace multivaw
