// Command-line front end: run, sweep, bound, synth, audit.
//
// Exit codes: 0 success, 1 usage or config error, 2 data error, 3 audit failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "multivaw/config.hpp"
#include "multivaw/csv.hpp"
#include "multivaw/errors.hpp"
#include "multivaw/experiment.hpp"
#include "multivaw/simd/kernels.hpp"

namespace {

using namespace multivaw;

constexpr int kUsageError = 1;
constexpr int kDataError = 2;
constexpr int kAuditFailure = 3;

struct Overrides {
  std::string config;
  std::string algo;
  std::optional<double> lambda;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<double> tol;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Experiment file (.json or .toml)")->check(CLI::ExistingFile);
  cmd->add_option("--algo", o.algo, "multivaw, metavaw, ftrl or ogd");
  cmd->add_option("--lambda", o.lambda, "Regularization strength");
  cmd->add_option("--seed", o.seed, "Seed for synthetic data");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--tol", o.tol, "Audit tolerance");
}

ExperimentConfig resolve_config(const Overrides& o) {
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (!o.algo.empty()) c.algorithm = parse_algorithm(o.algo);
  if (o.lambda) c.lambda = *o.lambda;
  if (o.seed) c.seed = *o.seed;
  if (!o.out.empty()) c.output = o.out;
  if (o.tol) c.tolerance = *o.tol;
  validate(c);
  return c;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

int cmd_run(const Overrides& o) {
  const ExperimentConfig c = resolve_config(o);
  const ExperimentData data = prepare_data(c);
  const RunResult run = run_experiment(c, data, c.lambda);
  write_run_outputs(c, data, run, c.output);
  std::cout << to_string(c.algorithm) << " lambda=" << csv::format_double(run.lambda)
            << " regret=" << csv::format_double(run.report.regret) << '\n';
  for (const auto& [name, value] : run.report.bound_values) {
    std::cout << "bound " << name << '=' << csv::format_double(value) << '\n';
  }
  return 0;
}

int cmd_sweep(const Overrides& o) {
  const ExperimentConfig c = resolve_config(o);
  const ExperimentData data = prepare_data(c);
  const SweepResult sweep = run_sweep(c, data, c.lambda_grid, c.threads);
  write_sweep_outputs(c, data, sweep, c.output);
  const RunResult& best = sweep.runs[sweep.best];
  std::cout << to_string(c.algorithm) << " best lambda=" << csv::format_double(best.lambda)
            << " regret=" << csv::format_double(best.report.regret) << '\n';
  return 0;
}

int cmd_bound(const Overrides& o, const std::string& predictions_path) {
  ExperimentConfig c = resolve_config(o);
  const std::string path =
      predictions_path.empty() ? (std::filesystem::path(c.output) / "predictions.csv").string() : predictions_path;
  // The run that wrote the predictions knows how they were made; flags on
  // this command line still take precedence.
  const auto summary_path = std::filesystem::path(path).parent_path() / "summary.json";
  if (std::ifstream in(summary_path); in) {
    nlohmann::json summary;
    try {
      summary = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("cannot parse '" + summary_path.string() + "': " + e.what());
    }
    // Only a single-run summary carries "lambda"; a sweep's is ignored.
    if (summary.contains("lambda")) {
      try {
        if (o.algo.empty()) c.algorithm = parse_algorithm(summary.at("algorithm").get<std::string>());
        c.regularization = parse_regularization(summary.at("regularization").get<std::string>());
        if (!o.lambda) c.lambda = summary.at("lambda").get<double>();
      } catch (const nlohmann::json::exception& e) {
        throw DataError("unexpected '" + summary_path.string() + "': " + e.what());
      }
      validate(c);
    }
  }
  const ExperimentData data = prepare_data(c);
  const RunResult run = evaluate_predictions(c, data, c.lambda, read_predictions_csv(path, data));
  nlohmann::json out;
  out["algorithm"] = std::string(to_string(c.algorithm));
  out["lambda"] = run.lambda;
  out["regret"] = run.report.regret;
  nlohmann::json bounds = nlohmann::json::object();
  bool satisfied = true;
  for (const auto& [name, value] : run.report.bound_values) {
    bounds[name] = value;
    satisfied = satisfied && run.report.regret <= value + 1e-6;
  }
  out["bounds"] = bounds;
  out["bounds_satisfied"] = satisfied;
  std::filesystem::create_directories(c.output);
  write_text(std::filesystem::path(c.output) / "bound_summary.json", out.dump(2) + "\n");
  std::cout << out.dump(2) << '\n';
  return satisfied ? 0 : kAuditFailure;
}

int cmd_synth(const Overrides& o) {
  ExperimentConfig c = resolve_config(o);
  c.dataset.clear();
  const ExperimentData data = prepare_data(c);
  const std::filesystem::path dir(c.output);
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "dataset.csv", std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + (dir / "dataset.csv").string() + "'");
    write_dataset_csv(data.bundle, out);
  }
  const HierarchySpec spec = c.hierarchy.empty() ? two_level_tree() : load_hierarchy(c.hierarchy);
  write_text(dir / "hierarchy.json", hierarchy_to_json(spec) + "\n");
  {
    std::ofstream out(dir / "ground_truth.csv", std::ios::binary);
    const Matrix& theta = *data.ground_truth;
    out << "node";
    for (Index j = 0; j < theta.cols(); ++j) out << ",theta_" << (j + 1);
    out << '\n';
    for (Index i = 0; i < theta.rows(); ++i) {
      out << data.bundle.summing.bottom_ids[static_cast<std::size_t>(i)];
      for (Index j = 0; j < theta.cols(); ++j) out << ',' << csv::format_double(theta(i, j));
      out << '\n';
    }
  }
  std::cout << "wrote " << data.bundle.steps << " steps to " << (dir / "dataset.csv").string() << '\n';
  return 0;
}

int cmd_audit(const Overrides& o) {
  const ExperimentConfig c = resolve_config(o);
  const ExperimentData data = prepare_data(c);
  const AuditReport report = run_audits(c, data);
  const std::string text = audit_to_json(report);
  std::filesystem::create_directories(c.output);
  write_text(std::filesystem::path(c.output) / "audit.json", text + "\n");
  std::cout << text << '\n';
  return report.passed ? 0 : kAuditFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online multivariate regression and hierarchical forecasting experiments"};
  app.require_subcommand(1);
  bool show_kernels = false;
  app.add_flag("--kernels", show_kernels, "Print the selected SIMD kernel table");

  Overrides run_o, sweep_o, bound_o, synth_o, audit_o;
  std::string predictions_path;
  auto* run = app.add_subcommand("run", "Run one experiment");
  add_common(run, run_o);
  auto* sweep = app.add_subcommand("sweep", "Run the lambda grid");
  add_common(sweep, sweep_o);
  auto* bound = app.add_subcommand("bound", "Evaluate bounds for recorded predictions");
  add_common(bound, bound_o);
  bound->add_option("--predictions", predictions_path, "Predictions CSV (default <out>/predictions.csv)");
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  add_common(synth, synth_o);
  auto* audit = app.add_subcommand("audit", "Cross-check equivalent solver paths");
  add_common(audit, audit_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (show_kernels) std::cerr << "kernels: " << simd::active().name << '\n';
    if (*run) return cmd_run(run_o);
    if (*sweep) return cmd_sweep(sweep_o);
    if (*bound) return cmd_bound(bound_o, predictions_path);
    if (*synth) return cmd_synth(synth_o);
    if (*audit) return cmd_audit(audit_o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsageError;
  } catch (const InvalidPeriod& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsageError;
  } catch (const multivaw::Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}
