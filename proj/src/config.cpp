#include "multivaw/config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "multivaw/errors.hpp"

namespace multivaw {

using nlohmann::json;

std::string_view to_string(Algorithm algorithm) noexcept {
  switch (algorithm) {
    case Algorithm::multivaw: return "multivaw";
    case Algorithm::metavaw: return "metavaw";
    case Algorithm::ftrl: return "ftrl";
    case Algorithm::ogd: return "ogd";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::multivaw, Algorithm::metavaw, Algorithm::ftrl, Algorithm::ogd}) {
    if (name == to_string(a)) return a;
  }
  throw ConfigError("unknown algorithm '" + std::string(name) + "' (expected multivaw, metavaw, ftrl or ogd)");
}

std::string_view to_string(RegularizationKind kind) noexcept {
  return kind == RegularizationKind::kronecker ? "kronecker" : "scaled_identity";
}

RegularizationKind parse_regularization(std::string_view name) {
  if (name == "scaled_identity") return RegularizationKind::scaled_identity;
  if (name == "kronecker") return RegularizationKind::kronecker;
  throw ConfigError("unknown regularization '" + std::string(name) + "' (expected scaled_identity or kronecker)");
}

namespace {

std::string_view seasonality_name(Seasonality s) {
  switch (s) {
    case Seasonality::none: return "none";
    case Seasonality::day_of_week: return "day_of_week";
    case Seasonality::month_of_year: return "month_of_year";
    case Seasonality::custom: return "custom";
  }
  return "none";
}

Seasonality parse_seasonality(std::string_view name) {
  for (auto s : {Seasonality::none, Seasonality::day_of_week, Seasonality::month_of_year, Seasonality::custom}) {
    if (name == seasonality_name(s)) return s;
  }
  throw ConfigError("unknown seasonal encoding '" + std::string(name) + "'");
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  if (path.empty() || base_dir.empty()) return path;
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

template <class T>
T get_as(const json& node, const char* key) {
  try {
    return node.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

void reject_unknown(const json& object, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError("unknown config key '" + where + key + "'");
  }
}

ExperimentConfig from_json(const json& root, const std::string& base_dir) {
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(root,
                 {"dataset", "hierarchy", "algorithm", "regularization", "lambda", "lambda_grid", "features", "output",
                  "seed", "synth", "ogd", "node_dropout", "tolerance", "threads"},
                 "");
  ExperimentConfig c;
  if (root.contains("dataset")) c.dataset = resolve(get_as<std::string>(root["dataset"], "dataset"), base_dir);
  if (root.contains("hierarchy")) c.hierarchy = resolve(get_as<std::string>(root["hierarchy"], "hierarchy"), base_dir);
  if (root.contains("algorithm")) c.algorithm = parse_algorithm(get_as<std::string>(root["algorithm"], "algorithm"));
  if (root.contains("regularization")) {
    c.regularization = parse_regularization(get_as<std::string>(root["regularization"], "regularization"));
  }
  if (root.contains("lambda")) c.lambda = get_as<double>(root["lambda"], "lambda");
  if (root.contains("lambda_grid")) {
    const json& grid = root["lambda_grid"];
    if (grid.is_object()) {
      reject_unknown(grid, {"min", "max", "points"}, "lambda_grid.");
      c.lambda_grid = log_spaced_grid(get_as<double>(grid.value("min", json(1e-4)), "lambda_grid.min"),
                                      get_as<double>(grid.value("max", json(1e4)), "lambda_grid.max"),
                                      get_as<std::size_t>(grid.value("points", json(17)), "lambda_grid.points"));
    } else if (grid.is_array()) {
      c.lambda_grid = get_as<std::vector<double>>(grid, "lambda_grid");
    } else {
      c.lambda_grid = {get_as<double>(grid, "lambda_grid")};
    }
  } else {
    c.lambda_grid = default_lambda_grid();
  }
  if (root.contains("features")) {
    const json& f = root["features"];
    reject_unknown(f, {"time_index", "seasonal", "period", "phase"}, "features.");
    if (f.contains("time_index")) c.features.time_index = get_as<bool>(f["time_index"], "features.time_index");
    if (f.contains("seasonal")) c.features.seasonal = parse_seasonality(get_as<std::string>(f["seasonal"], "features.seasonal"));
    if (f.contains("period")) {
      c.features.period = get_as<int>(f["period"], "features.period");
      if (!f.contains("seasonal")) c.features.seasonal = Seasonality::custom;
    }
    if (f.contains("phase")) c.features.phase = get_as<int>(f["phase"], "features.phase");
  }
  if (root.contains("output")) c.output = resolve(get_as<std::string>(root["output"], "output"), base_dir);
  if (root.contains("seed")) c.seed = get_as<std::uint64_t>(root["seed"], "seed");
  if (root.contains("synth")) {
    const json& s = root["synth"];
    reject_unknown(s, {"steps", "feature_dim", "noise"}, "synth.");
    if (s.contains("steps")) c.synth_steps = get_as<std::size_t>(s["steps"], "synth.steps");
    if (s.contains("feature_dim")) c.synth_feature_dim = get_as<Index>(s["feature_dim"], "synth.feature_dim");
    if (s.contains("noise")) c.synth_noise = get_as<double>(s["noise"], "synth.noise");
  }
  if (root.contains("ogd")) {
    const json& o = root["ogd"];
    reject_unknown(o, {"step", "bound"}, "ogd.");
    if (o.contains("step") && !o["step"].is_null()) c.ogd_step = get_as<double>(o["step"], "ogd.step");
    if (o.contains("bound")) c.ogd_bound = get_as<double>(o["bound"], "ogd.bound");
  }
  if (root.contains("node_dropout")) c.node_dropout = get_as<double>(root["node_dropout"], "node_dropout");
  if (root.contains("tolerance")) c.tolerance = get_as<double>(root["tolerance"], "tolerance");
  if (root.contains("threads")) c.threads = get_as<unsigned>(root["threads"], "threads");
  validate(c);
  return c;
}

// TOML values arrive from the CLI11 reader as strings with quotes removed;
// types are recovered from their spelling.
json infer_scalar(const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  const char* first = text.data();
  const char* last = first + text.size();
  std::int64_t as_int = 0;
  if (auto r = std::from_chars(first, last, as_int); r.ec == std::errc() && r.ptr == last) return as_int;
  double as_double = 0.0;
  if (auto r = std::from_chars(first, last, as_double); r.ec == std::errc() && r.ptr == last) return as_double;
  return text;
}

}  // namespace

std::vector<double> log_spaced_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) {
    if (points == 1 && lo > 0.0) return {lo};
    throw ConfigError("lambda grid needs 0 < min < max and at least two points");
  }
  std::vector<double> out(points);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < points; ++i) {
    out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  return out;
}

std::vector<double> default_lambda_grid() { return log_spaced_grid(1e-4, 1e4, 17); }

void validate(const ExperimentConfig& c) {
  if (!(c.lambda > 0.0) || !std::isfinite(c.lambda)) throw ConfigError("lambda must be positive and finite");
  if (c.lambda_grid.empty()) throw ConfigError("lambda grid is empty");
  for (std::size_t i = 0; i < c.lambda_grid.size(); ++i) {
    if (!(c.lambda_grid[i] > 0.0) || !std::isfinite(c.lambda_grid[i])) {
      throw ConfigError("lambda grid entries must be positive and finite");
    }
    if (i > 0 && !(c.lambda_grid[i] > c.lambda_grid[i - 1])) {
      throw ConfigError("lambda grid must be strictly increasing");
    }
  }
  c.features.effective_period();  // InvalidPeriod
  if (c.synth_steps < 1) throw ConfigError("synth.steps must be at least 1");
  if (c.synth_feature_dim < 1) throw ConfigError("synth.feature_dim must be positive");
  if (!(c.synth_noise >= 0.0)) throw ConfigError("synth.noise must be nonnegative");
  if (c.ogd_step && !(*c.ogd_step > 0.0)) throw ConfigError("ogd.step must be positive");
  if (!(c.ogd_bound > 0.0)) throw ConfigError("ogd.bound must be positive");
  if (!(c.node_dropout >= 0.0 && c.node_dropout < 1.0)) throw ConfigError("node_dropout must lie in [0, 1)");
  if (!(c.tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  if (c.node_dropout > 0.0 &&
      (c.algorithm == Algorithm::metavaw || c.regularization == RegularizationKind::kronecker)) {
    throw ConfigError("metavaw and kronecker regularization need a time-invariant summing matrix; set node_dropout = 0");
  }
  if (c.output.empty()) throw ConfigError("output directory is empty");
}

ExperimentConfig parse_config_json(std::string_view text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(root, base_dir);
}

ExperimentConfig parse_config_toml(std::string_view text, const std::string& base_dir) {
  std::istringstream in{std::string(text)};
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw ConfigError(std::string("config is not valid TOML: ") + e.what());
  }
  json root = json::object();
  for (const auto& item : items) {
    if (item.name == "--" || item.name == "++" || item.name.empty()) continue;
    for (const auto& v : item.inputs) {
      if (v.find_first_not_of(" \t") != std::string::npos && v[v.find_first_not_of(" \t")] == '{') {
        throw ConfigError("inline table for '" + item.name + "' is not supported; use a [" + item.name + "] section");
      }
    }
    json* target = &root;
    for (const auto& parent : item.parents) {
      if (parent == "default") continue;
      target = &(*target)[parent];
    }
    if (item.inputs.size() == 1 && item.name != "lambda_grid") {
      (*target)[item.name] = infer_scalar(item.inputs.front());
    } else {
      json array = json::array();
      for (const auto& v : item.inputs) array.push_back(infer_scalar(v));
      (*target)[item.name] = array;
    }
  }
  // A [lambda_grid] table with min/max/points arrives as nested keys.
  return from_json(root, base_dir);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::filesystem::path p(path);
  const std::string base = p.parent_path().string();
  if (p.extension() == ".toml") return parse_config_toml(buffer.str(), base.empty() ? "." : base);
  return parse_config_json(buffer.str(), base.empty() ? "." : base);
}

std::string config_to_json(const ExperimentConfig& c) {
  json root;
  root["dataset"] = c.dataset;
  root["hierarchy"] = c.hierarchy;
  root["algorithm"] = std::string(to_string(c.algorithm));
  root["regularization"] = std::string(to_string(c.regularization));
  root["lambda"] = c.lambda;
  root["lambda_grid"] = c.lambda_grid;
  root["features"] = {{"time_index", c.features.time_index},
                      {"seasonal", std::string(seasonality_name(c.features.seasonal))},
                      {"period", c.features.period},
                      {"phase", c.features.phase}};
  root["output"] = c.output;
  root["seed"] = c.seed;
  root["synth"] = {{"steps", c.synth_steps}, {"feature_dim", c.synth_feature_dim}, {"noise", c.synth_noise}};
  root["ogd"] = {{"step", c.ogd_step ? json(*c.ogd_step) : json(nullptr)}, {"bound", c.ogd_bound}};
  root["node_dropout"] = c.node_dropout;
  root["tolerance"] = c.tolerance;
  root["threads"] = c.threads;
  return root.dump(2);
}

}  // namespace multivaw
