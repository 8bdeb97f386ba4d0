#include "ansnis/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace ansnis {

const char* to_string(Method m) {
  switch (m) {
    case Method::ansnis:
      return "ansnis";
    case Method::snis_uisopt:
      return "snis_uisopt";
    case Method::snis_target:
      return "snis_target";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  for (auto m : {Method::ansnis, Method::snis_uisopt, Method::snis_target}) {
    if (name == to_string(m)) {
      return m;
    }
  }
  throw std::invalid_argument(fmt::format("unknown method '{}'", name));
}

const char* proposal_description(Method m) {
  switch (m) {
    case Method::ansnis:
      return "pi*|phi-mu_hat|";
    case Method::snis_uisopt:
      return "pi";
    case Method::snis_target:
      return "pi*|phi|";
  }
  return "?";
}

std::uint64_t method_id(Method m) { return static_cast<std::uint64_t>(m) + 1; }

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::runtime_error(fmt::format("config key '{}': {}", key, message)), key_(std::move(key)) {}

namespace {

std::string join_key(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void require_map(const YAML::Node& node, const std::string& key) {
  if (!node.IsMap()) {
    throw ConfigError(key.empty() ? "<root>" : key, "expected a mapping");
  }
}

void reject_unknown(const YAML::Node& node, const std::string& prefix,
                    std::initializer_list<const char*> allowed) {
  const std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!known.contains(key)) {
      throw ConfigError(join_key(prefix, key), "unknown key");
    }
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(key, "value has the wrong type");
  }
}

template <class T>
std::vector<T> sequence(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) {
    throw ConfigError(key, "expected a list");
  }
  std::vector<T> out;
  for (const auto& item : node) {
    out.push_back(scalar<T>(item, key));
  }
  return out;
}

std::size_t count(const YAML::Node& node, const std::string& key) {
  const auto v = scalar<long long>(node, key);
  if (v < 0) {
    throw ConfigError(key, "must be non-negative");
  }
  return static_cast<std::size_t>(v);
}

DiagGaussian parse_gaussian(const YAML::Node& node, const std::string& key) {
  require_map(node, key);
  reject_unknown(node, key, {"mean", "variances"});
  if (!node["variances"]) {
    throw ConfigError(join_key(key, "variances"), "missing required field");
  }
  auto var = sequence<double>(node["variances"], join_key(key, "variances"));
  std::vector<double> mean(var.size(), 0.0);
  if (node["mean"]) {
    mean = sequence<double>(node["mean"], join_key(key, "mean"));
  }
  try {
    return {std::move(mean), std::move(var)};
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
}

ProblemSpec parse_spec(const YAML::Node& node) {
  require_map(node, "spec");
  reject_unknown(node, "spec", {"target", "testfn", "phi_scale"});
  if (!node["target"]) {
    throw ConfigError("spec.target", "missing required field");
  }
  if (!node["testfn"]) {
    throw ConfigError("spec.testfn", "missing required field");
  }
  auto target = parse_gaussian(node["target"], "spec.target");
  auto testfn = parse_gaussian(node["testfn"], "spec.testfn");
  double scale = 1.0;
  if (node["phi_scale"]) {
    scale = scalar<double>(node["phi_scale"], "spec.phi_scale");
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw ConfigError("spec.phi_scale", "must be finite and positive");
    }
  }
  if (target.dim() != testfn.dim()) {
    throw ConfigError("spec.testfn", "dimension differs from spec.target");
  }
  return {std::move(target), std::move(testfn), SignedLog::from_real(scale)};
}

void parse_ansnis(const YAML::Node& node, AnsnisSettings& s) {
  require_map(node, "ansnis");
  reject_unknown(node, "ansnis",
                 {"iterations", "floor", "combination", "power_k", "init", "step_multiplier"});
  if (node["iterations"]) {
    s.iterations = count(node["iterations"], "ansnis.iterations");
  }
  if (node["floor"]) {
    s.floor = scalar<double>(node["floor"], "ansnis.floor");
  }
  if (node["combination"]) {
    try {
      s.rule.kind = parse_combination_kind(scalar<std::string>(node["combination"],
                                                               "ansnis.combination"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("ansnis.combination", e.what());
    }
  }
  if (node["power_k"]) {
    s.rule.k = scalar<double>(node["power_k"], "ansnis.power_k");
  }
  if (node["step_multiplier"]) {
    s.step_multiplier = scalar<double>(node["step_multiplier"], "ansnis.step_multiplier");
  }
  if (const auto init = node["init"]) {
    require_map(init, "ansnis.init");
    reject_unknown(init, "ansnis.init", {"mode", "samples", "epsilon", "value"});
    if (init["mode"]) {
      const auto mode = scalar<std::string>(init["mode"], "ansnis.init.mode");
      if (mode == "uis_perturbed") {
        s.init_mode = InitSpec::Mode::uis_perturbed;
      } else if (mode == "fixed") {
        s.init_mode = InitSpec::Mode::fixed;
      } else {
        throw ConfigError("ansnis.init.mode", "expected 'uis_perturbed' or 'fixed'");
      }
    }
    if (init["samples"]) {
      s.init_samples = count(init["samples"], "ansnis.init.samples");
    }
    if (init["epsilon"]) {
      s.init_epsilon = scalar<double>(init["epsilon"], "ansnis.init.epsilon");
    }
    if (init["value"]) {
      s.init_value = scalar<double>(init["value"], "ansnis.init.value");
    }
  }
}

SweepSettings parse_sweep(const YAML::Node& node) {
  require_map(node, "sweep");
  reject_unknown(node, "sweep", {"dims", "budget_factors", "target_variance", "testfn_variance"});
  SweepSettings s;
  if (node["dims"]) {
    for (double d : sequence<double>(node["dims"], "sweep.dims")) {
      if (!(d >= 1.0) || d != std::floor(d)) {
        throw ConfigError("sweep.dims", "dimensions must be positive integers");
      }
      s.dims.push_back(static_cast<std::size_t>(d));
    }
  }
  if (node["budget_factors"]) {
    s.budget_factors = sequence<double>(node["budget_factors"], "sweep.budget_factors");
  }
  if (node["target_variance"]) {
    s.target_variance = scalar<double>(node["target_variance"], "sweep.target_variance");
  }
  if (node["testfn_variance"]) {
    s.testfn_variance = scalar<double>(node["testfn_variance"], "sweep.testfn_variance");
  }
  return s;
}

ExperimentConfig from_yaml(const YAML::Node& root) {
  require_map(root, "");
  reject_unknown(root, "",
                 {"name", "spec", "methods", "budgets", "replications", "base_seed",
                  "burn_in_mult", "budget_mode", "ansnis", "quadrature", "grid", "output_dir",
                  "sweep"});
  ExperimentConfig cfg;
  if (root["name"]) {
    cfg.name = scalar<std::string>(root["name"], "name");
  }
  if (root["spec"]) {
    cfg.spec = parse_spec(root["spec"]);
  }
  if (root["sweep"]) {
    cfg.sweep = parse_sweep(root["sweep"]);
  }
  if (!root["methods"]) {
    throw ConfigError("methods", "missing required field");
  }
  for (const auto& name : sequence<std::string>(root["methods"], "methods")) {
    try {
      cfg.methods.push_back(parse_method(name));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("methods", e.what());
    }
  }
  if (root["budgets"]) {
    for (double b : sequence<double>(root["budgets"], "budgets")) {
      if (!(b >= 1.0) || b != std::floor(b)) {
        throw ConfigError("budgets", "budgets must be positive integers");
      }
      cfg.budgets.push_back(static_cast<std::size_t>(b));
    }
  }
  if (root["replications"]) {
    cfg.replications = count(root["replications"], "replications");
  }
  if (root["base_seed"]) {
    cfg.base_seed = scalar<std::uint64_t>(root["base_seed"], "base_seed");
  }
  if (root["burn_in_mult"]) {
    cfg.burn_in_mult = count(root["burn_in_mult"], "burn_in_mult");
  }
  if (root["budget_mode"]) {
    const auto mode = scalar<std::string>(root["budget_mode"], "budget_mode");
    if (mode == "fixed_init") {
      cfg.budget_mode = BudgetMode::fixed_init;
    } else if (mode == "dim_sweep") {
      cfg.budget_mode = BudgetMode::dim_sweep;
    } else {
      throw ConfigError("budget_mode", "expected 'fixed_init' or 'dim_sweep'");
    }
  }
  if (root["ansnis"]) {
    parse_ansnis(root["ansnis"], cfg.ansnis);
  }
  if (const auto q = root["quadrature"]) {
    require_map(q, "quadrature");
    reject_unknown(q, "quadrature", {"points", "half_width_sds"});
    if (q["points"]) {
      cfg.quad.per_dim_points = count(q["points"], "quadrature.points");
    }
    if (q["half_width_sds"]) {
      cfg.quad.half_width_sds = scalar<double>(q["half_width_sds"], "quadrature.half_width_sds");
    }
  }
  if (const auto g = root["grid"]) {
    require_map(g, "grid");
    reject_unknown(g, "grid", {"resolution", "half_width_sds"});
    if (g["resolution"]) {
      cfg.grid.resolution = count(g["resolution"], "grid.resolution");
    }
    if (g["half_width_sds"]) {
      cfg.grid.half_width_sds = scalar<double>(g["half_width_sds"], "grid.half_width_sds");
    }
  }
  if (root["output_dir"]) {
    cfg.output_dir = scalar<std::string>(root["output_dir"], "output_dir");
  }
  cfg.validate();
  return cfg;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!spec && !sweep) {
    throw ConfigError("spec", "missing required field");
  }
  if (methods.empty()) {
    throw ConfigError("methods", "at least one method is required");
  }
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (std::count(methods.begin(), methods.end(), methods[i]) > 1) {
      throw ConfigError("methods", fmt::format("'{}' listed twice", to_string(methods[i])));
    }
  }
  if (!sweep && budgets.empty()) {
    throw ConfigError("budgets", "missing required field");
  }
  for (std::size_t i = 1; i < budgets.size(); ++i) {
    if (budgets[i] <= budgets[i - 1]) {
      throw ConfigError("budgets", "budgets must be strictly increasing");
    }
  }
  if (replications < 1) {
    throw ConfigError("replications", "must be at least 1");
  }
  if (ansnis.iterations < 1) {
    throw ConfigError("ansnis.iterations", "must be at least 1");
  }
  if (!std::isfinite(ansnis.floor)) {
    throw ConfigError("ansnis.floor", "must be finite");
  }
  if (ansnis.rule.kind == CombinationRule::Kind::power && !(ansnis.rule.k >= 2.0)) {
    throw ConfigError("ansnis.power_k", "must be at least 2");
  }
  if (!(ansnis.step_multiplier > 0.0)) {
    throw ConfigError("ansnis.step_multiplier", "must be positive");
  }
  if (ansnis.init_mode == InitSpec::Mode::uis_perturbed &&
      budget_mode == BudgetMode::fixed_init && ansnis.init_samples == 0) {
    throw ConfigError("ansnis.init.samples", "perturbed initializer needs samples");
  }
  try {
    quad.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("quadrature", e.what());
  }
  if (grid.resolution < 3) {
    throw ConfigError("grid.resolution", "must be at least 3");
  }
  const bool has_ansnis = std::find(methods.begin(), methods.end(), Method::ansnis) != methods.end();
  if (has_ansnis) {
    for (std::size_t b : budgets) {
      try {
        budget_plan(b, ansnis.iterations, budget_mode, ansnis.init_samples);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("budgets", e.what());
      }
    }
  }
  if (sweep) {
    if (sweep->budget_factors.empty()) {
      throw ConfigError("sweep.budget_factors", "at least one factor is required");
    }
    if (!(sweep->target_variance > 0.0) || !(sweep->testfn_variance > 0.0)) {
      throw ConfigError("sweep", "variances must be positive");
    }
  }
}

ExperimentConfig parse_config_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("<root>", fmt::format("malformed YAML: {}", e.what()));
  }
  return from_yaml(root);
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error(fmt::format("cannot open config file '{}'", path.string()));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

}  // namespace ansnis
