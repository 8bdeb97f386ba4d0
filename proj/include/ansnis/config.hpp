#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ansnis/estimators.hpp"
#include "ansnis/gaussian.hpp"
#include "ansnis/quadrature.hpp"
#include "ansnis/sampler.hpp"

namespace ansnis {

enum class Method { ansnis, snis_uisopt, snis_target };

const char* to_string(Method m);
Method parse_method(const std::string& name);
/// Chain target of each method, written into result rows next to its name.
const char* proposal_description(Method m);
std::uint64_t method_id(Method m);

struct AnsnisSettings {
  std::size_t iterations = 10;
  double floor = kDefaultLogFloor;
  CombinationRule rule;
  InitSpec::Mode init_mode = InitSpec::Mode::uis_perturbed;
  std::size_t init_samples = kFixedInitSamples;  // fixed_init budget mode only
  std::optional<double> init_epsilon;
  double init_value = 0.0;  // mu_hat^(0) in fixed init mode
  double step_multiplier = 1.0;
};

/// Isotropic dimension sweep: pi ~ N(0, (target_variance / D) I),
/// phi = N(.; 0, (testfn_variance / D) I), budgets round(f * D^1.5).
struct SweepSettings {
  std::vector<std::size_t> dims;
  std::vector<double> budget_factors{100.0, 1000.0, 10000.0};
  double target_variance = 0.5;
  double testfn_variance = 0.1;
};

struct GridSettings {
  std::size_t resolution = 101;
  double half_width_sds = 6.0;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::optional<ProblemSpec> spec;
  std::vector<Method> methods;
  std::vector<std::size_t> budgets;
  std::size_t replications = 30;
  std::uint64_t base_seed = 0;
  std::size_t burn_in_mult = 1000;
  BudgetMode budget_mode = BudgetMode::fixed_init;
  AnsnisSettings ansnis;
  QuadSpec quad = QuadSpec::two_dim();
  GridSettings grid;
  std::string output_dir = "results";
  std::optional<SweepSettings> sweep;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Configuration error tied to a (dotted) key of the config file.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text);

}  // namespace ansnis
