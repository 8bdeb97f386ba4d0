#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ansnis/estimators.hpp"
#include "ansnis/gaussian.hpp"
#include "ansnis/random.hpp"
#include "ansnis/rwm.hpp"
#include "ansnis/signed_log.hpp"

namespace ansnis {

/// What a chain state caches: log pi~(x) and phi(x).
struct PointEval {
  double log_target;
  SignedLog phi;
};

/// Chain target pi~(x) |phi(x) - c| for a centering c, or pi~ alone.
///
/// With a centering the log-density is log pi~ + max(log|phi - c|, floor);
/// this is the optimal SNIS proposal for c = mu and the optimal UIS proposal
/// pi~|phi| for c = 0. The importance weight of a cached point with respect to
/// pi~ needs no density evaluation.
class SnisTarget {
 public:
  using point_type = PointEval;

  /// Plain target pi~.
  explicit SnisTarget(const ProblemSpec& spec) : spec_(&spec) {}
  SnisTarget(const ProblemSpec& spec, SignedLog center, double floor)
      : spec_(&spec), center_(center), floor_(floor) {}

  PointEval evaluate(std::span<const double> x) const {
    return {log_unnorm_target(*spec_, x), phi_eval(*spec_, x)};
  }

  double log_density(const PointEval& p) const {
    return center_ ? p.log_target + std::max(abs_log(p.phi - *center_), floor_) : p.log_target;
  }

  /// log(pi~(x) / target(x)).
  double log_weight(const PointEval& p) const {
    return center_ ? ansnis_log_weight(p.phi, *center_, floor_) : 0.0;
  }

 private:
  const ProblemSpec* spec_;
  std::optional<SignedLog> center_;
  double floor_ = kDefaultLogFloor;
};

/// How the initial centering estimate mu_hat^(0) is obtained.
struct InitSpec {
  enum class Mode { uis_perturbed, fixed };
  Mode mode = Mode::uis_perturbed;
  std::size_t samples = 1000;
  std::optional<double> epsilon;  // default 0.05 / D
  SignedLog value;                // fixed mode only

  static InitSpec perturbed(std::size_t n, std::optional<double> eps = {}) {
    return {Mode::uis_perturbed, n, eps, SignedLog::zero()};
  }
  static InitSpec fixed(SignedLog v) { return {Mode::fixed, 0, std::nullopt, v}; }

  std::size_t consumed() const { return mode == Mode::fixed ? 0 : samples; }
};

/// Parameters of one adaptive nested SNIS run.
///
/// Iteration 1 runs burn_in + steps transitions and keeps the last `steps`;
/// iterations 2..T keep all `steps` transitions, and the last iteration runs
/// `remainder` extra ones. Total transitions: burn_in + T * steps + remainder.
struct AnsnisConfig {
  std::size_t iterations = 10;
  std::size_t steps = 1000;
  std::size_t burn_in = 0;
  std::size_t remainder = 0;
  StepSpec step{std::vector<double>{1.0}};
  std::vector<double> x0;
  InitSpec init;
  double floor = kDefaultLogFloor;
  CombinationRule rule;

  void validate(std::size_t dim) const;
  std::size_t retained_steps() const { return iterations * steps + remainder; }
  std::size_t total_steps() const { return burn_in + retained_steps(); }
};

struct IterationRecord {
  std::size_t t = 0;
  SignedLog mu;  // mu_hat^(t)
  double acceptance_rate = 0.0;
  double ess = 0.0;
  std::size_t samples_used = 0;
  bool degenerate = false;  // ESS < 2: left out of the combination
};

struct AnsnisResult {
  SignedLog mu_init;
  std::vector<IterationRecord> records;
  SignedLog mu_final;
  double acceptance_rate = 0.0;  // over every transition, burn-in included
  std::size_t init_samples = 0;
  std::size_t chain_steps = 0;
  std::size_t target_evaluations = 0;  // includes the one at x0
};

/// Raised when every iteration of a run was degenerate.
class DegenerateRun : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Minimum per-iteration ESS for an estimate to enter the combination.
inline constexpr double kMinIterationEss = 2.0;

/// Proposal of the initializer: |phi| pi with every mean and variance shifted by epsilon.
DiagGaussian perturbed_product_proposal(const ProblemSpec& spec, double epsilon);

/// mu_hat^(0): the fixed value, or a UIS estimate from i.i.d. draws of the
/// perturbed |phi| pi proposal.
SignedLog init_estimate(const ProblemSpec& spec, const InitSpec& init, Rng& rng);

AnsnisResult run_ansnis(const ProblemSpec& spec, const AnsnisConfig& cfg, Rng& rng);

enum class Baseline {
  uisopt_pi,     // SNIS-UISOPT: chain on pi, unit weights
  target_piphi,  // SNIS-TARGET: chain on pi|phi|, weights 1/|phi|
};

struct BaselineResult {
  SignedLog mu;
  double acceptance_rate = 0.0;
  double ess = 0.0;
  std::size_t retained = 0;
};

/// One RWM chain of n transitions, the first burn_in of which are discarded.
BaselineResult run_baseline(const ProblemSpec& spec, Baseline which, std::size_t n,
                            std::size_t burn_in, const StepSpec& step, std::vector<double> x0,
                            Rng& rng, double floor = kDefaultLogFloor);

enum class BudgetMode {
  fixed_init,  // initializer draws come on top of the chain budget
  dim_sweep,   // initializer takes 10% of the budget
};

struct BudgetPlan {
  std::size_t init_n;
  std::size_t mcmc_n;
};

inline constexpr std::size_t kFixedInitSamples = 1000;

/// Splits a total sample budget between initializer and chain. Throws
/// std::invalid_argument when the chain share cannot give each of the
/// `iterations` a retained state, or the sweep split leaves no initializer draw.
BudgetPlan budget_plan(std::size_t total_n, std::size_t iterations, BudgetMode mode,
                       std::size_t fixed_init_n = kFixedInitSamples);

}  // namespace ansnis
