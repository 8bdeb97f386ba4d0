#include "ansnis/sampler.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

namespace ansnis {

void AnsnisConfig::validate(std::size_t dim) const {
  if (iterations == 0) {
    throw std::invalid_argument("AnsnisConfig: iterations must be positive");
  }
  if (steps == 0) {
    throw std::invalid_argument("AnsnisConfig: steps must be positive");
  }
  if (step.dim() != dim || x0.size() != dim) {
    throw std::invalid_argument(
        fmt::format("AnsnisConfig: step and x0 must have dimension {}", dim));
  }
  if (!std::isfinite(floor)) {
    throw std::invalid_argument("AnsnisConfig: floor must be finite");
  }
  if (init.mode == InitSpec::Mode::uis_perturbed && init.samples == 0) {
    throw std::invalid_argument("AnsnisConfig: perturbed initializer needs at least one sample");
  }
}

DiagGaussian perturbed_product_proposal(const ProblemSpec& spec, double epsilon) {
  const DiagGaussian product = product_gaussian(spec.target, spec.testfn);
  std::vector<double> mean(product.mean().begin(), product.mean().end());
  std::vector<double> var(product.variances().begin(), product.variances().end());
  for (std::size_t d = 0; d < mean.size(); ++d) {
    mean[d] += epsilon;
    var[d] += epsilon;
  }
  return {std::move(mean), std::move(var)};
}

SignedLog init_estimate(const ProblemSpec& spec, const InitSpec& init, Rng& rng) {
  if (init.mode == InitSpec::Mode::fixed) {
    return init.value;
  }
  if (init.samples == 0) {
    throw std::invalid_argument("init_estimate: perturbed initializer needs samples");
  }
  const double eps = init.epsilon.value_or(0.05 / static_cast<double>(spec.dim()));
  const DiagGaussian q0 = perturbed_product_proposal(spec, eps);
  const auto sd = q0.std_devs();

  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(spec.dim());
  std::vector<UisSample> draws;
  draws.reserve(init.samples);
  for (std::size_t i = 0; i < init.samples; ++i) {
    for (std::size_t d = 0; d < x.size(); ++d) {
      x[d] = q0.mean()[d] + sd[d] * normal(rng);
    }
    draws.push_back({q0.log_density(x), log_target_normalized(spec, x), phi_eval(spec, x)});
  }
  return uis_estimate(draws);
}

namespace {

double iteration_ess(std::span<const WeightedSample> samples, std::vector<double>& scratch) {
  scratch.resize(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    scratch[i] = samples[i].log_weight;
  }
  return ess(scratch);
}

}  // namespace

AnsnisResult run_ansnis(const ProblemSpec& spec, const AnsnisConfig& cfg, Rng& rng) {
  cfg.validate(spec.dim());

  AnsnisResult result;
  result.mu_init = init_estimate(spec, cfg.init, rng);
  result.init_samples = cfg.init.consumed();

  SignedLog center = result.mu_init;
  RandomWalkMetropolis kernel(SnisTarget(spec, center, cfg.floor), cfg.step);
  auto state = kernel.start(cfg.x0);
  kernel.advance(state, cfg.burn_in, rng);

  std::vector<WeightedSample> samples;
  samples.reserve(cfg.steps + cfg.remainder);
  std::vector<double> scratch;
  std::vector<SignedLog> kept;
  std::vector<double> kept_ess;

  for (std::size_t t = 1; t <= cfg.iterations; ++t) {
    if (t > 1) {
      kernel.retarget(SnisTarget(spec, center, cfg.floor), state);
    }
    const std::size_t n = cfg.steps + (t == cfg.iterations ? cfg.remainder : 0);
    const std::size_t accepted_before = state.accepted;

    samples.clear();
    kernel.advance(state, n, rng, [&](const auto& s) {
      samples.push_back({kernel.target().log_weight(s.point), s.point.phi});
    });

    IterationRecord rec;
    rec.t = t;
    rec.samples_used = n;
    rec.acceptance_rate =
        static_cast<double>(state.accepted - accepted_before) / static_cast<double>(n);
    rec.mu = snis_estimate(samples);
    rec.ess = iteration_ess(samples, scratch);
    rec.degenerate = rec.ess < kMinIterationEss;
    if (!rec.degenerate) {
      center = rec.mu;
      kept.push_back(rec.mu);
      kept_ess.push_back(rec.ess);
    }
    result.records.push_back(rec);
  }

  if (kept.empty()) {
    throw DegenerateRun("run_ansnis: every iteration was degenerate");
  }
  result.mu_final = combine_estimates(kept, cfg.rule, std::span<const double>(kept_ess));
  result.acceptance_rate = state.acceptance_rate();
  result.chain_steps = state.proposed;
  result.target_evaluations = kernel.evaluations();
  return result;
}

BaselineResult run_baseline(const ProblemSpec& spec, Baseline which, std::size_t n,
                            std::size_t burn_in, const StepSpec& step, std::vector<double> x0,
                            Rng& rng, double floor) {
  if (n <= burn_in) {
    throw std::invalid_argument("run_baseline: chain length must exceed burn-in");
  }
  const SnisTarget target = which == Baseline::uisopt_pi
                                ? SnisTarget(spec)
                                : SnisTarget(spec, SignedLog::zero(), floor);
  RandomWalkMetropolis kernel(target, step);
  auto state = kernel.start(std::move(x0));
  kernel.advance(state, burn_in, rng);

  std::vector<WeightedSample> samples;
  samples.reserve(n - burn_in);
  kernel.advance(state, n - burn_in, rng, [&](const auto& s) {
    samples.push_back({target.log_weight(s.point), s.point.phi});
  });

  std::vector<double> scratch;
  BaselineResult out;
  out.mu = snis_estimate(samples);
  out.ess = iteration_ess(samples, scratch);
  out.acceptance_rate = state.acceptance_rate();
  out.retained = samples.size();
  return out;
}

BudgetPlan budget_plan(std::size_t total_n, std::size_t iterations, BudgetMode mode,
                       std::size_t fixed_init_n) {
  if (iterations == 0) {
    throw std::invalid_argument("budget_plan: iterations must be positive");
  }
  BudgetPlan plan{};
  if (mode == BudgetMode::dim_sweep) {
    plan.init_n = total_n / 10;
    plan.mcmc_n = total_n - plan.init_n;
    if (plan.init_n == 0) {
      throw std::invalid_argument(
          fmt::format("budget_plan: budget {} leaves no initializer samples", total_n));
    }
  } else {
    plan.init_n = fixed_init_n;
    plan.mcmc_n = total_n;
  }
  if (plan.mcmc_n < iterations) {
    throw std::invalid_argument(fmt::format(
        "budget_plan: chain budget {} cannot cover {} iterations", plan.mcmc_n, iterations));
  }
  return plan;
}

}  // namespace ansnis
