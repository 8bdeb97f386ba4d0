#include "ansnis/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <tuple>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "ansnis/random.hpp"
#include "ansnis/rwm.hpp"
#include "ansnis/sampler.hpp"

namespace ansnis {

bool row_order(const RunRow& a, const RunRow& b) {
  return std::tuple(a.dim, a.method, a.budget, a.replication) <
         std::tuple(b.dim, b.method, b.budget, b.replication);
}

namespace {

struct Task {
  Method method;
  std::size_t budget;
  std::size_t replication;
};

AnsnisConfig ansnis_config(const ExperimentConfig& cfg, const ProblemSpec& spec,
                           std::size_t budget, const StepSpec& step) {
  const auto& s = cfg.ansnis;
  const BudgetPlan plan = budget_plan(budget, s.iterations, cfg.budget_mode, s.init_samples);
  AnsnisConfig out;
  out.iterations = s.iterations;
  out.steps = plan.mcmc_n / s.iterations;
  out.remainder = plan.mcmc_n % s.iterations;
  out.burn_in = cfg.burn_in_mult * spec.dim();
  out.step = step;
  out.x0.assign(spec.target.mean().begin(), spec.target.mean().end());
  out.init = s.init_mode == InitSpec::Mode::fixed
                 ? InitSpec::fixed(SignedLog::from_real(s.init_value))
                 : InitSpec::perturbed(plan.init_n, s.init_epsilon);
  out.floor = s.floor;
  out.rule = s.rule;
  return out;
}

std::vector<RunRow> run_tasks(const ExperimentConfig& cfg, const ProblemSpec& spec,
                              const std::vector<Task>& tasks, const RunOptions& options) {
  std::vector<RunRow> rows(tasks.size());
  const auto n = static_cast<std::ptrdiff_t>(tasks.size());
  auto run = [&](std::ptrdiff_t i) {
    const Task& task = tasks[static_cast<std::size_t>(i)];
    rows[static_cast<std::size_t>(i)] =
        run_single(cfg, spec, task.method, task.budget, task.replication);
  };

  if (options.workers <= 1) {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      run(i);
      if (options.sink) {
        options.sink(rows[static_cast<std::size_t>(i)]);
      }
    }
  } else {
    const int threads = static_cast<int>(options.workers);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      run(i);
      if (options.sink) {
#pragma omp critical(ansnis_row_sink)
        options.sink(rows[static_cast<std::size_t>(i)]);
      }
    }
  }
  std::sort(rows.begin(), rows.end(), row_order);
  return rows;
}

}  // namespace

RunRow run_single(const ExperimentConfig& cfg, const ProblemSpec& spec, Method method,
                  std::size_t budget, std::size_t replication) {
  RunRow row;
  row.method = method;
  row.dim = spec.dim();
  row.budget = budget;
  row.replication = replication;
  row.seed = derive_seed(cfg.base_seed, method_id(method), budget, replication);

  const auto started = std::chrono::steady_clock::now();
  try {
    row.mu_true = closed_form_mu(spec);
    Rng rng(row.seed);
    // The AN-SNIS target has no closed-form scales; it reuses pi's.
    const StepSpec step = optimal_step(spec.target.std_devs()).scaled(cfg.ansnis.step_multiplier);
    const std::size_t burn_in = cfg.burn_in_mult * spec.dim();
    std::vector<double> x0(spec.target.mean().begin(), spec.target.mean().end());

    if (method == Method::ansnis) {
      const AnsnisConfig acfg = ansnis_config(cfg, spec, budget, step);
      const AnsnisResult res = run_ansnis(spec, acfg, rng);
      row.mu_hat = res.mu_final;
      row.acceptance_rate = res.acceptance_rate;
      row.init_samples = res.init_samples;
      row.chain_samples = acfg.retained_steps();
    } else {
      const Baseline which =
          method == Method::snis_uisopt ? Baseline::uisopt_pi : Baseline::target_piphi;
      // pi|phi| is Gaussian here, so its own scales are available for the step.
      const StepSpec base_step =
          which == Baseline::uisopt_pi
              ? step
              : optimal_step(product_gaussian(spec.target, spec.testfn).std_devs())
                    .scaled(cfg.ansnis.step_multiplier);
      const BaselineResult res = run_baseline(spec, which, budget + burn_in, burn_in, base_step,
                                              x0, rng, cfg.ansnis.floor);
      row.mu_hat = res.mu;
      row.acceptance_rate = res.acceptance_rate;
      row.chain_samples = res.retained;
    }
    row.rel_error = relative_error(row.mu_hat, row.mu_true);
    if (!std::isfinite(row.rel_error)) {
      row.error = "non-finite estimate";
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  if (row.failed()) {
    row.rel_error = std::numeric_limits<double>::quiet_NaN();
  }
  row.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - started)
                    .count();
  return row;
}

std::vector<RunRow> run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  if (!cfg.spec) {
    throw ConfigError("spec", "run_experiment needs a fixed problem spec");
  }
  std::vector<Task> tasks;
  for (Method m : cfg.methods) {
    for (std::size_t b : cfg.budgets) {
      for (std::size_t r = 0; r < cfg.replications; ++r) {
        tasks.push_back({m, b, r});
      }
    }
  }
  return run_tasks(cfg, *cfg.spec, tasks, options);
}

ProblemSpec sweep_spec(std::size_t dim, const SweepSettings& sweep) {
  const double d = static_cast<double>(dim);
  return {DiagGaussian::isotropic(dim, sweep.target_variance / d),
          DiagGaussian::isotropic(dim, sweep.testfn_variance / d)};
}

std::vector<std::size_t> sweep_budgets(std::size_t dim, std::span<const double> factors) {
  std::vector<std::size_t> budgets;
  const double growth = std::pow(static_cast<double>(dim), 1.5);
  for (double f : factors) {
    budgets.push_back(static_cast<std::size_t>(std::llround(f * growth)));
  }
  return budgets;
}

std::vector<RunRow> dim_sweep(const ExperimentConfig& base, std::span<const std::size_t> dims,
                              const RunOptions& options) {
  if (dims.empty()) {
    throw ConfigError("sweep.dims", "no dimensions given");
  }
  const SweepSettings sweep = base.sweep.value_or(SweepSettings{});
  std::vector<RunRow> all;
  for (std::size_t dim : dims) {
    ExperimentConfig cfg = base;
    cfg.spec = sweep_spec(dim, sweep);
    cfg.budgets = sweep_budgets(dim, sweep.budget_factors);
    cfg.budget_mode = BudgetMode::dim_sweep;
    cfg.validate();
    auto rows = run_experiment(cfg, options);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  std::sort(all.begin(), all.end(), row_order);
  return all;
}

std::vector<SummaryRow> summarize(std::span<const RunRow> rows) {
  std::vector<RunRow> sorted(rows.begin(), rows.end());
  std::sort(sorted.begin(), sorted.end(), row_order);

  std::vector<SummaryRow> out;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    std::vector<double> errors;
    double acceptance = 0.0;
    SummaryRow s;
    s.method = sorted[i].method;
    s.dim = sorted[i].dim;
    s.budget = sorted[i].budget;
    while (j < sorted.size() && sorted[j].method == s.method && sorted[j].dim == s.dim &&
           sorted[j].budget == s.budget) {
      if (std::isfinite(sorted[j].rel_error)) {
        errors.push_back(sorted[j].rel_error);
        acceptance += sorted[j].acceptance_rate;
      } else {
        ++s.failures;
      }
      ++j;
    }
    s.count = errors.size();
    if (errors.empty()) {
      s.mean_rel_error = s.std_rel_error = s.median_rel_error = s.mean_acceptance_rate =
          std::numeric_limits<double>::quiet_NaN();
    } else {
      const double n = static_cast<double>(errors.size());
      double sum = 0.0;
      for (double e : errors) {
        sum += e;
      }
      s.mean_rel_error = sum / n;
      double ss = 0.0;
      for (double e : errors) {
        ss += (e - s.mean_rel_error) * (e - s.mean_rel_error);
      }
      s.std_rel_error = errors.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
      std::sort(errors.begin(), errors.end());
      const std::size_t mid = errors.size() / 2;
      s.median_rel_error =
          errors.size() % 2 == 1 ? errors[mid] : 0.5 * (errors[mid - 1] + errors[mid]);
      s.mean_acceptance_rate = acceptance / n;
    }
    out.push_back(s);
    i = j;
  }
  return out;
}

std::array<Interval, 2> grid_bounds(const ProblemSpec& spec, double half_width_sds) {
  if (spec.dim() != 2) {
    throw std::invalid_argument("grid_bounds: the grid needs a two-dimensional problem");
  }
  const auto sd = spec.target.std_devs();
  std::array<Interval, 2> b{};
  for (std::size_t d = 0; d < 2; ++d) {
    b[d] = {spec.target.mean()[d] - half_width_sds * sd[d],
            spec.target.mean()[d] + half_width_sds * sd[d]};
  }
  return b;
}

void emit_grid(std::ostream& os, const ProblemSpec& spec, MuSource source, std::size_t resolution,
               double half_width_sds, const QuadSpec& quad, double floor) {
  if (spec.dim() != 2) {
    throw std::invalid_argument("emit_grid: the grid needs a two-dimensional problem");
  }
  const SignedLog mu =
      source == MuSource::closed_form ? closed_form_mu(spec) : quadrature_mu(spec, quad);
  const auto table = grid_dump(spec, mu, grid_bounds(spec, half_width_sds), resolution, floor);
  fmt::print(os,
             "# target_mean={},{} target_var={},{} testfn_mean={},{} testfn_var={},{} "
             "phi_scale_log={:.17g} mu_source={} mu_sign={} mu_log_abs={:.17g} mu={:.17g}\n",
             spec.target.mean()[0], spec.target.mean()[1], spec.target.variances()[0],
             spec.target.variances()[1], spec.testfn.mean()[0], spec.testfn.mean()[1],
             spec.testfn.variances()[0], spec.testfn.variances()[1], spec.phi_scale.log_abs,
             source == MuSource::closed_form ? "closed_form" : "quadrature", mu.sign, mu.log_abs,
             mu.to_real());
  write_grid_tsv(os, table);
}

}  // namespace ansnis
