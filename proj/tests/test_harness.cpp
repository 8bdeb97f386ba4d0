#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ansnis/config.hpp"
#include "ansnis/experiment.hpp"
#include "support/reference.hpp"

using namespace ansnis;

namespace {

const std::string kMinimal = R"(
spec:
  target: {variances: [0.012, 0.06]}
  testfn: {variances: [0.12, 0.06]}
methods: [snis_uisopt]
budgets: [100]
)";

std::string config_path(const char* name) { return std::string(ANSNIS_CONFIG_DIR) + "/" + name; }

std::string expect_config_error(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  ADD_FAILURE() << "no ConfigError for:\n" << text;
  return {};
}

std::string rows_csv(const std::vector<RunRow>& rows) {
  std::ostringstream os;
  write_rows_csv(os, rows);
  return os.str();
}

ExperimentConfig small_example1() {
  ExperimentConfig cfg = parse_config(config_path("example1.yaml"));
  cfg.budgets = {2000, 4000};
  cfg.replications = 3;
  cfg.burn_in_mult = 100;
  cfg.ansnis.init_samples = 200;
  return cfg;
}

RunRow row(Method m, std::size_t budget, std::size_t rep, double err) {
  RunRow r;
  r.method = m;
  r.dim = 2;
  r.budget = budget;
  r.replication = rep;
  r.rel_error = err;
  r.acceptance_rate = 0.3;
  if (std::isnan(err)) {
    r.error = "failed";
  }
  return r;
}

}  // namespace

TEST(Config, MinimalGetsDefaults) {
  const auto cfg = parse_config_text(kMinimal);
  EXPECT_EQ(cfg.replications, 30u);
  EXPECT_EQ(cfg.burn_in_mult, 1000u);
  EXPECT_EQ(cfg.ansnis.iterations, 10u);
  EXPECT_EQ(cfg.ansnis.rule.kind, CombinationRule::Kind::equal);
  EXPECT_EQ(cfg.budget_mode, BudgetMode::fixed_init);
  ASSERT_TRUE(cfg.spec.has_value());
  EXPECT_EQ(cfg.spec->target.mean()[0], 0.0);
}

TEST(Config, BudgetsOutOfOrder) {
  std::string text = kMinimal;
  text.replace(text.find("[100]"), 5, "[500, 100]");
  EXPECT_EQ(expect_config_error(text), "budgets");
}

TEST(Config, ErrorsNameTheirKey) {
  EXPECT_EQ(expect_config_error(kMinimal + "bogus: 1\n"), "bogus");
  EXPECT_EQ(expect_config_error(kMinimal + "ansnis: {iterations: 4, wat: 2}\n"), "ansnis.wat");
  EXPECT_EQ(expect_config_error(kMinimal + "replications: 0\n"), "replications");
  EXPECT_EQ(expect_config_error(kMinimal + "ansnis: {combination: power, power_k: 1.5}\n"),
            "ansnis.power_k");
  EXPECT_EQ(expect_config_error(kMinimal + "ansnis: {combination: median}\n"),
            "ansnis.combination");
  EXPECT_EQ(expect_config_error("methods: [ansnis]\nbudgets: [100]\n"), "spec");
  EXPECT_EQ(expect_config_error(R"(
spec:
  target: {variances: [1.0, 1.0]}
  testfn: {variances: [1.0]}
methods: [ansnis]
budgets: [100]
)"),
            "spec.testfn");
  EXPECT_EQ(expect_config_error(R"(
spec:
  target: {variances: [1.0, -1.0]}
  testfn: {variances: [1.0, 1.0]}
methods: [ansnis]
budgets: [100]
)"),
            "spec.target");
  std::string no_methods = kMinimal;
  no_methods.replace(no_methods.find("methods: [snis_uisopt]"), 22, "");
  EXPECT_EQ(expect_config_error(no_methods), "methods");
}

TEST(Config, InfeasibleAnsnisBudget) {
  std::string text = kMinimal;
  text.replace(text.find("[snis_uisopt]"), 13, "[ansnis]");
  text.replace(text.find("[100]"), 5, "[5]");
  EXPECT_EQ(expect_config_error(text), "budgets");
}

TEST(Config, Example1Preset) {
  const auto cfg = parse_config(config_path("example1.yaml"));
  ASSERT_TRUE(cfg.spec.has_value());
  EXPECT_EQ(cfg.spec->target.variances()[0], 0.012);
  EXPECT_EQ(cfg.spec->target.variances()[1], 0.06);
  EXPECT_EQ(cfg.spec->testfn.variances()[0], 0.12);
  EXPECT_EQ(cfg.spec->testfn.variances()[1], 0.06);
  for (std::size_t d = 0; d < 2; ++d) {
    EXPECT_EQ(cfg.spec->target.mean()[d], 0.0);
    EXPECT_EQ(cfg.spec->testfn.mean()[d], 0.0);
  }
  EXPECT_EQ(cfg.budgets, (std::vector<std::size_t>{5000, 15000, 50000}));
  EXPECT_EQ(cfg.replications, 30u);
}

TEST(Config, Example2Preset) {
  const auto cfg = parse_config(config_path("example2.yaml"));
  ASSERT_TRUE(cfg.spec.has_value());
  EXPECT_EQ(cfg.spec->target.variances()[0], 0.05);
  EXPECT_EQ(cfg.spec->target.variances()[1], 0.01);
  EXPECT_EQ(cfg.spec->testfn.variances()[0], 0.005);
  EXPECT_EQ(cfg.spec->testfn.variances()[1], 0.005);
}

TEST(Config, DimsweepPreset) {
  const auto cfg = parse_config(config_path("dimsweep.yaml"));
  ASSERT_TRUE(cfg.sweep.has_value());
  EXPECT_EQ(cfg.sweep->dims, (std::vector<std::size_t>{4, 8, 16, 32}));
  EXPECT_EQ(cfg.replications, 20u);
  EXPECT_EQ(cfg.budget_mode, BudgetMode::dim_sweep);
}

TEST(RunExperiment, CountsRows) {
  ExperimentConfig cfg = parse_config_text(kMinimal);
  cfg.replications = 2;
  const auto rows = run_experiment(cfg);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_FALSE(r.failed()) << r.error;
    EXPECT_EQ(r.chain_samples, 100u);
    EXPECT_GE(r.rel_error, 0.0);
  }
}

TEST(RunExperiment, ByteIdenticalAcrossRunsAndWorkers) {
  const auto cfg = small_example1();
  const auto a = rows_csv(run_experiment(cfg, {1, {}}));
  const auto b = rows_csv(run_experiment(cfg, {1, {}}));
  const auto c = rows_csv(run_experiment(cfg, {3, {}}));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
}

TEST(RunExperiment, SinkSeesEveryRow) {
  const auto cfg = small_example1();
  std::size_t seen = 0;
  const auto rows = run_experiment(cfg, {2, [&](const RunRow&) { ++seen; }});
  EXPECT_EQ(seen, rows.size());
  EXPECT_EQ(rows.size(), 3u * 2u * 3u);
}

TEST(RunExperiment, BudgetAccounting) {
  const auto cfg = small_example1();
  for (const auto& r : run_experiment(cfg)) {
    EXPECT_EQ(r.chain_samples, r.budget) << to_string(r.method);
    EXPECT_EQ(r.init_samples, r.method == Method::ansnis ? 200u : 0u);
  }
}

TEST(RunExperiment, SeedsDependOnRunIdentity) {
  const auto cfg = small_example1();
  const auto rows = run_experiment(cfg);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      EXPECT_NE(rows[i].seed, rows[j].seed);
    }
  }
}

TEST(RunExperiment, RelErrorReproducibleFromCsvColumns) {
  const auto cfg = small_example1();
  std::istringstream in(rows_csv(run_experiment(cfg)));
  const auto rows = read_rows_csv(in);
  ASSERT_FALSE(rows.empty());
  for (const auto& r : rows) {
    EXPECT_NEAR(relative_error(r.mu_hat, r.mu_true), r.rel_error, 1e-12);
    EXPECT_LE(ansnis::testing::rel_diff(r.mu_true.to_real(), ansnis::testing::kMuExample1), 1e-14);
  }
}

TEST(RunSingle, FailureBecomesNaNRow) {
  auto cfg = parse_config_text(kMinimal);
  const auto r = run_single(cfg, *cfg.spec, Method::ansnis, 5, 0);
  EXPECT_TRUE(r.failed());
  EXPECT_TRUE(std::isnan(r.rel_error));
  std::istringstream in(rows_csv({r}));
  const auto back = read_rows_csv(in);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_TRUE(std::isnan(back[0].rel_error));
  EXPECT_FALSE(back[0].error.empty());
}

TEST(Sweep, BudgetsAndSpec) {
  const std::vector<double> f{100, 1000, 10000};
  EXPECT_EQ(sweep_budgets(4, f), (std::vector<std::size_t>{800, 8000, 80000}));
  EXPECT_EQ(sweep_budgets(8, f)[0], 2263u);
  EXPECT_EQ(sweep_budgets(16, f)[0], 6400u);
  EXPECT_EQ(sweep_budgets(32, f)[0], 18102u);
  const auto spec = sweep_spec(4, SweepSettings{});
  for (std::size_t d = 0; d < 4; ++d) {
    EXPECT_EQ(spec.target.variances()[d], 0.125);
    EXPECT_EQ(spec.testfn.variances()[d], 0.025);
    EXPECT_EQ(spec.target.mean()[d], 0.0);
  }
}

TEST(Sweep, RunsEachDimensionWithSplitBudget) {
  auto cfg = parse_config(config_path("dimsweep.yaml"));
  cfg.replications = 1;
  cfg.burn_in_mult = 50;
  cfg.sweep->budget_factors = {100};
  const std::vector<std::size_t> dims{2, 4};
  const auto rows = dim_sweep(cfg, dims);
  ASSERT_EQ(rows.size(), 2u * 3u);
  for (const auto& r : rows) {
    EXPECT_FALSE(r.failed()) << r.error;
    if (r.method == Method::ansnis) {
      EXPECT_EQ(r.init_samples + r.chain_samples, r.budget);
      EXPECT_EQ(r.init_samples, r.budget / 10);
    } else {
      EXPECT_EQ(r.chain_samples, r.budget);
    }
  }
  EXPECT_EQ(rows.front().dim, 2u);
  EXPECT_EQ(rows.back().dim, 4u);
  EXPECT_THROW(dim_sweep(cfg, {}), ConfigError);
}

TEST(Summarize, SingleRowHasZeroStd) {
  const std::vector<RunRow> rows{row(Method::ansnis, 100, 0, 0.25)};
  const auto s = summarize(rows);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].count, 1u);
  EXPECT_EQ(s[0].std_rel_error, 0.0);
  EXPECT_EQ(s[0].mean_rel_error, 0.25);
}

TEST(Summarize, MeanAndSampleStd) {
  const std::vector<RunRow> rows{row(Method::ansnis, 100, 0, 0.1), row(Method::ansnis, 100, 1, 0.3)};
  const auto s = summarize(rows);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_NEAR(s[0].mean_rel_error, 0.2, 1e-15);
  EXPECT_NEAR(s[0].std_rel_error, std::sqrt(0.02), 1e-15);
  EXPECT_NEAR(s[0].median_rel_error, 0.2, 1e-15);
}

TEST(Summarize, FailuresCountedSeparately) {
  const std::vector<RunRow> rows{row(Method::snis_target, 100, 0, 0.1),
                                 row(Method::snis_target, 100, 1, std::nan("")),
                                 row(Method::snis_target, 100, 2, 0.5),
                                 row(Method::snis_target, 200, 0, 0.05)};
  const auto s = summarize(rows);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].count, 2u);
  EXPECT_EQ(s[0].failures, 1u);
  EXPECT_NEAR(s[0].mean_rel_error, 0.3, 1e-15);
  EXPECT_EQ(s[1].budget, 200u);
}

TEST(EmitGrid, Example1RowCountAndSources) {
  const auto spec = ansnis::testing::example1();
  std::ostringstream closed, quad;
  emit_grid(closed, spec, MuSource::closed_form, 101, 6.0, QuadSpec::two_dim());
  emit_grid(quad, spec, MuSource::quadrature, 101, 6.0, QuadSpec::two_dim());

  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line[0], '#');
    std::getline(in, line);  // header
    std::vector<std::array<double, 5>> out;
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      std::array<double, 5> v{};
      for (double& x : v) {
        ls >> x;
      }
      out.push_back(v);
    }
    return out;
  };
  const auto a = parse(closed.str());
  const auto b = parse(quad.str());
  ASSERT_EQ(a.size(), 10201u);
  ASSERT_EQ(b.size(), 10201u);
  double max_rel = 0.0;
  std::size_t argmax_pi = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t c = 0; c < 5; ++c) {
      const double scale = std::max(std::fabs(a[i][c]), 1.0);
      max_rel = std::max(max_rel, std::fabs(a[i][c] - b[i][c]) / scale);
    }
    if (a[i][2] > a[argmax_pi][2]) {
      argmax_pi = i;
    }
  }
  EXPECT_LE(max_rel, 1e-6);
  EXPECT_NEAR(a[argmax_pi][0], 0.0, 1e-12);
  EXPECT_NEAR(a[argmax_pi][1], 0.0, 1e-12);
}

TEST(EmitGrid, RejectsOtherDimensions) {
  const auto spec = sweep_spec(4, SweepSettings{});
  std::ostringstream os;
  EXPECT_THROW(emit_grid(os, spec, MuSource::closed_form, 11, 6.0, QuadSpec::two_dim()),
               std::invalid_argument);
}
