#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ansnis/config.hpp"
#include "ansnis/gaussian.hpp"
#include "ansnis/signed_log.hpp"

namespace ansnis {

/// One (method, budget, replication) result.
struct RunRow {
  Method method = Method::ansnis;
  std::size_t dim = 0;
  std::size_t budget = 0;
  std::size_t replication = 0;
  std::uint64_t seed = 0;
  SignedLog mu_hat;
  SignedLog mu_true;
  double rel_error = 0.0;  // NaN when the run failed
  double acceptance_rate = 0.0;
  std::size_t init_samples = 0;
  std::size_t chain_samples = 0;  // retained chain states
  std::int64_t wall_ms = 0;
  std::string error;

  bool failed() const { return !error.empty(); }
};

/// Deterministic row order: dimension, method, budget, replication.
bool row_order(const RunRow& a, const RunRow& b);

using RowSink = std::function<void(const RunRow&)>;

struct RunOptions {
  std::size_t workers = 1;  // 1 runs the serial reference loop
  RowSink sink;             // called once per finished run, in completion order
};

/// Runs one method at one budget; never throws, failures land in RunRow::error.
RunRow run_single(const ExperimentConfig& cfg, const ProblemSpec& spec, Method method,
                  std::size_t budget, std::size_t replication);

/// Every (method, budget, replication) of the config's fixed spec, sorted by row_order.
std::vector<RunRow> run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

ProblemSpec sweep_spec(std::size_t dim, const SweepSettings& sweep);
std::vector<std::size_t> sweep_budgets(std::size_t dim, std::span<const double> factors);

/// Runs the isotropic sweep for each dimension with the dim_sweep budget split.
std::vector<RunRow> dim_sweep(const ExperimentConfig& base, std::span<const std::size_t> dims,
                              const RunOptions& options = {});

struct SummaryRow {
  Method method = Method::ansnis;
  std::size_t dim = 0;
  std::size_t budget = 0;
  std::size_t count = 0;     // successful runs
  std::size_t failures = 0;  // rows with a non-finite rel_error
  double mean_rel_error = 0.0;
  double std_rel_error = 0.0;  // sample std, 0 for a single run
  double median_rel_error = 0.0;
  double mean_acceptance_rate = 0.0;
};

/// Groups by (method, dim, budget).
std::vector<SummaryRow> summarize(std::span<const RunRow> rows);

/// Result rows without wall time, so identical runs give identical bytes.
void write_rows_csv(std::ostream& os, std::span<const RunRow> rows);
void write_timing_csv(std::ostream& os, std::span<const RunRow> rows);
void write_summary_csv(std::ostream& os, std::span<const SummaryRow> rows);
std::vector<RunRow> read_rows_csv(std::istream& is);

enum class MuSource { closed_form, quadrature };

/// Metadata comment line followed by the grid table of the three surfaces.
void emit_grid(std::ostream& os, const ProblemSpec& spec, MuSource source,
               std::size_t resolution, double half_width_sds, const QuadSpec& quad,
               double floor = kDefaultLogFloor);

/// Bounds mean_pi +- half_width_sds * sd_pi for a 2D spec.
std::array<Interval, 2> grid_bounds(const ProblemSpec& spec, double half_width_sds);

}  // namespace ansnis
