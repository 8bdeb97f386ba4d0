// Experiment driver: preset runs, dimension sweeps, grid dumps and summaries.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "ansnis/config.hpp"
#include "ansnis/experiment.hpp"

namespace fs = std::filesystem;
using namespace ansnis;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
  std::optional<std::string> out_dir;
};

ExperimentConfig load(const std::string& path, const Globals& g) {
  ExperimentConfig cfg = parse_config(path);
  if (g.seed) {
    cfg.base_seed = *g.seed;
  }
  if (g.out_dir) {
    cfg.output_dir = *g.out_dir;
  }
  return cfg;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  }
  return out;
}

// Finished rows are appended to <name>_rows.partial.csv in completion order so
// a long run leaves a trace if interrupted; the sorted files replace it at the end.
std::vector<RunRow> run_with_outputs(const ExperimentConfig& cfg, std::size_t workers,
                                     const std::function<std::vector<RunRow>(const RunOptions&)>& body) {
  const fs::path dir = cfg.output_dir;
  const fs::path partial = dir / (cfg.name + "_rows.partial.csv");
  std::ofstream partial_out = open_out(partial);
  write_rows_csv(partial_out, {});
  partial_out.flush();

  std::mutex mu;
  RunOptions options;
  options.workers = workers;
  options.sink = [&](const RunRow& row) {
    std::lock_guard lock(mu);
    const RunRow one[] = {row};
    std::ostringstream line;
    write_rows_csv(line, one);
    const std::string text = line.str();
    partial_out << text.substr(text.find('\n') + 1);
    partial_out.flush();
    fmt::print(stderr, "{} D={} N={} rep={} rel_error={:.4g}{}\n", to_string(row.method), row.dim,
               row.budget, row.replication, row.rel_error,
               row.failed() ? " error: " + row.error : std::string());
  };

  std::vector<RunRow> rows = body(options);
  const auto summary = summarize(rows);
  {
    auto out = open_out(dir / (cfg.name + "_rows.csv"));
    write_rows_csv(out, rows);
  }
  {
    auto out = open_out(dir / (cfg.name + "_summary.csv"));
    write_summary_csv(out, summary);
  }
  {
    auto out = open_out(dir / (cfg.name + "_timing.csv"));
    write_timing_csv(out, rows);
  }
  partial_out.close();
  fs::remove(partial);
  write_summary_csv(std::cout, summary);
  return rows;
}

std::vector<std::size_t> parse_dims(const std::string& text) {
  std::vector<std::size_t> dims;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto v = std::stoll(item);
    if (v < 1) {
      throw std::invalid_argument(fmt::format("--dims: '{}' is not a positive dimension", item));
    }
    dims.push_back(static_cast<std::size_t>(v));
  }
  return dims;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive nested self-normalized importance sampling experiments"};
  app.require_subcommand(1);

  Globals g;
  app.add_option("--seed", g.seed, "Override the config's base_seed");
  app.add_option("--workers", g.workers, "Parallel replication workers (1 = serial)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "Override the config's output_dir");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run every method, budget and replication of a preset");
  run->add_option("config", config_path, "YAML config file")->required()->check(CLI::ExistingFile);

  std::string dims_text;
  auto* sweep = app.add_subcommand("sweep", "Isotropic dimension sweep");
  sweep->add_option("config", config_path, "YAML config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--dims", dims_text, "Comma-separated dimensions, e.g. 4,8,16,32");

  std::optional<std::size_t> resolution;
  std::string grid_out;
  std::string mu_source = "closed_form";
  auto* grid = app.add_subcommand("grid", "Dump log pi, log pi|phi| and log pi|phi-mu| on a 2D grid");
  grid->add_option("config", config_path, "YAML config file")->required()->check(CLI::ExistingFile);
  grid->add_option("--resolution", resolution, "Points per axis");
  grid->add_option("--out", grid_out, "Output TSV path")->required();
  grid->add_option("--mu-source", mu_source, "closed_form or quadrature")
      ->check(CLI::IsMember({"closed_form", "quadrature"}));

  std::string rows_path;
  auto* summ = app.add_subcommand("summarize", "Summary table of a rows CSV");
  summ->add_option("rows", rows_path, "Rows CSV")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const ExperimentConfig cfg = load(config_path, g);
      run_with_outputs(cfg, g.workers,
                       [&](const RunOptions& o) { return run_experiment(cfg, o); });
    } else if (*sweep) {
      const ExperimentConfig cfg = load(config_path, g);
      std::vector<std::size_t> dims =
          dims_text.empty() ? (cfg.sweep ? cfg.sweep->dims : std::vector<std::size_t>{})
                            : parse_dims(dims_text);
      run_with_outputs(cfg, g.workers, [&](const RunOptions& o) { return dim_sweep(cfg, dims, o); });
    } else if (*grid) {
      const ExperimentConfig cfg = load(config_path, g);
      if (!cfg.spec) {
        throw ConfigError("spec", "the grid needs a fixed two-dimensional spec");
      }
      auto out = open_out(grid_out);
      emit_grid(out, *cfg.spec,
                mu_source == "quadrature" ? MuSource::quadrature : MuSource::closed_form,
                resolution.value_or(cfg.grid.resolution), cfg.grid.half_width_sds, cfg.quad,
                cfg.ansnis.floor);
    } else if (*summ) {
      std::ifstream in(rows_path);
      const auto rows = read_rows_csv(in);
      write_summary_csv(std::cout, summarize(rows));
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
