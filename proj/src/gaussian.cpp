#include "ansnis/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace ansnis {

namespace {

double gaussian_log_normalizer(std::span<const double> variances) {
  double acc = 0.0;
  for (double v : variances) {
    acc += std::log(2.0 * std::numbers::pi * v);
  }
  return -0.5 * acc;
}

void require_dim(std::span<const double> x, std::size_t dim) {
  if (x.size() != dim) {
    throw std::invalid_argument(
        fmt::format("point has {} coordinates, model has {}", x.size(), dim));
  }
}

}  // namespace

DiagGaussian::DiagGaussian(std::vector<double> mean, std::vector<double> variances)
    : mean_(std::move(mean)), variances_(std::move(variances)) {
  if (mean_.empty()) {
    throw std::invalid_argument("DiagGaussian: dimension must be positive");
  }
  if (mean_.size() != variances_.size()) {
    throw std::invalid_argument("DiagGaussian: mean and variances differ in length");
  }
  for (double v : variances_) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("DiagGaussian: variances must be finite and positive");
    }
  }
  for (double m : mean_) {
    if (!std::isfinite(m)) {
      throw std::invalid_argument("DiagGaussian: mean must be finite");
    }
  }
  log_normalizer_ = gaussian_log_normalizer(variances_);
}

DiagGaussian DiagGaussian::isotropic(std::size_t dim, double variance, double mean) {
  return {std::vector<double>(dim, mean), std::vector<double>(dim, variance)};
}

std::vector<double> DiagGaussian::std_devs() const {
  std::vector<double> sds(variances_.size());
  std::transform(variances_.begin(), variances_.end(), sds.begin(),
                 [](double v) { return std::sqrt(v); });
  return sds;
}

double DiagGaussian::log_density(std::span<const double> x) const {
  require_dim(x, dim());
  double quad = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double r = x[d] - mean_[d];
    quad += r * r / variances_[d];
  }
  return log_normalizer_ - 0.5 * quad;
}

DiagGaussian product_gaussian(const DiagGaussian& a, const DiagGaussian& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("product_gaussian: dimension mismatch");
  }
  std::vector<double> mean(a.dim());
  std::vector<double> var(a.dim());
  for (std::size_t d = 0; d < a.dim(); ++d) {
    const double va = a.variances()[d];
    const double vb = b.variances()[d];
    const double precision = 1.0 / va + 1.0 / vb;
    var[d] = 1.0 / precision;
    mean[d] = (a.mean()[d] / va + b.mean()[d] / vb) / precision;
  }
  return {std::move(mean), std::move(var)};
}

ProblemSpec::ProblemSpec(DiagGaussian target_, DiagGaussian testfn_, SignedLog phi_scale_,
                         double target_log_offset_)
    : target(std::move(target_)),
      testfn(std::move(testfn_)),
      phi_scale(phi_scale_),
      target_log_offset(target_log_offset_) {
  if (target.dim() != testfn.dim()) {
    throw std::invalid_argument("ProblemSpec: target and test function dimensions differ");
  }
  if (phi_scale.sign != 1 || !std::isfinite(phi_scale.log_abs)) {
    throw std::invalid_argument("ProblemSpec: phi_scale must be finite and positive");
  }
  if (!std::isfinite(target_log_offset)) {
    throw std::invalid_argument("ProblemSpec: target_log_offset must be finite");
  }
}

double log_unnorm_target(const ProblemSpec& spec, std::span<const double> x) {
  return spec.target.log_density(x) + spec.target_log_offset;
}

double log_target_normalized(const ProblemSpec& spec, std::span<const double> x) {
  return spec.target.log_density(x);
}

SignedLog phi_eval(const ProblemSpec& spec, std::span<const double> x) {
  return SignedLog::from_log(spec.testfn.log_density(x) + spec.phi_scale.log_abs, 1);
}

SignedLog closed_form_mu(const ProblemSpec& spec) {
  std::vector<double> var(spec.dim());
  for (std::size_t d = 0; d < spec.dim(); ++d) {
    var[d] = spec.target.variances()[d] + spec.testfn.variances()[d];
  }
  const DiagGaussian convolved({spec.target.mean().begin(), spec.target.mean().end()},
                               std::move(var));
  return SignedLog::from_log(convolved.log_density(spec.testfn.mean()) + spec.phi_scale.log_abs,
                             1);
}

double log_opt_snis(const ProblemSpec& spec, const SignedLog& mu_hat, std::span<const double> x,
                    double floor) {
  const SignedLog gap = phi_eval(spec, x) - mu_hat;
  return log_unnorm_target(spec, x) + std::max(abs_log(gap), floor);
}

GridTable grid_dump(const ProblemSpec& spec, const SignedLog& mu,
                    const std::array<Interval, 2>& bounds, std::size_t resolution, double floor,
                    Exec exec) {
  if (spec.dim() != 2) {
    throw std::invalid_argument("grid_dump: only two-dimensional problems can be gridded");
  }
  if (resolution < 2) {
    throw std::invalid_argument("grid_dump: resolution must be at least 2");
  }
  const auto n = static_cast<std::ptrdiff_t>(resolution);
  const double h1 = (bounds[0].hi - bounds[0].lo) / static_cast<double>(resolution - 1);
  const double h2 = (bounds[1].hi - bounds[1].lo) / static_cast<double>(resolution - 1);

  GridTable table;
  table.resolution = resolution;
  table.rows.resize(resolution * resolution);

  auto fill_row = [&](std::ptrdiff_t i) {
    std::array<double, 2> x{bounds[0].lo + static_cast<double>(i) * h1, 0.0};
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      x[1] = bounds[1].lo + static_cast<double>(j) * h2;
      GridRow& row = table.rows[static_cast<std::size_t>(i * n + j)];
      row.x1 = x[0];
      row.x2 = x[1];
      row.log_pi = log_unnorm_target(spec, x);
      row.log_pi_abs_phi = log_opt_snis(spec, SignedLog::zero(), x, floor);
      row.log_opt_snis = log_opt_snis(spec, mu, x, floor);
    }
  };

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      fill_row(i);
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      fill_row(i);
    }
  }

  double max_pi = -std::numeric_limits<double>::infinity();
  double max_piphi = max_pi;
  double max_opt = max_pi;
  for (const GridRow& r : table.rows) {
    max_pi = std::max(max_pi, r.log_pi);
    max_piphi = std::max(max_piphi, r.log_pi_abs_phi);
    max_opt = std::max(max_opt, r.log_opt_snis);
  }
  for (GridRow& r : table.rows) {
    r.log_pi -= max_pi;
    r.log_pi_abs_phi -= max_piphi;
    r.log_opt_snis -= max_opt;
  }
  return table;
}

void write_grid_tsv(std::ostream& os, const GridTable& grid) {
  os << "x1\tx2\tlog_pi\tlog_pi_abs_phi\tlog_pi_abs_phi_minus_mu\n";
  for (const GridRow& r : grid.rows) {
    fmt::print(os, "{:.17g}\t{:.17g}\t{:.17g}\t{:.17g}\t{:.17g}\n", r.x1, r.x2, r.log_pi,
               r.log_pi_abs_phi, r.log_opt_snis);
  }
}

}  // namespace ansnis
