#include "ansnis/quadrature.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace ansnis {

void QuadSpec::validate() const {
  if (per_dim_points < 3 || per_dim_points % 2 == 0) {
    throw std::invalid_argument(
        fmt::format("QuadSpec: per_dim_points must be odd and >= 3, got {}", per_dim_points));
  }
  if (!(half_width_sds >= 6.0)) {
    throw std::invalid_argument("QuadSpec: half_width_sds must be at least 6");
  }
}

namespace {

double node(const Interval& iv, std::size_t i, std::size_t points) {
  const double h = (iv.hi - iv.lo) / static_cast<double>(points - 1);
  return iv.lo + static_cast<double>(i) * h;
}

double end_weight(std::size_t i, std::size_t points) {
  return (i == 0 || i + 1 == points) ? 0.5 : 1.0;
}

std::vector<Interval> target_box(const DiagGaussian& target, const QuadSpec& q) {
  std::vector<Interval> box(target.dim());
  const auto sd = target.std_devs();
  for (std::size_t d = 0; d < box.size(); ++d) {
    box[d] = {target.mean()[d] - q.half_width_sds * sd[d],
              target.mean()[d] + q.half_width_sds * sd[d]};
  }
  return box;
}

void require_tensor_dim(std::size_t dim, const char* what) {
  if (dim == 0 || dim > 2) {
    throw std::invalid_argument(
        fmt::format("{}: tensor quadrature supports D <= 2, got D = {}", what, dim));
  }
}

double spec_phi_real(const ProblemSpec& spec, std::span<const double> x) {
  return phi_eval(spec, x).to_real();
}

}  // namespace

double trapezoid_tensor(const TestFunction& f, std::span<const Interval> box, std::size_t points,
                        Exec exec) {
  require_tensor_dim(box.size(), "trapezoid_tensor");
  if (points < 2) {
    throw std::invalid_argument("trapezoid_tensor: need at least two points per dimension");
  }
  const double h0 = (box[0].hi - box[0].lo) / static_cast<double>(points - 1);

  if (box.size() == 1) {
    double sum = 0.0;
    std::array<double, 1> x{};
    for (std::size_t i = 0; i < points; ++i) {
      x[0] = node(box[0], i, points);
      sum += end_weight(i, points) * f(x);
    }
    return sum * h0;
  }

  const double h1 = (box[1].hi - box[1].lo) / static_cast<double>(points - 1);
  std::vector<double> row_sums(points, 0.0);
  auto row = [&](std::ptrdiff_t i) {
    std::array<double, 2> x{node(box[0], static_cast<std::size_t>(i), points), 0.0};
    double sum = 0.0;
    for (std::size_t j = 0; j < points; ++j) {
      x[1] = node(box[1], j, points);
      sum += end_weight(j, points) * f(x);
    }
    row_sums[static_cast<std::size_t>(i)] = sum;
  };
  const auto n = static_cast<std::ptrdiff_t>(points);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      row(i);
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      row(i);
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    total += end_weight(i, points) * row_sums[i];
  }
  return total * h0 * h1;
}

SignedLog quadrature_mu(const ProblemSpec& spec, const QuadSpec& q, Exec exec) {
  q.validate();
  require_tensor_dim(spec.dim(), "quadrature_mu");
  // Integrate pi * N(.; testfn) and apply phi_scale in log space afterwards.
  const auto integrand = [&](std::span<const double> x) {
    return std::exp(spec.target.log_density(x) + spec.testfn.log_density(x));
  };
  const auto box = target_box(spec.target, q);
  const double integral = trapezoid_tensor(integrand, box, q.per_dim_points, exec);
  return SignedLog::from_real(integral) * spec.phi_scale;
}

SignedLog quadrature_mu(const DiagGaussian& target, const TestFunction& phi, const QuadSpec& q,
                        Exec exec) {
  q.validate();
  require_tensor_dim(target.dim(), "quadrature_mu");
  const auto integrand = [&](std::span<const double> x) {
    return phi(x) * std::exp(target.log_density(x));
  };
  const auto box = target_box(target, q);
  return SignedLog::from_real(trapezoid_tensor(integrand, box, q.per_dim_points, exec));
}

SignedLog quadrature_mu_factorized(const ProblemSpec& spec, const QuadSpec& q) {
  q.validate();
  double log_total = spec.phi_scale.log_abs;
  for (std::size_t d = 0; d < spec.dim(); ++d) {
    const DiagGaussian pi_d({spec.target.mean()[d]}, {spec.target.variances()[d]});
    const DiagGaussian phi_d({spec.testfn.mean()[d]}, {spec.testfn.variances()[d]});
    const auto integrand = [&](std::span<const double> x) {
      return std::exp(pi_d.log_density(x) + phi_d.log_density(x));
    };
    const auto box = target_box(pi_d, q);
    log_total += std::log(trapezoid_tensor(integrand, box, q.per_dim_points, Exec::serial));
  }
  return SignedLog::from_log(log_total, 1);
}

double quadrature_norm_qstar(const ProblemSpec& spec, const SignedLog& mu, const QuadSpec& q,
                             Exec exec) {
  return quadrature_norm_qstar(
      spec.target, [&](std::span<const double> x) { return spec_phi_real(spec, x); },
      mu.to_real(), q, exec);
}

double quadrature_norm_qstar(const DiagGaussian& target, const TestFunction& phi, double mu,
                             const QuadSpec& q, Exec exec) {
  q.validate();
  require_tensor_dim(target.dim(), "quadrature_norm_qstar");
  const auto integrand = [&](std::span<const double> x) {
    return std::fabs(phi(x) - mu) * std::exp(target.log_density(x));
  };
  const auto box = target_box(target, q);
  const double integral = trapezoid_tensor(integrand, box, q.per_dim_points, exec);
  return integral > 0.0 ? std::log(integral) : -std::numeric_limits<double>::infinity();
}

Grid2D surface(const GridTable& table, double GridRow::*column) {
  Grid2D g;
  g.rows = table.resolution;
  g.cols = table.resolution;
  g.values.reserve(table.rows.size());
  for (const GridRow& r : table.rows) {
    g.values.push_back(r.*column);
  }
  return g;
}

std::size_t count_grid_local_maxima(const Grid2D& grid) {
  if (grid.rows < 3 || grid.cols < 3 || grid.values.size() != grid.rows * grid.cols) {
    throw std::invalid_argument("count_grid_local_maxima: need a full grid of at least 3x3");
  }
  std::size_t count = 0;
  for (std::size_t i = 1; i + 1 < grid.rows; ++i) {
    for (std::size_t j = 1; j + 1 < grid.cols; ++j) {
      const double v = grid.at(i, j);
      bool is_max = true;
      for (int di = -1; di <= 1 && is_max; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if ((di != 0 || dj != 0) && !(v > grid.at(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + di),
                                          static_cast<std::size_t>(static_cast<std::ptrdiff_t>(j) + dj)))) {
            is_max = false;
            break;
          }
        }
      }
      count += is_max ? 1 : 0;
    }
  }
  return count;
}

}  // namespace ansnis
