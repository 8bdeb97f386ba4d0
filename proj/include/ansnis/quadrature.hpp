#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ansnis/gaussian.hpp"
#include "ansnis/signed_log.hpp"

namespace ansnis {

/// Trapezoid grid over the box mean_pi +- half_width_sds * sd_pi per coordinate.
struct QuadSpec {
  std::size_t per_dim_points = 401;  // odd, >= 3
  double half_width_sds = 8.0;       // >= 6

  static QuadSpec one_dim() { return {2001, 8.0}; }
  static QuadSpec two_dim() { return {401, 8.0}; }

  void validate() const;
};

using TestFunction = std::function<double(std::span<const double>)>;

/// Tensor trapezoid rule of f over a box of at most two dimensions.
///
/// The parallel path sums each x1-row independently and adds row totals in
/// index order, matching the serial path bit for bit.
double trapezoid_tensor(const TestFunction& f, std::span<const Interval> box, std::size_t points,
                        Exec exec = Exec::parallel);

/// E_pi[phi] by tensor quadrature with normalized pi. D <= 2.
SignedLog quadrature_mu(const ProblemSpec& spec, const QuadSpec& q, Exec exec = Exec::parallel);

/// Same with an arbitrary real test function in place of the spec's phi.
SignedLog quadrature_mu(const DiagGaussian& target, const TestFunction& phi, const QuadSpec& q,
                        Exec exec = Exec::parallel);

/// Product of D one-dimensional quadratures; valid because pi and phi factorize.
SignedLog quadrature_mu_factorized(const ProblemSpec& spec, const QuadSpec& q);

/// log of the integral of pi(x)|phi(x) - mu| (normalized pi), -inf when it vanishes. D <= 2.
double quadrature_norm_qstar(const ProblemSpec& spec, const SignedLog& mu, const QuadSpec& q,
                             Exec exec = Exec::parallel);

double quadrature_norm_qstar(const DiagGaussian& target, const TestFunction& phi, double mu,
                             const QuadSpec& q, Exec exec = Exec::parallel);

/// Dense row-major 2D array of surface values.
struct Grid2D {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

/// One column of a grid dump as a 2D surface (x1 indexes rows).
Grid2D surface(const GridTable& table, double GridRow::*column);

/// Interior points strictly greater than all eight neighbours.
std::size_t count_grid_local_maxima(const Grid2D& grid);

}  // namespace ansnis
