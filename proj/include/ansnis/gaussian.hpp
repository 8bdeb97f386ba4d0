#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "ansnis/signed_log.hpp"

namespace ansnis {

/// Gaussian with diagonal covariance. Immutable once built.
class DiagGaussian {
 public:
  /// Throws std::invalid_argument on empty input, length mismatch or a
  /// non-positive variance.
  DiagGaussian(std::vector<double> mean, std::vector<double> variances);

  static DiagGaussian isotropic(std::size_t dim, double variance, double mean = 0.0);

  std::size_t dim() const { return mean_.size(); }
  std::span<const double> mean() const { return mean_; }
  std::span<const double> variances() const { return variances_; }
  std::vector<double> std_devs() const;

  /// Normalized log-density at x.
  double log_density(std::span<const double> x) const;

  /// -0.5 * sum_d log(2 pi var_d).
  double log_normalizer() const { return log_normalizer_; }

  friend bool operator==(const DiagGaussian&, const DiagGaussian&) = default;

 private:
  std::vector<double> mean_;
  std::vector<double> variances_;
  double log_normalizer_ = 0.0;
};

/// Normalized Gaussian proportional to the pointwise product a(x) b(x).
DiagGaussian product_gaussian(const DiagGaussian& a, const DiagGaussian& b);

/// Target pi and test function phi for one estimation problem.
///
/// phi(x) = phi_scale * N(x; testfn), so E_pi[phi] has a closed form. The
/// unnormalized target used by the samplers is log pi(x) + target_log_offset;
/// the offset stands in for an unknown normalizing constant and must not
/// change any estimate.
struct ProblemSpec {
  ProblemSpec(DiagGaussian target, DiagGaussian testfn,
              SignedLog phi_scale = SignedLog::one(), double target_log_offset = 0.0);

  std::size_t dim() const { return target.dim(); }

  DiagGaussian target;
  DiagGaussian testfn;
  SignedLog phi_scale;
  double target_log_offset;
};

/// Default lower clamp applied to log|phi(x) - mu_hat|.
inline constexpr double kDefaultLogFloor = -745.0;

double log_unnorm_target(const ProblemSpec& spec, std::span<const double> x);

/// Normalized log pi(x); only meaningful because the shipped targets are
/// Gaussians with known normalizer.
double log_target_normalized(const ProblemSpec& spec, std::span<const double> x);

SignedLog phi_eval(const ProblemSpec& spec, std::span<const double> x);

/// E_pi[phi] = phi_scale * N(m_phi; m_pi, Sigma_pi + Sigma_phi).
SignedLog closed_form_mu(const ProblemSpec& spec);

/// log pi~(x) + max(log|phi(x) - mu_hat|, floor): the unnormalized optimal
/// SNIS proposal for centering mu_hat.
double log_opt_snis(const ProblemSpec& spec, const SignedLog& mu_hat,
                    std::span<const double> x, double floor = kDefaultLogFloor);

struct Interval {
  double lo;
  double hi;
};

struct GridRow {
  double x1;
  double x2;
  double log_pi;
  double log_pi_abs_phi;
  double log_opt_snis;
};

/// Rows over a resolution x resolution tensor grid, x1-major. Each surface is
/// shifted so that its maximum over the grid is exactly 0.
struct GridTable {
  std::size_t resolution = 0;
  std::vector<GridRow> rows;
};

enum class Exec { serial, parallel };

GridTable grid_dump(const ProblemSpec& spec, const SignedLog& mu,
                    const std::array<Interval, 2>& bounds, std::size_t resolution,
                    double floor = kDefaultLogFloor, Exec exec = Exec::parallel);

/// Tab-separated dump with a single header line naming the five columns.
void write_grid_tsv(std::ostream& os, const GridTable& grid);

}  // namespace ansnis
