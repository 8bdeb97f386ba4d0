#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ansnis/signed_log.hpp"

namespace ansnis {

/// One importance-weighted draw: log of the (positive) unnormalized weight and
/// the test-function value at the draw.
struct WeightedSample {
  double log_weight;
  SignedLog phi;
};

/// Raised when every weight is zero and no ratio estimate exists.
class DegenerateEstimate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Self-normalized estimate sum_n wbar_n phi_n, wbar = w / sum w.
///
/// Weights are rescaled by their maximum and the test-function values by the
/// largest weighted magnitude before summation, so positive and negative
/// contributions are accumulated separately at O(1) scale and only then
/// differenced.
SignedLog snis_estimate(std::span<const WeightedSample> samples);

/// -max(log|phi_x - mu_prev|, floor). The target density cancels between the
/// chain's stationary law and the estimand, so it never appears here.
double ansnis_log_weight(const SignedLog& phi_x, const SignedLog& mu_prev,
                         double floor);

struct UisSample {
  double log_proposal;  // normalized
  double log_target;    // normalized
  SignedLog phi;
};

/// (1/n) sum_i phi_i exp(log_target_i - log_proposal_i).
SignedLog uis_estimate(std::span<const UisSample> samples);

/// (sum w)^2 / sum w^2, clamped to [1, N]. Throws if no weight is finite.
double ess(std::span<const double> log_weights);

struct CombinationRule {
  enum class Kind { equal, ess, power, final_only };
  Kind kind = Kind::equal;
  double k = 2.0;  // power rule: nu_t proportional to t^(1/k), k >= 2

  static CombinationRule equal() { return {Kind::equal, 2.0}; }
  static CombinationRule by_ess() { return {Kind::ess, 2.0}; }
  static CombinationRule power(double k) { return {Kind::power, k}; }
  static CombinationRule final_only() { return {Kind::final_only, 2.0}; }
};

const char* to_string(CombinationRule::Kind kind);
CombinationRule::Kind parse_combination_kind(const std::string& name);

/// Normalized weights nu_1..nu_T for a rule. `ess_values` is required for
/// Kind::ess and ignored otherwise.
std::vector<double> combination_weights(std::size_t count, const CombinationRule& rule,
                                        std::optional<std::span<const double>> ess_values = {});

SignedLog combine_estimates(std::span<const SignedLog> estimates, const CombinationRule& rule,
                            std::optional<std::span<const double>> ess_values = {});

/// |mu_hat / mu_true - 1|; +inf only when mu_hat is not finite.
double relative_error(const SignedLog& mu_hat, const SignedLog& mu_true);

}  // namespace ansnis
