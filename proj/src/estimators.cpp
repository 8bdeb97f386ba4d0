#include "ansnis/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace ansnis {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double max_log_weight(std::span<const WeightedSample> samples) {
  double peak = kNegInf;
  for (const auto& s : samples) {
    peak = std::max(peak, s.log_weight);
  }
  return peak;
}

// sign(s) * exp(scale) * |s| as a SignedLog.
SignedLog scaled_value(double s, double scale) {
  if (s == 0.0) {
    return SignedLog::zero();
  }
  return SignedLog::from_log(scale + std::log(std::fabs(s)), s > 0.0 ? 1 : -1);
}

}  // namespace

SignedLog snis_estimate(std::span<const WeightedSample> samples) {
  const double peak = max_log_weight(samples);
  if (samples.empty() || peak == kNegInf) {
    throw DegenerateEstimate("snis_estimate: all importance weights are zero");
  }
  if (std::isnan(peak) || peak == std::numeric_limits<double>::infinity()) {
    throw std::domain_error("snis_estimate: non-finite log-weight");
  }

  // Largest weighted log-magnitude; the scale for the numerator terms.
  double phi_scale = kNegInf;
  for (const auto& s : samples) {
    if (s.phi.sign != 0 && s.log_weight != kNegInf) {
      phi_scale = std::max(phi_scale, (s.log_weight - peak) + s.phi.log_abs);
    }
  }

  double denominator = 0.0;
  double positive = 0.0;
  double negative = 0.0;
  for (const auto& s : samples) {
    const double rel = s.log_weight - peak;
    denominator += std::exp(rel);
    if (s.phi.sign == 0 || s.log_weight == kNegInf) {
      continue;
    }
    const double term = std::exp(rel + (s.phi.log_abs - phi_scale));
    (s.phi.sign > 0 ? positive : negative) += term;
  }
  if (phi_scale == kNegInf) {
    return SignedLog::zero();
  }
  return scaled_value((positive - negative) / denominator, phi_scale);
}

double ansnis_log_weight(const SignedLog& phi_x, const SignedLog& mu_prev, double floor) {
  return -std::max(abs_log(phi_x - mu_prev), floor);
}

SignedLog uis_estimate(std::span<const UisSample> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("uis_estimate: no samples");
  }
  double scale = kNegInf;
  for (const auto& s : samples) {
    if (s.phi.sign != 0) {
      scale = std::max(scale, s.log_target - s.log_proposal + s.phi.log_abs);
    }
  }
  if (scale == kNegInf) {
    return SignedLog::zero();
  }
  double positive = 0.0;
  double negative = 0.0;
  for (const auto& s : samples) {
    if (s.phi.sign == 0) {
      continue;
    }
    const double term = std::exp(s.log_target - s.log_proposal + s.phi.log_abs - scale);
    (s.phi.sign > 0 ? positive : negative) += term;
  }
  return scaled_value(positive - negative,
                      scale - std::log(static_cast<double>(samples.size())));
}

double ess(std::span<const double> log_weights) {
  if (log_weights.empty()) {
    throw std::invalid_argument("ess: no weights");
  }
  const double peak = *std::max_element(log_weights.begin(), log_weights.end());
  if (!std::isfinite(peak)) {
    throw std::invalid_argument("ess: no finite log-weight");
  }
  double s1 = 0.0;
  double s2 = 0.0;
  for (double lw : log_weights) {
    const double w = std::exp(lw - peak);
    s1 += w;
    s2 += w * w;
  }
  return std::clamp(s1 * s1 / s2, 1.0, static_cast<double>(log_weights.size()));
}

const char* to_string(CombinationRule::Kind kind) {
  switch (kind) {
    case CombinationRule::Kind::equal:
      return "equal";
    case CombinationRule::Kind::ess:
      return "ess";
    case CombinationRule::Kind::power:
      return "power";
    case CombinationRule::Kind::final_only:
      return "final_only";
  }
  return "?";
}

CombinationRule::Kind parse_combination_kind(const std::string& name) {
  for (auto kind : {CombinationRule::Kind::equal, CombinationRule::Kind::ess,
                    CombinationRule::Kind::power, CombinationRule::Kind::final_only}) {
    if (name == to_string(kind)) {
      return kind;
    }
  }
  throw std::invalid_argument(fmt::format("unknown combination rule '{}'", name));
}

std::vector<double> combination_weights(std::size_t count, const CombinationRule& rule,
                                        std::optional<std::span<const double>> ess_values) {
  if (count == 0) {
    throw std::invalid_argument("combination_weights: no estimates");
  }
  std::vector<double> raw(count, 0.0);
  switch (rule.kind) {
    case CombinationRule::Kind::equal:
      std::fill(raw.begin(), raw.end(), 1.0);
      break;
    case CombinationRule::Kind::ess:
      if (!ess_values || ess_values->size() != count) {
        throw std::invalid_argument("combination_weights: ess rule needs one ESS per estimate");
      }
      for (std::size_t t = 0; t < count; ++t) {
        if (!((*ess_values)[t] > 0.0)) {
          throw std::invalid_argument("combination_weights: ESS values must be positive");
        }
        raw[t] = (*ess_values)[t];
      }
      break;
    case CombinationRule::Kind::power:
      if (!(rule.k >= 2.0)) {
        throw std::invalid_argument("combination_weights: power rule needs k >= 2");
      }
      for (std::size_t t = 0; t < count; ++t) {
        raw[t] = std::pow(static_cast<double>(t + 1), 1.0 / rule.k);
      }
      break;
    case CombinationRule::Kind::final_only:
      raw.back() = 1.0;
      break;
  }
  double total = 0.0;
  for (double r : raw) {
    total += r;
  }
  // The last weight takes the rounding residue, so the in-order sum is 1.
  double head = 0.0;
  for (std::size_t t = 0; t + 1 < count; ++t) {
    raw[t] /= total;
    head += raw[t];
  }
  raw.back() = 1.0 - head;
  return raw;
}

SignedLog combine_estimates(std::span<const SignedLog> estimates, const CombinationRule& rule,
                            std::optional<std::span<const double>> ess_values) {
  const auto nu = combination_weights(estimates.size(), rule, ess_values);
  SignedLog total = SignedLog::zero();
  for (std::size_t t = 0; t < estimates.size(); ++t) {
    if (nu[t] > 0.0) {
      total = total + SignedLog::from_log(std::log(nu[t]), 1) * estimates[t];
    }
  }
  return total;
}

double relative_error(const SignedLog& mu_hat, const SignedLog& mu_true) {
  if (mu_true.sign == 0) {
    throw std::domain_error("relative_error: true value is zero");
  }
  if (mu_hat.sign != 0 && !std::isfinite(mu_hat.log_abs)) {
    return std::numeric_limits<double>::infinity();
  }
  const SignedLog diff = mu_hat / mu_true - SignedLog::one();
  return diff.sign == 0 ? 0.0 : std::exp(diff.log_abs);
}

}  // namespace ansnis
