#include "ansnis/signed_log.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace ansnis {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

SignedLog SignedLog::from_real(double v) {
  if (!std::isfinite(v)) {
    throw std::domain_error("SignedLog::from_real: non-finite input");
  }
  if (v == 0.0) {
    return zero();
  }
  return {v > 0.0 ? 1 : -1, std::log(std::fabs(v))};
}

SignedLog SignedLog::from_log(double log_abs, int sign) {
  if (log_abs == kNegInf || sign == 0) {
    return zero();
  }
  return {sign > 0 ? 1 : -1, log_abs};
}

double SignedLog::to_real() const {
  if (sign == 0) {
    return 0.0;
  }
  return sign * std::exp(log_abs);
}

// The larger magnitude is taken as the pivot; ties keep the left operand,
// which makes a - b the exact negation of b - a.
SignedLog operator+(const SignedLog& a, const SignedLog& b) {
  if (a.sign == 0) {
    return b;
  }
  if (b.sign == 0) {
    return a;
  }
  const bool a_larger = a.log_abs >= b.log_abs;
  const SignedLog& hi = a_larger ? a : b;
  const SignedLog& lo = a_larger ? b : a;
  const double gap = lo.log_abs - hi.log_abs;  // <= 0
  if (hi.sign == lo.sign) {
    return {hi.sign, hi.log_abs + std::log1p(std::exp(gap))};
  }
  if (gap == 0.0) {
    return SignedLog::zero();
  }
  // log(1 - e^gap): expm1 near zero, log1p further out.
  const double log1mexp = gap > -std::numbers::ln2 ? std::log(-std::expm1(gap))
                                                    : std::log1p(-std::exp(gap));
  return {hi.sign, hi.log_abs + log1mexp};
}

SignedLog operator-(const SignedLog& a, const SignedLog& b) { return a + (-b); }

SignedLog operator*(const SignedLog& a, const SignedLog& b) {
  if (a.sign == 0 || b.sign == 0) {
    return SignedLog::zero();
  }
  return {a.sign * b.sign, a.log_abs + b.log_abs};
}

SignedLog operator/(const SignedLog& a, const SignedLog& b) {
  if (b.sign == 0) {
    throw std::domain_error("SignedLog division by zero");
  }
  if (a.sign == 0) {
    return SignedLog::zero();
  }
  return {a.sign * b.sign, a.log_abs - b.log_abs};
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) {
    return kNegInf;
  }
  const double peak = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(peak)) {
    return peak;
  }
  double sum = 0.0;
  for (double v : values) {
    sum += std::exp(v - peak);
  }
  return peak + std::log(sum);
}

std::string to_string(const SignedLog& v) {
  return fmt::format("({:+d}, {:.17g})", v.sign, v.log_abs);
}

}  // namespace ansnis
