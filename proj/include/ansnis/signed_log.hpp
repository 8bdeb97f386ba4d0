#pragma once

#include <limits>
#include <span>
#include <string>

namespace ansnis {

/// A real number stored as a sign and the log of its magnitude.
///
/// Zero is the ordinary value (0, -inf), so cancellation in a subtraction
/// produces a regular SignedLog rather than a special flag. All densities,
/// weights and estimates in the library travel in this form so that values
/// spanning hundreds of orders of magnitude (high-dimensional Gaussian
/// densities) neither underflow nor overflow.
struct SignedLog {
  int sign = 0;
  double log_abs = -std::numeric_limits<double>::infinity();

  static SignedLog zero() { return {}; }
  static SignedLog one() { return {1, 0.0}; }

  /// Builds a value from a finite real. Throws std::domain_error otherwise.
  static SignedLog from_real(double v);

  /// Builds a value directly from its log-magnitude. A log_abs of -inf yields
  /// zero regardless of `sign`.
  static SignedLog from_log(double log_abs, int sign = 1);

  double to_real() const;
  bool is_zero() const { return sign == 0; }

  SignedLog operator-() const { return {-sign, log_abs}; }

  friend bool operator==(const SignedLog&, const SignedLog&) = default;
};

SignedLog operator+(const SignedLog& a, const SignedLog& b);
SignedLog operator-(const SignedLog& a, const SignedLog& b);
SignedLog operator*(const SignedLog& a, const SignedLog& b);
SignedLog operator/(const SignedLog& a, const SignedLog& b);

/// log|a|; -inf for zero.
inline double abs_log(const SignedLog& a) { return a.log_abs; }

/// log(sum_i exp(values_i)), -inf for an empty range or all -inf entries.
double log_sum_exp(std::span<const double> values);

std::string to_string(const SignedLog& v);

}  // namespace ansnis
