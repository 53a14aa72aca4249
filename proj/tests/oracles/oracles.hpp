#pragma once

// Independent reference values and formulas for the tests. Everything here is written from
// the closed forms in long double, without reusing library code.

#include <cmath>

namespace oracle {

// Root of c(c - 2) = (1 + sqrt(c))^2, from a 30-digit solve.
inline constexpr double kCStar = 4.21193670450250030691560321955;
// (9 + sqrt(57)) / 2.
inline constexpr double kRatioHalfUpper = 8.27491721763537484861834240347;
// (1 + sqrt(2))^2.
inline constexpr double kBbpAt2 = 5.82842712474619009760337744842;

// Well-specified excess risk, explicit theta2, c > 1.
inline double well_specified_over(long double c, long double th2, long double t2, long double alpha,
                                  long double a, long double b, long double te) {
  const long double num = th2 * t2 * c * c - 2 * th2 * t2 * c - th2 * th2;
  const long double den = (th2 + t2 * c) * (th2 + t2 * c);
  return static_cast<double>(te / (c - 1) + alpha * alpha * t2 * (1 - 1 / c) * (a + b * num / den));
}

inline double well_specified_under(long double c, long double te) { return static_cast<double>(te * c / (1 - c)); }

// Isotropic ridgeless excess risk with unit-free bulk variance t2.
inline double isotropic(long double c, long double t2, long double alpha_a, long double a, long double te) {
  if (c < 1) return static_cast<double>(te * c / (1 - c));
  return static_cast<double>(alpha_a * alpha_a * t2 * a * (1 - 1 / c) + te / (c - 1));
}

// Misspecified excess risk, explicit theta2, in unexpanded form; needs alpha_z != alpha_a / c.
inline double misspecified(long double c, long double th2, long double t2, long double az, long double aa,
                           long double a, long double b, long double te) {
  if (c < 1) {
    const long double d1 = az - aa;
    return static_cast<double>(te * c / (1 - c) + t2 * b * d1 * d1 / (1 - c) * th2 / (th2 + t2));
  }
  const long double dc = az - aa / c;
  const long double bracket = c / (c - 1) * (th2 + t2 * c * c) / (th2 + t2 * c) - 2 * aa / dc;
  return static_cast<double>(te / (c - 1) + aa * aa * t2 * a * (1 - 1 / c) +
                             t2 * b * dc * dc * th2 / (th2 + t2 * c) * bracket);
}

// Spike-recovery excess risk for operator scaling.
inline double spike_recovery_operator(long double c, long double g, long double az, long double t2, long double b,
                                      long double te) {
  if (c < 1) return static_cast<double>(g * az * az * t2 / ((1 - c) * (g + 1)) * b + c / (1 - c) * te);
  return static_cast<double>(g * c * (c * c + g) * az * az * t2 / ((c - 1) * (g + c) * (g + c)) * b + te / (c - 1));
}

inline double spike_recovery_frobenius(long double c, long double az, long double t2, long double b, long double te) {
  if (c < 1) return static_cast<double>(az * az * t2 / (1 - c) * b + c / (1 - c) * te);
  return static_cast<double>(c * az * az * t2 / (c - 1) * b + te / (c - 1));
}

inline double phi_positivity(long double az, long double aa, long double b, long double a, long double phi) {
  return static_cast<double>(aa * aa * a + (az * az * (1 + 1 / phi) - 2 * az * aa) * b);
}

}  // namespace oracle
