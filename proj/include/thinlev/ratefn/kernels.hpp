#pragma once

#include <cmath>

#include "thinlev/core.hpp"

namespace thinlev::ratefn {

// Shared cancellation-safe kernels. Every integrand in this module is built
// from the scaled denominator
//   Dsafe(v) = e^{-theta v} * [e^{theta v}(1-e^{-v}) + e^{-v}]
//            = (1-e^{-v}) + e^{-(1+theta)v},
// dividing numerator and denominator by e^{theta v} before any exp() is
// taken. Dsafe stays in [~min(1,..), ~1+..] for all v >= 0.

inline double d_safe(double v, double theta) {
  return one_m_exp(v) + std::exp(-(1.0 + theta) * v);
}

// (expm1(-(1+theta)v) - expm1(-v)) / v  ==  (Dsafe - 1)/v, finite for all v>0
inline double d_safe_m1_over_v(double v, double theta) {
  return (std::expm1(-(1.0 + theta) * v) - std::expm1(-v)) / v;
}

// (e^x - 1 - x)/x^2, no underflow for tiny x
inline double expm1m_over_x2(double x) {
  if (std::fabs(x) > 0.03125) return expm1m(x) / (x * x);
  double s = 1.0 + x / 7.0;
  s = 1.0 + x / 6.0 * s;
  s = 1.0 + x / 5.0 * s;
  s = 1.0 + x / 4.0 * s;
  s = 1.0 + x / 3.0 * s;
  return 0.5 * s;
}

// (1 - e^{-y} - y e^{-y})/y^2, no underflow for tiny y
inline double compensator_kernel_over_y2(double y) {
  if (std::fabs(y) > 0.0625) return (-std::expm1(-y) - y * std::exp(-y)) / (y * y);
  return 0.5 + y * (-1.0 / 3.0 + y * (1.0 / 8.0 + y * (-1.0 / 30.0 + y * (1.0 / 144.0 - y / 840.0))));
}

// q(v) = e^{theta v}(1-e^{-pv}) / D : tilted probability that a clock with
// c_i u = v has rung by time p*u.
inline double q_frac(double v, double p, double theta) {
  return one_m_exp(p * v) / d_safe(v, theta);
}

// e^{-pv} - e^{-v} without cancellation for p near 1 or v small, and without
// 0 * inf for large v
inline double exp_diff(double v, double p) {
  double w = (1.0 - p) * v;
  if (w > 1.0) return std::exp(-p * v) - std::exp(-v);
  return std::exp(-v) * std::expm1(w);
}

// 1 - q(v) computed without cancellation at large v:
//   1-q = [e^{-pv} - e^{-v} + e^{-(1+theta)v}] / Dsafe
inline double one_m_q_frac(double v, double p, double theta) {
  return (exp_diff(v, p) + std::exp(-(1.0 + theta) * v)) / d_safe(v, theta);
}

// r(v) = e^{theta v}(e^{-pv} - e^{-v}) / D
inline double r_frac(double v, double p, double theta) {
  return exp_diff(v, p) / d_safe(v, theta);
}

// (1 - e^{-x})/x, -> 1 as x -> 0
inline double one_m_exp_over_x(double x) {
  if (std::fabs(x) < 1e-8) return 1.0 - 0.5 * x;
  return -std::expm1(-x) / x;
}

// q(v)/v and r(v)/v: finite as v -> 0 (limits p and 1-p), used to keep the
// v^{-(tau-2)}-weighted integrands in combined-power form.
inline double q_over_v(double v, double p, double theta) {
  return p * one_m_exp_over_x(p * v) / d_safe(v, theta);
}

inline double r_over_v(double v, double p, double theta) {
  double w = (1.0 - p) * v;
  if (std::fabs(w) < 1e-8)
    return std::exp(-v) * (1.0 - p) * (1.0 + 0.5 * w) / d_safe(v, theta);
  return exp_diff(v, p) / v / d_safe(v, theta);
}

// (q(v) - p v)/v^2, finite for all v > 0 (the I_E integrand core):
//   q - pv = [-expm1m(-pv) - pv (Dsafe-1)] / Dsafe
inline double q_minus_pv_over_v2(double v, double p, double theta) {
  double num = -p * p * expm1m_over_x2(-p * v) - p * d_safe_m1_over_v(v, theta);
  return num / d_safe(v, theta);
}

}  // namespace thinlev::ratefn
