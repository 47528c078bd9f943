#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "thinlev/core.hpp"

namespace thinlev::numerics {

// 50-decimal-digit binary float. Gaver-Stehfest sums have catastrophic
// cancellation (coefficients up to ~1e9 at order 16), so the weights and the
// summation both live in extended precision; only the final value comes back
// as a double.
using BigFloat = boost::multiprecision::cpp_bin_float_50;

struct InversionConfig {
  int order = 12;               // Gaver-Stehfest depth, even
  int working_precision = 50;   // decimal digits used internally

  void validate() const {
    if (order < 8 || order > 16 || (order % 2) != 0)
      throw std::invalid_argument("InversionConfig: order must be one of {8,10,12,14,16}");
    if (order >= 12 && working_precision < 30)
      throw std::invalid_argument("InversionConfig: working_precision >= 30 required for order >= 12");
    if (working_precision > 50)
      throw std::invalid_argument("InversionConfig: working_precision beyond 50 digits not built in");
  }
};

struct GsDiagnostics {
  double value_prev_order = 0.0;  // result at order-2 on the same F evaluations
  double rel_disagreement = 0.0;
  bool warning = false;           // successive orders disagree by > 1%
};

namespace detail {

inline BigFloat big_factorial(int n) {
  BigFloat f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// Stehfest weights V_k, k = 1..order.
inline std::vector<BigFloat> stehfest_weights(int order) {
  const int half = order / 2;
  std::vector<BigFloat> v(static_cast<size_t>(order) + 1);
  for (int k = 1; k <= order; ++k) {
    BigFloat acc = 0;
    const int j_lo = (k + 1) / 2;
    const int j_hi = std::min(k, half);
    for (int j = j_lo; j <= j_hi; ++j) {
      BigFloat term = boost::multiprecision::pow(BigFloat(j), half);
      term *= big_factorial(2 * j);
      term /= big_factorial(half - j);
      term /= big_factorial(j);
      term /= big_factorial(j - 1);
      term /= big_factorial(k - j);
      term /= big_factorial(2 * j - k);
      acc += term;
    }
    v[static_cast<size_t>(k)] = ((half + k) % 2 == 0) ? acc : -acc;
  }
  return v;
}

}  // namespace detail

// Gaver-Stehfest inversion of a real-axis Laplace transform at x > 0.
// F maps BigFloat -> BigFloat and must be finite on (0, order*ln2/x].
// The order-2 result reuses the same F evaluations for a consistency check.
template <class F>
double laplace_invert_gs(F&& transform, double x, const InversionConfig& cfg = {},
                         GsDiagnostics* diag = nullptr) {
  cfg.validate();
  if (!(x > 0.0)) throw std::domain_error("laplace_invert_gs: x must be > 0");

  static const BigFloat ln2 = boost::multiprecision::log(BigFloat(2));
  const BigFloat scale = ln2 / x;

  std::vector<BigFloat> fvals(static_cast<size_t>(cfg.order) + 1);
  for (int k = 1; k <= cfg.order; ++k) {
    fvals[static_cast<size_t>(k)] = transform(BigFloat(k) * scale);
    if (!boost::multiprecision::isfinite(fvals[static_cast<size_t>(k)]))
      throw numerical_error("laplace_invert_gs: transform evaluation not finite at node " +
                            std::to_string(k));
  }

  auto combine = [&fvals, &scale](int order) {
    auto w = detail::stehfest_weights(order);
    BigFloat s = 0;
    for (int k = 1; k <= order; ++k) s += w[static_cast<size_t>(k)] * fvals[static_cast<size_t>(k)];
    return static_cast<double>(s * scale);
  };

  const double value = combine(cfg.order);
  const double prev = combine(cfg.order - 2);
  const double denom = std::max({std::fabs(value), std::fabs(prev), 1e-300});
  GsDiagnostics d;
  d.value_prev_order = prev;
  d.rel_disagreement = std::fabs(value - prev) / denom;
  d.warning = d.rel_disagreement > 0.01;
  if (diag) *diag = d;
  return value;
}

// Convenience adaptor for transforms defined in double precision.
template <class F>
double laplace_invert_gs_d(F&& transform_d, double x, const InversionConfig& cfg = {},
                           GsDiagnostics* diag = nullptr) {
  auto wrapped = [&transform_d](const BigFloat& a) {
    return BigFloat(transform_d(static_cast<double>(a)));
  };
  return laplace_invert_gs(wrapped, x, cfg, diag);
}

}  // namespace thinlev::numerics
