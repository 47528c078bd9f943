#pragma once

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <functional>
#include <string>

#include "thinlev/core.hpp"

namespace thinlev::numerics {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 2048;
  enum class Transform { none, power_substitution } transform = Transform::none;

  void validate() const {
    if (!(abs_tol > 0.0)) throw std::invalid_argument("QuadratureSpec: abs_tol must be > 0");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("QuadratureSpec: rel_tol must be > 0");
    if (max_subdivisions < 16)
      throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 16");
  }
};

struct QuadratureResult {
  double value = 0.0;
  double err_est = 0.0;
};

namespace detail {

inline int refinements_for(int max_subdivisions) {
  int r = 1;
  while ((1 << r) < max_subdivisions && r < 18) ++r;
  return r;
}

template <class F>
QuadratureResult tanh_sinh_unit(F&& f, double a, double b, const QuadratureSpec& spec) {
  boost::math::quadrature::tanh_sinh<double> integrator(
      static_cast<size_t>(refinements_for(spec.max_subdivisions)));
  double err = 0.0, l1 = 0.0;
  double v = integrator.integrate(f, a, b, spec.rel_tol, &err, &l1);
  // boost reports a relative error estimate; convert to absolute
  return {v, err * std::max(std::fabs(v), l1)};
}

}  // namespace detail

// Adaptive quadrature over (a,b) with b possibly infinite. Semi-infinite
// domains are split at a+1 and the far piece mapped by x -> 1/t, so both
// endpoint singularities land where tanh-sinh handles them.
//
// Throws numerical_error carrying the partial estimate when the error
// estimate fails the tolerance contract.
template <class F>
QuadratureResult integrate_improper(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  spec.validate();
  QuadratureResult out;
  if (std::isinf(b)) {
    double split = a + 1.0;
    auto near_res = detail::tanh_sinh_unit(f, a, split, spec);
    auto far = [&f, split, a](double t) {
      // x = a + (split - a)/t for t in (0,1]
      if (!(t > 0.0)) return 0.0;
      double x = a + (split - a) / t;
      double fx = f(x);
      if (fx == 0.0) return 0.0;  // keep 0 * (1/t^2) from turning into NaN
      return fx * (split - a) / t / t;
    };
    auto far_res = detail::tanh_sinh_unit(far, 0.0, 1.0, spec);
    out.value = near_res.value + far_res.value;
    out.err_est = near_res.err_est + far_res.err_est;
  } else {
    out = detail::tanh_sinh_unit(f, a, b, spec);
  }
  double tol = std::max(spec.abs_tol, spec.rel_tol * std::fabs(out.value));
  if (!std::isfinite(out.value) || out.err_est > std::max(tol, 1e3 * spec.abs_tol)) {
    throw numerical_error("integrate_improper: no convergence after max_subdivisions (err_est=" +
                              std::to_string(out.err_est) + ")",
                          out.value, out.err_est);
  }
  return out;
}

// Power-substitution variant for integrals over (0,inf) with x^{-alpha}
// endpoint behaviour: with y = x^{-alpha} (so x = y^{-1/alpha}),
//   int_0^inf g(x) dx = (1/alpha) int_0^inf g(y^{-1/alpha}) y^{-1/alpha - 1} dy,
// which turns both endpoints into algebraic ones. The caller supplies alpha.
template <class F>
QuadratureResult integrate_improper_power(F&& g, double subst_alpha, const QuadratureSpec& spec = {}) {
  if (!(subst_alpha > 0.0))
    throw std::invalid_argument("integrate_improper_power: substitution exponent must be > 0");
  const double inv_a = 1.0 / subst_alpha;
  auto h = [&g, inv_a](double y) {
    double gx = g(std::pow(y, -inv_a));
    if (gx == 0.0) return 0.0;
    double jac = std::pow(y, -inv_a - 1.0);
    double v = gx * inv_a * jac;
    if (std::isfinite(v)) return v;
    // jacobian overflowed against a subnormal g; recombine in log space
    double sign = gx > 0.0 ? 1.0 : -1.0;
    return sign * inv_a * std::exp(std::log(std::fabs(gx)) - (inv_a + 1.0) * std::log(y));
  };
  return integrate_improper(h, 0.0, kInf, spec);
}

}  // namespace thinlev::numerics
