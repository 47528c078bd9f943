#pragma once

#include <cmath>
#include <stdexcept>

#include "thinlev/core.hpp"
#include "thinlev/numerics/quadrature.hpp"
#include "thinlev/ratefn/core.hpp"
#include "thinlev/ratefn/kernels.hpp"

namespace thinlev::ratefn {

// I_E(p) = (tau-1) int_0^inf [q(v) - p v] v^{-(tau-1)} dv, the limiting
// conditioned mean trajectory scale.
inline double i_e(double p_frac, const RateFunctionTable& t) {
  if (p_frac < 0.0 || p_frac > 1.0) throw std::invalid_argument("i_e: p must be in [0,1]");
  if (p_frac == 0.0) return 0.0;
  const double tau = t.params.tau, th = t.theta_star;
  auto integrand = [&](double v) {
    return std::pow(v, 3.0 - tau) * q_minus_pv_over_v2(v, p_frac, th);
  };
  return (tau - 1.0) * numerics::integrate_improper(integrand, 0.0, kInf, t.quad).value;
}

struct VarianceFns {
  double i_v = 0.0;  // Var scale of S_{pu}
  double j_v = 0.0;  // Var scale of S_u - S_{pu}
  double g_v = 0.0;  // negated Cov scale
};

// The three variance integrals share the q/r kernel evaluations; weight is
// v^{-(tau-2)}.
inline VarianceFns variance_fns(double p_frac, const RateFunctionTable& t) {
  if (p_frac < 0.0 || p_frac > 1.0) throw std::invalid_argument("variance_fns: p must be in [0,1]");
  const double tau = t.params.tau, th = t.theta_star;
  VarianceFns out;
  // integrands carried as (kernel/v) * v^{3-tau} so deep quadrature nodes
  // never form inf * 0
  auto iq = [&](double v) {
    return std::pow(v, 3.0 - tau) * q_over_v(v, p_frac, th) * one_m_q_frac(v, p_frac, th);
  };
  auto jr = [&](double v) {
    return std::pow(v, 3.0 - tau) * r_over_v(v, p_frac, th) * (1.0 - r_frac(v, p_frac, th));
  };
  auto gq = [&](double v) {
    return std::pow(v, 3.0 - tau) * q_over_v(v, p_frac, th) * r_frac(v, p_frac, th);
  };
  out.i_v = p_frac == 0.0 ? 0.0
                          : (tau - 1.0) * numerics::integrate_improper(iq, 0.0, kInf, t.quad).value;
  out.j_v = p_frac == 1.0 ? 0.0
                          : (tau - 1.0) * numerics::integrate_improper(jr, 0.0, kInf, t.quad).value;
  out.g_v = (p_frac == 0.0 || p_frac == 1.0)
                ? 0.0
                : (tau - 1.0) * numerics::integrate_improper(gq, 0.0, kInf, t.quad).value;
  return out;
}

// B = (2 pi I_V(1))^{-1/2}: the density plateau constant of S_u near zero
// under the tilted measure.
struct DensityModel {
  double i_v1 = 0.0;
  double density_b = 0.0;
};

inline DensityModel make_density_model(const RateFunctionTable& t) {
  DensityModel m;
  m.i_v1 = variance_fns(1.0, t).i_v;
  if (!(m.i_v1 > 0.0)) throw numerical_error("make_density_model: I_V(1) must be positive");
  m.density_b = 1.0 / std::sqrt(2.0 * kPi * m.i_v1);
  return m;
}

// script I_V of the small-p law I_V(p) ~ p^{tau-3} * scriptIV
inline double script_i_v(const RateFunctionTable& t) {
  const double tau = t.params.tau;
  auto integrand = [&](double y) {
    // (1-e^{-y}) e^{-y} y^{-(tau-2)} with safe small-y form
    return std::pow(y, 3.0 - tau) * (one_m_exp(y) / y) * std::exp(-y);
  };
  return (tau - 1.0) * numerics::integrate_improper(integrand, 0.0, kInf, t.quad).value;
}

}  // namespace thinlev::ratefn
