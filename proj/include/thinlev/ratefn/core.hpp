#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "thinlev/core.hpp"
#include "thinlev/numerics/minimize.hpp"
#include "thinlev/numerics/quadrature.hpp"
#include "thinlev/numerics/zeta.hpp"
#include "thinlev/params.hpp"
#include "thinlev/ratefn/kernels.hpp"

namespace thinlev::ratefn {

// Small-y series of ftilde(y) = log(1+e^{-y}(e^{-theta y}-1)) + theta y - theta y^2;
// the first two orders cancel exactly, so below y0 the log form loses ~y^{-2}
// digits and we evaluate the series instead. Coefficients verified against
// 50-digit evaluation in the unit tests.
struct FTailSeries {
  double a3, a4, a5, a6, a7;
  explicit FTailSeries(double th)
      : a3(th * (th - 1.0) / 2.0),
        a4(th * (2.0 * th * th - 9.0 * th + 2.0) / 12.0),
        a5(th * (th - 1.0) * (th * th - 13.0 * th + 1.0) / 24.0),
        a6(th * (6.0 * std::pow(th, 4) - 225.0 * th * th * th + 620.0 * th * th - 225.0 * th + 6.0) / 720.0),
        a7(th * (th - 1.0) * (std::pow(th, 4) - 92.0 * th * th * th + 483.0 * th * th - 92.0 * th + 1.0) / 720.0) {}
  double eval(double y) const { return ((((a7 * y + a6) * y + a5) * y + a4) * y + a3) * y * y * y; }
  // series of ftilde(y)/y^3
  double eval_over_y3(double y) const { return (((a7 * y + a6) * y + a5) * y + a4) * y + a3; }
};

inline constexpr double kFtailSeriesCut = 1e-3;

// ftilde(y; theta), y = x^{-alpha}
inline double f_tail_y(double y, double theta) {
  if (y < kFtailSeriesCut) return FTailSeries(theta).eval(y);
  return std::log1p(std::exp(-y) * std::expm1(-theta * y)) + theta * y * (1.0 - y);
}

// f(x; theta) in the natural x variable
inline double f_tail(double x, double theta, const ModelParams& p) {
  if (!(x > 0.0)) throw std::domain_error("f_tail: x must be > 0");
  return f_tail_y(std::pow(x, -p.alpha()), theta);
}

// Lambda(theta) = (tau-1) int_0^inf ftilde(y) y^{-tau} dy  (y = x^{-alpha}).
// The integral is split at the evaluation-branch boundaries so the quadrature
// only ever sees endpoint kinks.
inline double lambda(double theta, const ModelParams& p,
                     const numerics::QuadratureSpec& spec = {}) {
  if (theta < 0.0) throw std::domain_error("lambda: theta must be >= 0");
  if (theta == 0.0) return 0.0;
  const double tau = p.tau;
  const FTailSeries ser(theta);
  auto integrand = [&](double y) {
    if (y < kFtailSeriesCut) return std::pow(y, 3.0 - tau) * ser.eval_over_y3(y);
    if (y > 1e3) return theta * (std::pow(y, 1.0 - tau) - std::pow(y, 2.0 - tau));
    return f_tail_y(y, theta) * std::pow(y, -tau);
  };
  double v = numerics::integrate_improper(integrand, 0.0, kFtailSeriesCut, spec).value;
  v += numerics::integrate_improper(integrand, kFtailSeriesCut, 1e3, spec).value;
  v += numerics::integrate_improper(integrand, 1e3, kInf, spec).value;
  return (tau - 1.0) * v;
}

struct RateFunctionTable {
  ModelParams params;
  double theta_star = 0.0;
  double rate_i = 0.0;  // I = -Lambda(theta_star)
  double zeta_alpha = 0.0;
  double zeta_2alpha = 0.0;
  numerics::QuadratureSpec quad;

  // coefficient of theta in the finite-u perturbation of the minimisation
  double perturbation(double u) const {
    return std::pow(u, 2.0 - params.tau) *
           (zeta_alpha + (params.beta_tilde - zeta_2alpha + 1.0) * u);
  }
};

namespace detail {

// argmin over (lo,hi) of Lambda(th) + th*shift with bracket auto-expansion on
// the high side.
inline numerics::MinimizeResult minimize_lambda_shifted(const ModelParams& p, double shift,
                                                        const numerics::QuadratureSpec& spec,
                                                        double tol) {
  auto obj = [&](double th) { return lambda(th, p, spec) + th * shift; };
  double lo = 1e-3, hi = 8.0;
  for (int round = 0; round < 8; ++round) {
    try {
      return numerics::minimize_scalar(obj, lo, hi, tol);
    } catch (const bracket_error& e) {
      const std::string what = e.what();
      if (what.find("hi side") != std::string::npos) {
        hi *= 2.0;
        continue;
      }
      // decreasing into lo: the minimiser sits at or below lo
      if (lo > 1e-9) {
        lo *= 1e-3;
        continue;
      }
      throw;
    }
  }
  throw numerical_error("minimize_lambda_shifted: bracket expansion failed");
}

}  // namespace detail

// theta* = argmin Lambda, I = -Lambda(theta*). Rejects configurations where
// the computed tilt is not strictly positive.
inline RateFunctionTable solve_theta_star(const ModelParams& p,
                                          const numerics::QuadratureSpec& spec = {},
                                          const numerics::ZetaConfig& zcfg = {}) {
  p.validate();
  auto res = detail::minimize_lambda_shifted(p, 0.0, spec, 1e-9);
  RateFunctionTable t;
  t.params = p;
  t.theta_star = res.x_star;
  t.rate_i = -res.g_star;
  t.quad = spec;
  if (!(t.theta_star > 0.0) || !(t.rate_i > 0.0)) {
    throw numerical_error("solve_theta_star: configuration rejected, need theta* > 0 and I > 0 "
                          "(theta*=" + std::to_string(t.theta_star) +
                          ", I=" + std::to_string(t.rate_i) + ")");
  }
  t.zeta_alpha = numerics::zeta_em(p.alpha(), zcfg).value;
  t.zeta_2alpha = numerics::zeta_em(2.0 * p.alpha(), zcfg).value;
  return t;
}

// theta*_u = argmin_theta [ Lambda(theta) + theta u^{2-tau}(zeta(alpha) +
// (beta_tilde - zeta(2 alpha) + 1) u) ]
inline double theta_star_u(double u, const RateFunctionTable& t) {
  if (!(u > 0.0)) throw std::invalid_argument("theta_star_u: u must be > 0");
  auto res = detail::minimize_lambda_shifted(t.params, t.perturbation(u), t.quad, 1e-9);
  return res.x_star;
}

// log phi(u) = u^{tau-1} Lambda(theta*_u) + theta*_u u (zeta(alpha) +
// (beta_tilde - zeta(2 alpha) + 1) u): the minimised finite-u exponent. The
// higher-order correction series is carried implicitly by the minimisation.
inline double log_phi(double u, const RateFunctionTable& t) {
  const double tsu = theta_star_u(u, t);
  const double tau = t.params.tau;
  return std::pow(u, tau - 1.0) * lambda(tsu, t.params, t.quad) +
         tsu * u * (t.zeta_alpha + (t.params.beta_tilde - t.zeta_2alpha + 1.0) * u);
}

// same objective evaluated at an arbitrary theta (for the min property test)
inline double log_phi_at(double u, double theta, const RateFunctionTable& t) {
  const double tau = t.params.tau;
  return std::pow(u, tau - 1.0) * lambda(theta, t.params, t.quad) +
         theta * u * (t.zeta_alpha + (t.params.beta_tilde - t.zeta_2alpha + 1.0) * u);
}

}  // namespace thinlev::ratefn
