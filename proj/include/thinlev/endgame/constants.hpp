#pragma once

#include <cmath>
#include <stdexcept>

#include "thinlev/core.hpp"
#include "thinlev/numerics/quadrature.hpp"
#include "thinlev/params.hpp"
#include "thinlev/ratefn/core.hpp"
#include "thinlev/ratefn/kernels.hpp"
#include "thinlev/ratefn/trajectory.hpp"

namespace thinlev::endgame {

// Density of the end-game Levy measure Pi at z < 0:
//   (tau-1) (-z)^{-(tau-1)} e^{-theta z} e^z / (e^{-theta z}(1-e^z) + e^z)
// evaluated via the scaled denominator (y = -z):
//   (tau-1) y^{-(tau-1)} e^{-y} / [(1-e^{-y}) + e^{-(1+theta)y}]
inline double levy_measure_density(double z, double theta_star, const ModelParams& params) {
  if (!(z < 0.0)) throw std::domain_error("levy_measure_density: z must be < 0");
  const double y = -z;
  return (params.tau - 1.0) * std::pow(y, -(params.tau - 1.0)) * std::exp(-y) /
         ratefn::d_safe(y, theta_star);
}

namespace detail {

// pi(y) dy with the power prefactor stripped:
// pi(y) = (tau-1) y^{-(tau-1)} rho(y), rho(y) = e^{-y}/Dsafe(y)
inline double rho_factor(double y, double theta) {
  return std::exp(-y) / ratefn::d_safe(y, theta);
}

}  // namespace detail

// kappa = int_0^infty x^{-a} [e^{th x^{-a}} e^{-x^{-a}} / D] [e^{x^{-a}}-1-x^{-a}] dx
//       = (tau-1) int_0^infty y^{1-tau} (1 - e^{-y} - y e^{-y}) / Dsafe(y) dy
// (fold the e^{x^{-a}} factor into the denominator before exponentiating).
inline double kappa(double theta_star, const ModelParams& params,
                    const numerics::QuadratureSpec& spec = {}) {
  if (!(theta_star > 0.0)) throw std::invalid_argument("kappa: theta* must be > 0");
  const double tau = params.tau;
  auto integrand = [&](double y) {
    return std::pow(y, 3.0 - tau) * ratefn::compensator_kernel_over_y2(y) /
           ratefn::d_safe(y, theta_star);
  };
  return (tau - 1.0) * numerics::integrate_improper(integrand, 0.0, kInf, spec).value;
}

// psi(a) = kappa a + int_{(-inf,0)} (e^{az} - 1 - az) Pi(dz)
//        = kappa a + (tau-1) int_0^inf y^{3-tau} a^2 E2(-ay) rho(y) dy
// with E2(x) = (e^x-1-x)/x^2.
inline double psi_at(double a, double kappa_val, double theta_star, const ModelParams& params,
                     const numerics::QuadratureSpec& spec = {}) {
  if (!(a >= 0.0)) throw std::domain_error("psi: a must be >= 0");
  if (a == 0.0) return 0.0;
  const double tau = params.tau;
  auto integrand = [&](double y) {
    return std::pow(y, 3.0 - tau) * a * a * ratefn::expm1m_over_x2(-a * y) *
           detail::rho_factor(y, theta_star);
  };
  return kappa_val * a +
         (tau - 1.0) * numerics::integrate_improper(integrand, 0.0, kInf, spec).value;
}

// int z^2 Pi(dz) = (tau-1) int y^{3-tau} rho(y) dy
inline double pi_second_moment(double theta_star, const ModelParams& params,
                               const numerics::QuadratureSpec& spec = {}) {
  const double tau = params.tau;
  return (tau - 1.0) *
         numerics::integrate_improper(
             [&](double y) { return std::pow(y, 3.0 - tau) * detail::rho_factor(y, theta_star); },
             0.0, kInf, spec)
             .value;
}

struct EndgameConstants {
  ModelParams params;
  double theta_star = 0.0;
  double kappa = 0.0;
  double density_b = 0.0;  // B = (2 pi I_V(1))^{-1/2}
  double psi_theta = 0.0;  // psi(theta*)
  double tail_a = 0.0;     // A = B kappa / psi(theta*)
  double tail_d = 0.0;     // D = B / theta*
  numerics::QuadratureSpec quad;

  double psi(double a) const { return psi_at(a, kappa, theta_star, params, quad); }
};

inline EndgameConstants make_endgame_constants(const ratefn::RateFunctionTable& table) {
  EndgameConstants c;
  c.params = table.params;
  c.theta_star = table.theta_star;
  c.quad = table.quad;
  c.kappa = kappa(c.theta_star, c.params, c.quad);
  if (!(c.kappa > 0.0)) throw numerical_error("make_endgame_constants: kappa must be positive");
  c.density_b = ratefn::make_density_model(table).density_b;
  c.psi_theta = c.psi(c.theta_star);
  if (!(c.psi_theta > 0.0))
    throw numerical_error("make_endgame_constants: psi(theta*) must be positive");
  // flag any parameter set where psi dips negative on (0, theta*)
  for (int k = 1; k <= 16; ++k) {
    double a = c.theta_star * k / 16.0;
    if (c.psi(a) < -1e-9)
      throw numerical_error("make_endgame_constants: psi negative at a=" + std::to_string(a));
  }
  c.tail_a = c.density_b * c.kappa / c.psi_theta;
  c.tail_d = c.density_b / c.theta_star;
  if (!(c.tail_a > 0.0 && c.tail_a < c.tail_d))
    throw numerical_error("make_endgame_constants: expected 0 < A < D");
  return c;
}

struct TailPrediction {
  double log_p_su = 0.0;  // log of D u^{-(tau-1)/2} e^{log phi(u)}
  double log_p_h1 = 0.0;
  double p_su = 0.0;      // may underflow to zero for large u
  double p_h1 = 0.0;
  double log_phi = 0.0;
};

// Headline asymptotic tail predictions; the exponent is carried by
// ratefn::log_phi (same code path as everywhere else).
inline TailPrediction predict_tails(double u, const ratefn::RateFunctionTable& table,
                                    const EndgameConstants& c) {
  TailPrediction p;
  p.log_phi = ratefn::log_phi(u, table);
  const double gamma = (table.params.tau - 1.0) / 2.0;
  p.log_p_su = std::log(c.tail_d) - gamma * std::log(u) + p.log_phi;
  p.log_p_h1 = std::log(c.tail_a) - gamma * std::log(u) + p.log_phi;
  p.p_su = std::exp(p.log_p_su);
  p.p_h1 = std::exp(p.log_p_h1);
  return p;
}

}  // namespace thinlev::endgame
