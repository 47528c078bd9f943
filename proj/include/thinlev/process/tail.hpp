#pragma once

#include <cmath>
#include <vector>

#include "thinlev/core.hpp"
#include "thinlev/numerics/quadrature.hpp"
#include "thinlev/params.hpp"
#include "thinlev/process/scheme.hpp"
#include "thinlev/ratefn/kernels.hpp"

namespace thinlev::process {

struct TailMoments {
  double mean = 0.0;  // m_N(t) = sum_{i>N} c_i [P(T_i<=t) - c_i t]
  double var = 0.0;   // v_N(t) = sum_{i>N} c_i^2 P(T_i<=t)(1-P(T_i<=t))
  double err_est = 0.0;
};

namespace detail {

// Integral remainders in v = c u coordinates reuse the rate-function kernels:
//   sum_{i>M} c_i (P_i(t) - c_i t)  ->  (tau-1) u^{tau-2} int_0^{v1} v^{3-tau} qmp(v) dv
//   sum_{i>M} c_i^2 P_i(1-P_i)     ->  (tau-1) u^{tau-3} int_0^{v1} v^{3-tau} (q/v)(1-q) dv
// with qmp = (q - pv)/v^2 and p = t/u; theta = 0 recovers the original law.
inline TailMoments tail_sum_from(long long from, double t, double u, double theta, double tau,
                                 const numerics::QuadratureSpec& spec) {
  TailMoments out;
  if (t <= 0.0) return out;
  const double alpha = 1.0 / (tau - 1.0);
  const double p = t / u;
  const long long m_to = 16 * from;

  double sm = 0.0, sv = 0.0, cm = 0.0, cv = 0.0;
  for (long long i = from + 1; i <= m_to; ++i) {
    double c = std::pow(static_cast<double>(i), -alpha);
    double v = c * u;
    double tm = c * v * v * ratefn::q_minus_pv_over_v2(v, p, theta);
    double q = ratefn::q_frac(v, p, theta);
    double tv = c * c * q * ratefn::one_m_q_frac(v, p, theta);
    double y = tm - cm, s1 = sm + y;
    cm = (s1 - sm) - y;
    sm = s1;
    y = tv - cv;
    s1 = sv + y;
    cv = (s1 - sv) - y;
    sv = s1;
  }

  const double x1 = static_cast<double>(m_to + 1);
  const double v1 = std::pow(x1, -alpha) * u;
  auto mi = numerics::integrate_improper(
      [&](double v) { return std::pow(v, 3.0 - tau) * ratefn::q_minus_pv_over_v2(v, p, theta); },
      0.0, v1, spec);
  auto vi = numerics::integrate_improper(
      [&](double v) {
        return std::pow(v, 3.0 - tau) * ratefn::q_over_v(v, p, theta) *
               ratefn::one_m_q_frac(v, p, theta);
      },
      0.0, v1, spec);
  // Euler-Maclaurin boundary terms: sum_{i>M} g(i) = int_{M+1}^inf g + g(M+1)/2 - g'(M+1)/12
  auto g_m = [&](double x) {
    double c = std::pow(x, -alpha), v = c * u;
    return c * v * v * ratefn::q_minus_pv_over_v2(v, p, theta);
  };
  auto g_v = [&](double x) {
    double c = std::pow(x, -alpha), v = c * u;
    return c * c * ratefn::q_frac(v, p, theta) * ratefn::one_m_q_frac(v, p, theta);
  };
  const double h = 1e-3 * x1;
  out.mean = sm + (tau - 1.0) * std::pow(u, tau - 2.0) * mi.value + 0.5 * g_m(x1) -
             (g_m(x1 + h) - g_m(x1 - h)) / (2.0 * h) / 12.0;
  out.var = sv + (tau - 1.0) * std::pow(u, tau - 3.0) * vi.value + 0.5 * g_v(x1) -
            (g_v(x1 + h) - g_v(x1 - h)) / (2.0 * h) / 12.0;
  out.err_est = (tau - 1.0) * (std::pow(u, tau - 2.0) * mi.err_est +
                               std::pow(u, tau - 3.0) * vi.err_est) +
                std::fabs(g_m(x1)) * 1e-6 + std::fabs(g_v(x1)) * 1e-6;
  return out;
}

}  // namespace detail

// Compensated tail moments above the head cutoff: direct summation up to 16N
// plus the Euler-Maclaurin-corrected integral tail.
inline TailMoments tail_moments(const ModelParams& params, const TruncationScheme& scheme,
                                double t, double u, const Measure& measure,
                                const numerics::QuadratureSpec& spec = {}) {
  if (t < 0.0 || t > u * (1.0 + 1e-12))
    throw std::invalid_argument("tail_moments: t must lie in [0,u]");
  return detail::tail_sum_from(scheme.head_cutoff, std::min(t, u), u, measure.theta_eff(),
                               params.tau, spec);
}

}  // namespace thinlev::process
