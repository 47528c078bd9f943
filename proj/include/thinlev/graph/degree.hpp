#pragma once

#include <cmath>
#include <vector>

#include "thinlev/core.hpp"
#include "thinlev/graph/components.hpp"
#include "thinlev/graph/weights.hpp"
#include "thinlev/numerics/quadrature.hpp"

namespace thinlev::graphsim {

// Mixed-Poisson pmf with Pareto(tau-1, x0) mixing law:
//   p_k = E[e^{-W} W^k / k!] = (tau-1) x0^{tau-1} Gamma(k+1-tau, x0) / k!.
// The upper incomplete gammas follow the stable forward recursion
//   h_{k+1} = h_k (k+1-tau)/(k+1) + x0^{k+1-tau} e^{-x0}/(k+1)!
// with h_k = Gamma(k+1-tau, x0)/k!, seeded by quadrature at k = 0. All terms
// stay positive, so the recursion does not lose digits.
inline std::vector<double> mixed_poisson_pmf(const WeightModel& model, int k_max,
                                             const numerics::QuadratureSpec& spec = {}) {
  std::vector<double> pmf(static_cast<size_t>(k_max) + 1, 0.0);
  // degenerate all-zero-weight fixture: degree law is a point mass at 0
  bool degenerate = true;
  for (double w : model.w)
    if (w != 0.0) degenerate = false;
  if (degenerate) {
    pmf[0] = 1.0;
    return pmf;
  }
  const double tau = model.tau, x0 = model.x0;
  double h = numerics::integrate_improper(
                 [&](double w) { return std::exp(-w) * std::pow(w, -tau); }, x0, kInf, spec)
                 .value;  // Gamma(1-tau, x0)
  const double front = (tau - 1.0) * std::pow(x0, tau - 1.0);
  double pow_term = std::pow(x0, 1.0 - tau) * std::exp(-x0);  // x0^{k+1-tau} e^{-x0}/(k+1)! at k=0
  pmf[0] = front * h;
  for (int k = 0; k < k_max; ++k) {
    h = h * (k + 1.0 - tau) / (k + 1.0) + pow_term;
    pmf[static_cast<size_t>(k) + 1] = front * h;
    pow_term *= x0 / (k + 2.0);
  }
  return pmf;
}

// Total-variation distance between the empirical degree law of one graph and
// the limiting mixed-Poisson pmf, with all mass beyond k_max lumped.
inline double degree_check(const Graph& g, const WeightModel& model, int k_max,
                           const numerics::QuadratureSpec& spec = {}) {
  if (k_max < 1) throw std::invalid_argument("degree_check: k_max must be >= 1");
  auto pmf = mixed_poisson_pmf(model, k_max, spec);
  std::vector<double> emp(static_cast<size_t>(k_max) + 1, 0.0);
  double emp_beyond = 0.0;
  for (int d : g.degrees()) {
    if (d <= k_max) {
      emp[static_cast<size_t>(d)] += 1.0;
    } else {
      emp_beyond += 1.0;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(g.n);
  double tv = 0.0, pmf_mass = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    tv += std::fabs(emp[static_cast<size_t>(k)] * inv_n - pmf[static_cast<size_t>(k)]);
    pmf_mass += pmf[static_cast<size_t>(k)];
  }
  tv += std::fabs(emp_beyond * inv_n - (1.0 - pmf_mass));
  return 0.5 * tv;
}

}  // namespace thinlev::graphsim
