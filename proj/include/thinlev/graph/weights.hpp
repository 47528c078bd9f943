#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "thinlev/core.hpp"

namespace thinlev::graphsim {

// Pareto-tail weight model calibrated to criticality: F = Pareto(tau-1, x0)
// with x0 = (tau-3)/(tau-2) makes nu = E[W^2]/E[W] = 1 exactly, and
// w_i = x0 (n/i)^{1/(tau-1)} (1 + lambda n^{-eta}).
//
// Note the generalized-inverse convention [1-F]^{-1}(1) = 0 is not honoured
// at i = n: the Pareto form gives w_n = x0 > 0. The run manifest records this
// convention discrepancy.
struct WeightModel {
  long long n = 0;
  double tau = 3.5;
  double lambda = 0.0;
  double x0 = 0.0;   // Pareto lower endpoint
  double c_f = 0.0;  // x0^{tau-1}
  std::vector<double> w;
  double ell = 0.0;    // sum w_i
  double sum_w2 = 0.0;

  double nu_n() const { return sum_w2 / ell; }
  double alpha() const { return 1.0 / (tau - 1.0); }
  double eta() const { return (tau - 3.0) / (tau - 1.0); }
};

inline WeightModel build_weights(long long n, double tau, double lambda) {
  if (n < 2) throw std::invalid_argument("build_weights: n must be >= 2");
  if (!(tau > 3.0 && tau < 4.0)) throw std::invalid_argument("build_weights: tau must be in (3,4)");
  WeightModel m;
  m.n = n;
  m.tau = tau;
  m.lambda = lambda;
  m.x0 = (tau - 3.0) / (tau - 2.0);
  m.c_f = std::pow(m.x0, tau - 1.0);
  const double window = 1.0 + lambda * std::pow(static_cast<double>(n), -m.eta());
  if (!(window >= 0.0))
    throw std::invalid_argument("build_weights: lambda too negative for this n (weights < 0)");
  m.w.resize(static_cast<size_t>(n));
  const double a = m.alpha();
  for (long long i = 1; i <= n; ++i) {
    m.w[static_cast<size_t>(i - 1)] =
        m.x0 * std::pow(static_cast<double>(n) / static_cast<double>(i), a) * window;
  }
  for (double wi : m.w) {
    m.ell += wi;
    m.sum_w2 += wi * wi;
  }
  return m;
}

}  // namespace thinlev::graphsim
