#pragma once

#include <cmath>
#include <stdexcept>

#include "thinlev/core.hpp"

namespace thinlev {

// Law of the thinned process: power-law exponent tau in (3,4) and the drift
// offset beta_tilde. The exponents alpha, rho, eta are always derived, never
// stored, so they cannot drift out of sync.
struct ModelParams {
  double tau = 3.5;
  double beta_tilde = 0.0;

  double alpha() const { return 1.0 / (tau - 1.0); }
  double rho() const { return (tau - 2.0) / (tau - 1.0); }
  double eta() const { return (tau - 3.0) / (tau - 1.0); }

  void validate() const {
    if (!(tau > 3.0 && tau < 4.0))
      throw std::invalid_argument("ModelParams: tau must lie in (3,4)");
    if (!std::isfinite(beta_tilde))
      throw std::invalid_argument("ModelParams: beta_tilde must be finite");
  }
};

inline ModelParams make_params(double tau, double beta_tilde) {
  ModelParams p{tau, beta_tilde};
  p.validate();
  return p;
}

// c_i = i^{-alpha}, the jump size of clock i.
inline double clock_weight(long long i, const ModelParams& p) {
  if (i < 1) throw std::invalid_argument("clock_weight: i must be >= 1");
  return std::pow(static_cast<double>(i), -p.alpha());
}

}  // namespace thinlev
