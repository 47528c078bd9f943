#pragma once

#include <cmath>
#include <stdexcept>

#include "thinlev/core.hpp"

namespace thinlev::numerics {

struct ZetaConfig {
  long long truncation = 1'000'000;  // N
  enum class Refinement { plain, richardson } refinement = Refinement::richardson;

  void validate() const {
    if (truncation < 100) throw std::invalid_argument("ZetaConfig: truncation must be >= 100");
  }
};

struct ZetaResult {
  double value = 0.0;
  double err_est = 0.0;
};

namespace detail {

// V(N) = sum_{n<=N} n^{-s} - N^{1-s}/(1-s) - N^{-s}/2
inline double zeta_partial(double s, long long n_trunc) {
  double sum = 0.0, comp = 0.0;  // Kahan
  for (long long n = 1; n <= n_trunc; ++n) {
    double term = std::pow(static_cast<double>(n), -s);
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  double nd = static_cast<double>(n_trunc);
  return sum - std::pow(nd, 1.0 - s) / (1.0 - s) - 0.5 * std::pow(nd, -s);
}

}  // namespace detail

// zeta(s) for s in (-1,1), s != 1, by Euler-Maclaurin truncation. The leading
// truncation error is s*N^{-s-1}/12; richardson mode cancels it with a second
// evaluation at 2N.
inline ZetaResult zeta_em(double s, const ZetaConfig& cfg = {}) {
  cfg.validate();
  if (s == 1.0) throw std::domain_error("zeta_em: s = 1 is the pole");
  if (s <= -1.0) throw std::domain_error("zeta_em: s must be > -1");
  if (s >= 1.0) throw std::domain_error("zeta_em: s must be < 1");

  const long long n_trunc = cfg.truncation;
  const double v_n = detail::zeta_partial(s, n_trunc);
  const double lead_err = std::fabs(s) / 12.0 * std::pow(static_cast<double>(n_trunc), -s - 1.0);
  if (cfg.refinement == ZetaConfig::Refinement::plain) {
    return {v_n, 2.0 * lead_err + std::fabs(v_n) * 4e-15};
  }
  const double v_2n = detail::zeta_partial(s, 2 * n_trunc);
  const double w = std::pow(2.0, -(s + 1.0));
  const double value = (v_2n - w * v_n) / (1.0 - w);
  // next Euler-Maclaurin term is O(N^{-s-3})
  const double err = std::fabs(s * (s + 1.0) * (s + 2.0)) / 720.0 *
                         std::pow(static_cast<double>(n_trunc), -s - 3.0) +
                     std::fabs(value) * 4e-15;
  return {value, err};
}

}  // namespace thinlev::numerics
