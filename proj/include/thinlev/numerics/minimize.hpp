#pragma once

#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "thinlev/core.hpp"

namespace thinlev::numerics {

struct MinimizeResult {
  double x_star = 0.0;
  double g_star = 0.0;
};

// Brent minimisation on (lo,hi). The caller guarantees unimodality; if the
// minimiser lands on an endpoint the bracket did not contain an interior
// minimum and we fail naming the violated side.
template <class F>
MinimizeResult minimize_scalar(F&& g, double lo, double hi, double tol) {
  if (!(lo < hi)) throw std::invalid_argument("minimize_scalar: empty bracket");
  if (!(tol > 0.0)) throw std::invalid_argument("minimize_scalar: tol must be > 0");

  double span = hi - lo;
  int bits = 1;
  while ((span / (1ull << bits)) > tol && bits < 52) ++bits;
  std::uintmax_t max_iter = 200;
  auto r = boost::math::tools::brent_find_minima(g, lo, hi, bits, max_iter);

  const double edge = std::max(2.0 * tol, 1e-10 * span);
  if (r.first - lo <= edge) {
    throw bracket_error(
        "minimize_scalar: no interior minimum, objective increasing from the lo side "
        "(argmin at lo=" + std::to_string(lo) + ")");
  }
  if (hi - r.first <= edge) {
    throw bracket_error(
        "minimize_scalar: no interior minimum, objective decreasing into the hi side "
        "(argmin at hi=" + std::to_string(hi) + ")");
  }
  return {r.first, r.second};
}

}  // namespace thinlev::numerics
