#pragma once

#include <cmath>
#include <stdexcept>

#include "thinlev/core.hpp"
#include "thinlev/params.hpp"
#include "thinlev/ratefn/kernels.hpp"

namespace thinlev::process {

struct Measure {
  enum class Kind { original, tilted };
  Kind kind = Kind::original;
  double theta = 0.0;

  static Measure original() { return {}; }
  static Measure tilted(double theta) {
    if (!(theta > 0.0)) throw std::invalid_argument("Measure::tilted: theta must be > 0");
    return {Kind::tilted, theta};
  }
  bool is_tilted() const { return kind == Kind::tilted; }
  // all clock/tail formulas reduce to the original measure at theta = 0
  double theta_eff() const { return is_tilted() ? theta : 0.0; }
};

struct TruncationScheme {
  long long head_cutoff = 100'000;  // N
  enum class TailMode { gaussian, mean_only } tail_mode = TailMode::gaussian;
  double tail_grid_step = 0.0;  // 0 = auto (u/1024)

  void validate() const {
    if (head_cutoff < 1000)
      throw std::invalid_argument("TruncationScheme: head_cutoff must be >= 1000");
    if (tail_grid_step < 0.0)
      throw std::invalid_argument("TruncationScheme: tail_grid_step must be > 0 (or 0 for auto)");
  }
  double step_for(double u) const { return tail_grid_step > 0.0 ? tail_grid_step : u / 1024.0; }
};

// Unconditional probability that clock i has rung by time t <= u under the
// given measure. With v = c u, p = t/u this is the q-kernel; theta = 0 gives
// the original law 1 - e^{-ct}.
inline double ring_prob_by(double c, double t, double u, const Measure& m) {
  return ratefn::q_frac(c * u, t / u, m.theta_eff());
}

// probability of any jump in [0,u]
inline double ring_prob(double c, double u, const Measure& m) {
  return ratefn::q_frac(c * u, 1.0, m.theta_eff());
}

// Conditionally on ringing in [0,u], the time is truncated-exponential(rate c)
// on [0,u] under both measures; inverse CDF.
inline double ring_time_inv_cdf(double c, double u, double unif) {
  return -std::log1p(unif * std::expm1(-c * u)) / c;
}

}  // namespace thinlev::process
