#pragma once

#include <cmath>

#include "thinlev/core.hpp"
#include "thinlev/mc/estimators.hpp"
#include "thinlev/mc/parallel.hpp"
#include "thinlev/rng.hpp"

namespace thinlev::mc {

struct BmBenchmarkResult {
  Estimate p_gamma1;        // MC estimate of P(gamma_1 > u)
  Estimate p_wu_positive;   // MC estimate of P(W^lambda_u > 0), same paths
  double pittel = 0.0;      // (2 pi)^{-1/2} u^{-3/2} e^{-u(u-2 lambda)^2/8}
  double phi = 0.0;         // e^{-u(u-2 lambda)^2/8}
  double theta_star_u = 0.0;  // 1/2 - lambda/u
  bool inclusion_holds = true;  // gamma_1 > u implies W_u > 0 on every path
};

// Euler-grid benchmark against the Brownian-parabola limit: simulate
// W^lambda_t = W_t + lambda t - t^2/2, reflect at the running minimum, and
// take the longest excursion of the reflected process. The horizon is chosen
// so post-horizon excursions of length > u are negligible.
inline BmBenchmarkResult bm_pittel_benchmark(double lambda, double u, long long reps, double dt,
                                             uint64_t seed, int threads = 0) {
  if (!(dt > 0.0 && dt <= 1e-3))
    throw std::invalid_argument("bm_pittel_benchmark: need dt in (0, 1e-3]");
  if (!(u > 0.0)) throw std::invalid_argument("bm_pittel_benchmark: u must be > 0");
  const double horizon = std::max(3.0 * u, 2.0 * lambda + 8.0);
  const long long n_steps = static_cast<long long>(std::ceil(horizon / dt));
  const double sq_dt = std::sqrt(dt);

  struct Chunk {
    long long gamma_hits = 0;
    long long wu_hits = 0;
    bool inclusion = true;
  };
  auto partials = run_chunked<Chunk>(
      reps,
      [&](long long, long long lo, long long hi, Chunk& out) {
        const long long wu_step = std::max(1LL, static_cast<long long>(std::llround(u / dt)));
        for (long long r = lo; r < hi; ++r) {
          Rng rng = Rng::stream(seed, static_cast<uint64_t>(r), stream_tag::bm, 0);
          double x = 0.0, run_min = 0.0;
          double exc_start = 0.0, longest = 0.0;
          double wu = 0.0;
          for (long long k = 1; k <= n_steps; ++k) {
            double t = k * dt;
            x += (lambda - (t - 0.5 * dt)) * dt + sq_dt * rng.normal();
            if (x <= run_min) {
              run_min = x;
              longest = std::max(longest, t - exc_start);
              exc_start = t;
            }
            if (k == wu_step) wu = x;
          }
          longest = std::max(longest, horizon - exc_start);
          bool gated = longest > u;
          bool wpos = wu > 0.0;
          if (gated) ++out.gamma_hits;
          if (wpos) ++out.wu_hits;
          if (gated && !wpos) out.inclusion = false;
        }
      },
      threads);

  long long gh = 0, wh = 0;
  bool incl = true;
  for (const auto& p : partials) {
    gh += p.gamma_hits;
    wh += p.wu_hits;
    incl = incl && p.inclusion;
  }
  BmBenchmarkResult res;
  res.inclusion_holds = incl;
  auto mk = [&](long long hits) {
    Estimate e;
    e.method = Estimate::Method::naive;
    e.reps = reps;
    e.ess = static_cast<double>(reps);
    e.value = static_cast<double>(hits) / static_cast<double>(reps);
    e.std_error = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(reps));
    return e;
  };
  res.p_gamma1 = mk(gh);
  res.p_wu_positive = mk(wh);
  res.pittel = std::exp(-u * sq(u - 2.0 * lambda) / 8.0) / (std::sqrt(2.0 * kPi) * std::pow(u, 1.5));
  res.phi = std::exp(-u * sq(u - 2.0 * lambda) / 8.0);
  res.theta_star_u = 0.5 - lambda / u;
  return res;
}

}  // namespace thinlev::mc
