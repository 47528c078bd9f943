#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "thinlev/core.hpp"
#include "thinlev/endgame/constants.hpp"
#include "thinlev/mc/parallel.hpp"
#include "thinlev/numerics/quadrature.hpp"
#include "thinlev/rng.hpp"

namespace thinlev::endgame {

struct LevySimConfig {
  double horizon = 50.0;          // T
  double small_jump_cutoff = 3e-3;  // epsilon
  double grid_step = 0.01;        // extra skeleton between jumps

  void validate() const {
    if (!(horizon > 0.0)) throw std::invalid_argument("LevySimConfig: horizon must be > 0");
    if (!(small_jump_cutoff > 0.0 && small_jump_cutoff < 1.0))
      throw std::invalid_argument("LevySimConfig: epsilon must be in (0,1)");
    if (!(grid_step > 0.0)) throw std::invalid_argument("LevySimConfig: grid_step must be > 0");
  }
};

// Tabulated inverse CDF of the normalised jump-size law Pi restricted to
// (-inf, -eps), on a log-spaced grid in y = -z.
class PiTable {
 public:
  PiTable() = default;
  PiTable(double eps, double theta_star, const ModelParams& params,
          const numerics::QuadratureSpec& spec = {}) {
    const double y_max = 60.0;  // density ~ e^{-y} out here; truncation below 1e-24
    const int cells = 512;
    ys_.resize(cells + 1);
    cdf_.resize(cells + 1);
    const double lr = std::log(y_max / eps) / cells;
    for (int k = 0; k <= cells; ++k) ys_[static_cast<size_t>(k)] = eps * std::exp(lr * k);
    cdf_[0] = 0.0;
    for (int k = 0; k < cells; ++k) {
      auto seg = numerics::integrate_improper(
          [&](double y) { return levy_measure_density(-y, theta_star, params); },
          ys_[static_cast<size_t>(k)], ys_[static_cast<size_t>(k) + 1], spec);
      cdf_[static_cast<size_t>(k) + 1] = cdf_[static_cast<size_t>(k)] + seg.value;
    }
    rate_ = cdf_.back();
    // mean jump magnitude above eps (for the compensator drift)
    mean_abs_ = numerics::integrate_improper(
                    [&](double y) { return y * levy_measure_density(-y, theta_star, params); },
                    eps, y_max, spec)
                    .value;
    // small-jump variance sigma^2(eps) = int_0^eps y^2 pi(y) dy
    const double tau = params.tau;
    sigma2_ = (tau - 1.0) * numerics::integrate_improper(
                                [&](double y) {
                                  return std::pow(y, 3.0 - tau) *
                                         std::exp(-y) / ratefn::d_safe(y, theta_star);
                                },
                                0.0, eps, spec)
                                .value;
  }

  double rate() const { return rate_; }            // Pi((-inf,-eps))
  double mean_abs() const { return mean_abs_; }    // int_{y>eps} y Pi(dy)
  double sigma2() const { return sigma2_; }        // small-jump variance per unit time

  // sample a jump magnitude y > eps by inverse CDF (linear inside cells)
  double sample_magnitude(double unif) const {
    double target = unif * rate_;
    size_t k = static_cast<size_t>(std::lower_bound(cdf_.begin(), cdf_.end(), target) -
                                   cdf_.begin());
    if (k == 0) return ys_.front();
    if (k >= cdf_.size()) return ys_.back();
    double frac = (target - cdf_[k - 1]) / std::max(cdf_[k] - cdf_[k - 1], 1e-300);
    return ys_[k - 1] + frac * (ys_[k] - ys_[k - 1]);
  }

 private:
  std::vector<double> ys_, cdf_;
  double rate_ = 0.0, mean_abs_ = 0.0, sigma2_ = 0.0;
};

struct LevySupSample {
  double sup = 0.0;        // sup_{s<=T} (L_s - kappa s)
  double inf = 0.0;        // inf_{s<=T} (-L_s + kappa s) = -sup
  double martingale = 0.0; // X_stop - kappa*stop, mean zero by optional stopping
};

// Simulate X_s = kappa s - L_s on [0,T]: jumps |z| > eps as a marked Poisson
// process (inverse CDF on the tabulated Pi tail), smaller jumps replaced by a
// centred Gaussian of variance sigma^2(eps) per unit time, and the removed
// jump means absorbed into the drift (the integral form is fully
// compensated). The running extremes are tracked on the event/grid skeleton.
// Once X sits more than `escape` above its running minimum the infimum is
// settled (P(future dip that size) < e^{-30}) and the replica stops early.
inline std::vector<LevySupSample> simulate_levy_sup_with(double kappa_val, const PiTable& pi,
                                                         const LevySimConfig& cfg, long long reps,
                                                         uint64_t seed, int threads = 0) {
  cfg.validate();
  const double lam = pi.rate();
  const double drift = kappa_val + pi.mean_abs();  // compensated: jumps minus their mean
  const double sig = std::sqrt(pi.sigma2());
  const double escape = 30.0 + 10.0 * sig;

  struct Chunk {
    std::vector<LevySupSample> out;
  };
  auto partials = mc::run_chunked<Chunk>(
      reps,
      [&](long long, long long lo, long long hi, Chunk& ch) {
        ch.out.reserve(static_cast<size_t>(hi - lo));
        for (long long r = lo; r < hi; ++r) {
          Rng rng = Rng::stream(seed, static_cast<uint64_t>(r), stream_tag::levy, 0);
          double t = 0.0, x = 0.0, xmin = 0.0;
          while (t < cfg.horizon) {
            double gap = lam > 0.0 ? rng.exponential(lam) : cfg.horizon;
            double step_end = std::min(t + gap, cfg.horizon);
            // diffuse over (t, step_end] on the grid skeleton so the running
            // minimum sees the Brownian surrogate
            double remain = step_end - t;
            while (remain > 0.0) {
              double dt = std::min(cfg.grid_step, remain);
              x += drift * dt + sig * std::sqrt(dt) * rng.normal();
              if (x < xmin) xmin = x;
              remain -= dt;
            }
            t = step_end;
            if (t >= cfg.horizon) break;
            x -= pi.sample_magnitude(rng.uniform());  // negative jump of X
            if (x < xmin) xmin = x;
            if (x - xmin > escape) break;
          }
          LevySupSample s;
          s.inf = xmin;
          s.sup = -xmin;
          s.martingale = x - kappa_val * t;
          ch.out.push_back(s);
        }
      },
      threads);
  std::vector<LevySupSample> all;
  all.reserve(static_cast<size_t>(reps));
  for (auto& p : partials) all.insert(all.end(), p.out.begin(), p.out.end());
  return all;
}

inline std::vector<LevySupSample> simulate_levy_sup(const EndgameConstants& c,
                                                    const LevySimConfig& cfg, long long reps,
                                                    uint64_t seed, int threads = 0) {
  cfg.validate();
  PiTable pi(cfg.small_jump_cutoff, c.theta_star, c.params, c.quad);
  return simulate_levy_sup_with(c.kappa, pi, cfg, reps, seed, threads);
}

}  // namespace thinlev::endgame
