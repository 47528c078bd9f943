#pragma once

#include <cmath>
#include <vector>

#include "thinlev/core.hpp"
#include "thinlev/mc/parallel.hpp"
#include "thinlev/process/path.hpp"
#include "thinlev/process/sample.hpp"
#include "thinlev/ratefn/core.hpp"

namespace thinlev::mc {

struct ReversedEndgameResult {
  std::vector<double> t_grid;       // limit times t (s = t u^{-(tau-2)})
  std::vector<double> a_mean;       // conditional mean of A_u(t u^{-(tau-2)})
  double slope = 0.0;               // OLS-through-origin slope of a_mean vs t
  double b_increment_var_rate = 0.0;  // Var of B increments per unit t
  long long conditioned = 0;        // replicas with |u S_u| <= window
  long long reps = 0;
};

namespace detail {

// u * P(T > u-s | T <= u) - s for a clock of weight c, evaluated without the
// leading-order cancellation: with v = cu, p' = s/u,
//   u p_cond - s = u [e^{-v} expm1(v p') - p'(1-e^{-v})] / (1-e^{-v})
// and the bracket is O(v^2).
inline double cond_mass_minus_s(double c, double u, double s) {
  const double v = c * u;
  const double pp = s / u;
  double bracket;
  if (v < 1e-4) {
    // (v^2/2)(pp^2-pp) + v^3 (pp^3/6 - pp^2/2 + pp/3)
    bracket = 0.5 * v * v * (pp * pp - pp) + v * v * v * (pp * pp * pp / 6.0 - 0.5 * pp * pp + pp / 3.0);
  } else {
    bracket = std::exp(-v) * std::expm1(v * pp) - pp * one_m_exp(v);
  }
  return u * bracket / one_m_exp(v);
}

}  // namespace detail

// Time-reversed end-game statistics from tilted samples conditioned on
// S_u ~ 0 (window |u S_u| <= window_m): the deterministic ramp A_u
// (plus the expectation of the unsampled tail clocks) against kappa, and the
// variance rate of the fluctuation part B_u = A_u - Q_u against
// int z^2 Pi(dz).
inline ReversedEndgameResult reversed_endgame_stats(double u, double t_max, long long reps,
                                                    uint64_t seed,
                                                    const process::TruncationScheme& scheme,
                                                    const ratefn::RateFunctionTable& table,
                                                    double window_m = 5.0, int grid_points = 20,
                                                    int threads = 0) {
  if (!(u >= 5.0)) throw std::invalid_argument("reversed_endgame_stats: u must be >= 5");
  const double theta = ratefn::theta_star_u(u, table);
  auto law = process::PathLaw::build(table.params, u, scheme, process::Measure::tilted(theta));
  const double tau = table.params.tau;
  const double s_scale = std::pow(u, -(tau - 2.0));

  std::vector<double> t_grid(static_cast<size_t>(grid_points) + 1);
  for (int j = 0; j <= grid_points; ++j) t_grid[static_cast<size_t>(j)] = t_max * j / grid_points;

  // expectation of the tail clocks' contribution to A_u (they are not
  // sampled individually; each contributes its tilted ring probability)
  std::vector<double> tail_a(t_grid.size(), 0.0);
  {
    const double alpha = table.params.alpha();
    const long long n = scheme.head_cutoff;
    for (size_t j = 1; j < t_grid.size(); ++j) {
      double s = t_grid[j] * s_scale;
      double acc = 0.0, comp = 0.0;
      for (long long i = n + 1; i <= 16 * n; ++i) {
        double ci = std::pow(static_cast<double>(i), -alpha);
        double pr = ratefn::q_frac(ci * u, 1.0, theta);
        double term = pr * ci * detail::cond_mass_minus_s(ci, u, s);
        double y = term - comp, t1 = acc + y;
        comp = (t1 - acc) - y;
        acc = t1;
      }
      // integral tail beyond 16N: sum_{i>M} q c [u p_cond - s] ->
      //   (tau-1) u^{tau-1} int_0^{v1} v^{1-tau} q(v) bracket(v)/(1-e^{-v}) dv
      // carried in combined-power form v^{3-tau} (q/v)(bracket/v^2) v/(1-e^{-v})
      const double v1 = std::pow(16.0 * static_cast<double>(n) + 1.0, -alpha) * u;
      const double pp = s / u;
      auto integrand = [&](double v) {
        double bracket_over_v2 =
            v < 1e-4 ? 0.5 * (pp * pp - pp) + v * (pp * pp * pp / 6.0 - 0.5 * pp * pp + pp / 3.0)
                     : (std::exp(-v) * std::expm1(v * pp) - pp * one_m_exp(v)) / (v * v);
        return std::pow(v, 3.0 - tau) * ratefn::q_over_v(v, 1.0, theta) * bracket_over_v2 /
               ratefn::one_m_exp_over_x(v);
      };
      auto rem = numerics::integrate_improper(integrand, 0.0, v1, table.quad);
      acc += (tau - 1.0) * std::pow(u, tau - 1.0) * rem.value;
      tail_a[j] = -acc;
    }
  }

  struct Chunk {
    std::vector<double> a_sum;   // per grid point
    std::vector<double> db_sum;  // sum of B increments
    std::vector<double> db_sum2;
    long long cond = 0;
  };
  const size_t ng = t_grid.size();
  auto partials = run_chunked<Chunk>(
      reps,
      [&](long long, long long lo, long long hi, Chunk& out) {
        out.a_sum.assign(ng, 0.0);
        out.db_sum.assign(ng - 1, 0.0);
        out.db_sum2.assign(ng - 1, 0.0);
        process::ClockSample smp;
        process::SampleWorkspace ws;
        std::vector<double> a_u(ng), b_u(ng);
        for (long long r = lo; r < hi; ++r) {
          process::sample_clocks_into(law, seed, static_cast<uint64_t>(r), smp, ws);
          double su = process::eval_path(smp, u).value;
          if (std::fabs(u * su) > window_m) continue;
          ++out.cond;
          for (size_t j = 0; j < ng; ++j) {
            double s = t_grid[j] * s_scale;
            double a = 0.0;
            if (j > 0) {
              for (const auto& e : smp.events)
                a -= e.size * detail::cond_mass_minus_s(e.size, u, s);
              a += tail_a[j];
            }
            a_u[j] = a;
            // Q_u(s) = u S_{u-s} - s - (u-s) S_u; B = A - Q
            double q = u * process::eval_path(smp, u - s).value - s - (u - s) * su;
            b_u[j] = a - q;
            out.a_sum[j] += a;
          }
          for (size_t j = 0; j + 1 < ng; ++j) {
            double db = b_u[j + 1] - b_u[j];
            out.db_sum[j] += db;
            out.db_sum2[j] += db * db;
          }
        }
      },
      threads);

  ReversedEndgameResult res;
  res.t_grid = t_grid;
  res.reps = reps;
  res.a_mean.assign(ng, 0.0);
  std::vector<double> db_sum(ng - 1, 0.0), db_sum2(ng - 1, 0.0);
  for (const auto& p : partials) {
    res.conditioned += p.cond;
    if (p.cond == 0) continue;
    for (size_t j = 0; j < ng; ++j) res.a_mean[j] += p.a_sum[j];
    for (size_t j = 0; j + 1 < ng; ++j) {
      db_sum[j] += p.db_sum[j];
      db_sum2[j] += p.db_sum2[j];
    }
  }
  if (res.conditioned < 50)
    throw numerical_error("reversed_endgame_stats: insufficient conditioning hits (" +
                          std::to_string(res.conditioned) + ")");
  for (auto& a : res.a_mean) a /= static_cast<double>(res.conditioned);

  // OLS slope through the origin of mean A against t
  double sxy = 0.0, sxx = 0.0;
  for (size_t j = 0; j < ng; ++j) {
    sxy += t_grid[j] * res.a_mean[j];
    sxx += t_grid[j] * t_grid[j];
  }
  res.slope = sxy / sxx;

  // pooled variance of B increments per unit t
  const double dt = t_max / grid_points;
  double var_acc = 0.0;
  for (size_t j = 0; j + 1 < ng; ++j) {
    double n = static_cast<double>(res.conditioned);
    double m = db_sum[j] / n;
    var_acc += db_sum2[j] / n - m * m;
  }
  res.b_increment_var_rate = var_acc / (static_cast<double>(ng - 1) * dt);
  return res;
}

}  // namespace thinlev::mc
