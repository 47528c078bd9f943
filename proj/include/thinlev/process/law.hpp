#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "thinlev/core.hpp"
#include "thinlev/numerics/quadrature.hpp"
#include "thinlev/params.hpp"
#include "thinlev/process/scheme.hpp"
#include "thinlev/process/tail.hpp"
#include "thinlev/ratefn/kernels.hpp"

namespace thinlev::process {

// Everything that is fixed across replicas for one (params, u, scheme,
// measure, excluded-clock) tuple: clock weights, ring probabilities for the
// skip sampler, and the tail mean/noise grids. Immutable once built; safe to
// share across worker threads.
class PathLaw {
 public:
  ModelParams params;
  double u = 0.0;
  TruncationScheme scheme;
  Measure measure;
  long long excluded = 1;  // clock removed from the head sum (vertex index)

  std::vector<double> c;          // c[i] = i^{-alpha}, i in [0..N]; c[0] unused
  std::vector<double> p_ring_tbl; // ring probability in [0,u] per clock
  std::vector<double> one_m_ecu;  // 1 - e^{-c_i u} (truncated-exp inverse CDF factor)
  double c2_head = 0.0;           // sum of c_i^2 over the head set

  long long dense_end = 0;  // clocks in [1, dense_end) are drawn one by one
  struct Block {
    long long lo, hi;  // [lo, hi)
    double p_max;      // ring-probability envelope (p is decreasing in i)
  };
  std::vector<Block> blocks;  // sparse skip-sampled ranges covering [dense_end, N]

  // fine tail grid: node k at k*step, k = 0..cells (node[cells] == u)
  double step = 0.0;
  int cells = 0;
  std::vector<double> tail_mean;   // m_N at fine nodes
  std::vector<double> cell_sigma;  // per-cell noise std dev (empty in mean_only)

  double ring_probability(long long i) const { return p_ring_tbl[static_cast<size_t>(i)]; }

  // inverse CDF of the time conditional on ringing in [0,u]
  double ring_time(long long i, double unif) const {
    return -std::log1p(-unif * one_m_ecu[static_cast<size_t>(i)]) / c[static_cast<size_t>(i)];
  }

  double tail_mean_at(double t) const { return interp(tail_mean, t); }

  static std::shared_ptr<const PathLaw> build(const ModelParams& params, double u,
                                              const TruncationScheme& scheme,
                                              const Measure& measure, long long excluded = 1,
                                              bool strict = true);

 private:
  double interp(const std::vector<double>& nodes, double t) const {
    if (t <= 0.0) return nodes.front();
    double x = t / step;
    int k = std::min(static_cast<int>(x), cells - 1);
    double frac = x - k;
    return nodes[k] + frac * (nodes[k + 1] - nodes[k]);
  }

  friend struct ClockSample;
};

inline std::shared_ptr<const PathLaw> PathLaw::build(const ModelParams& params, double u,
                                                     const TruncationScheme& scheme,
                                                     const Measure& measure, long long excluded,
                                                     bool strict) {
  params.validate();
  if (!(u > 0.0)) throw std::invalid_argument("PathLaw: u must be > 0");
  if (strict) scheme.validate();
  if (excluded < 1) throw std::invalid_argument("PathLaw: excluded clock index must be >= 1");

  auto law = std::make_shared<PathLaw>();
  law->params = params;
  law->u = u;
  law->scheme = scheme;
  law->measure = measure;
  law->excluded = excluded;

  const long long n_head = scheme.head_cutoff;
  const double alpha = params.alpha();
  law->c.resize(static_cast<size_t>(n_head) + 1);
  law->p_ring_tbl.resize(static_cast<size_t>(n_head) + 1);
  law->one_m_ecu.resize(static_cast<size_t>(n_head) + 1);
  law->c[0] = 0.0;
  law->p_ring_tbl[0] = 0.0;
  law->one_m_ecu[0] = 0.0;
  double c2 = 0.0;
  for (long long i = 1; i <= n_head; ++i) {
    double ci = std::pow(static_cast<double>(i), -alpha);
    law->c[static_cast<size_t>(i)] = ci;
    law->p_ring_tbl[static_cast<size_t>(i)] = ring_prob(ci, u, measure);
    law->one_m_ecu[static_cast<size_t>(i)] = one_m_exp(ci * u);
    if (i != excluded) c2 += ci * ci;
  }
  law->c2_head = c2;

  // dense clocks [1, dense_end); sparse doubling blocks beyond
  law->dense_end = std::min<long long>(1024, n_head + 1);
  long long lo = law->dense_end;
  while (lo <= n_head) {
    long long hi = std::min(2 * lo, n_head + 1);
    law->blocks.push_back({lo, hi, law->p_ring_tbl[static_cast<size_t>(lo)]});
    lo = hi;
  }

  // tail grids: exact moments at coarse nodes (direct sum N..2N plus the
  // Euler-Maclaurin integral tail), linear interpolation onto the fine grid
  const double step0 = scheme.step_for(u);
  law->cells = std::max(1, static_cast<int>(std::lround(u / step0)));
  law->step = u / law->cells;

  const int coarse = std::min(128, law->cells);
  std::vector<double> cm(coarse + 1, 0.0), cv(coarse + 1, 0.0);
  {
    const double theta = measure.theta_eff();
    const double tau = params.tau;
    const double dt = u / coarse;
    const long long m_to = 2 * n_head;
    // direct part, shared exp-recurrence across nodes
    for (long long i = n_head + 1; i <= m_to; ++i) {
      double ci = std::pow(static_cast<double>(i), -alpha);
      double r = std::exp(-ci * dt);
      double den = ratefn::d_safe(ci * u, theta);
      double e = 1.0;
      for (int k = 1; k <= coarse; ++k) {
        e *= r;
        double pk = (1.0 - e) / den;  // P(T_i <= k dt) under the measure
        cm[k] += ci * (pk - ci * (k * dt));
        cv[k] += ci * ci * pk * (1.0 - pk);
      }
    }
    // integral remainders per node
    numerics::QuadratureSpec spec;
    spec.abs_tol = 1e-12;
    spec.rel_tol = 1e-10;
    const double x1 = static_cast<double>(m_to) + 1.0;
    const double v1 = std::pow(x1, -alpha) * u;
    const double h = 1e-3 * x1;
    for (int k = 1; k <= coarse; ++k) {
      double t = k * dt, p = t / u;
      auto mi = numerics::integrate_improper(
          [&](double v) { return std::pow(v, 3.0 - tau) * ratefn::q_minus_pv_over_v2(v, p, theta); },
          0.0, v1, spec);
      auto vi = numerics::integrate_improper(
          [&](double v) {
            return std::pow(v, 3.0 - tau) * ratefn::q_over_v(v, p, theta) *
                   ratefn::one_m_q_frac(v, p, theta);
          },
          0.0, v1, spec);
      auto g_m = [&](double x) {
        double ci = std::pow(x, -alpha), v = ci * u;
        return ci * v * v * ratefn::q_minus_pv_over_v2(v, p, theta);
      };
      auto g_v = [&](double x) {
        double ci = std::pow(x, -alpha), v = ci * u;
        return ci * ci * ratefn::q_frac(v, p, theta) * ratefn::one_m_q_frac(v, p, theta);
      };
      cm[k] += (tau - 1.0) * std::pow(u, tau - 2.0) * mi.value + 0.5 * g_m(x1) -
               (g_m(x1 + h) - g_m(x1 - h)) / (2.0 * h) / 12.0;
      cv[k] += (tau - 1.0) * std::pow(u, tau - 3.0) * vi.value + 0.5 * g_v(x1) -
               (g_v(x1 + h) - g_v(x1 - h)) / (2.0 * h) / 12.0;
    }
  }

  law->tail_mean.assign(static_cast<size_t>(law->cells) + 1, 0.0);
  std::vector<double> fine_var(static_cast<size_t>(law->cells) + 1, 0.0);
  for (int k = 0; k <= law->cells; ++k) {
    double x = static_cast<double>(k) * coarse / law->cells;
    int j = std::min(static_cast<int>(x), coarse - 1);
    double frac = x - j;
    law->tail_mean[static_cast<size_t>(k)] = cm[j] + frac * (cm[j + 1] - cm[j]);
    fine_var[static_cast<size_t>(k)] = cv[j] + frac * (cv[j + 1] - cv[j]);
  }
  if (scheme.tail_mode == TruncationScheme::TailMode::gaussian) {
    law->cell_sigma.resize(static_cast<size_t>(law->cells));
    for (int k = 0; k < law->cells; ++k) {
      law->cell_sigma[static_cast<size_t>(k)] = std::sqrt(
          std::max(0.0, fine_var[static_cast<size_t>(k) + 1] - fine_var[static_cast<size_t>(k)]));
    }
  }
  return law;
}

}  // namespace thinlev::process
