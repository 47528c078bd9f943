#pragma once

#include <cmath>
#include <vector>

#include "thinlev/core.hpp"
#include "thinlev/mc/parallel.hpp"
#include "thinlev/process/path.hpp"
#include "thinlev/process/sample.hpp"
#include "thinlev/ratefn/core.hpp"
#include "thinlev/ratefn/trajectory.hpp"

namespace thinlev::mc {

struct ProfileResult {
  std::vector<double> p_grid;
  std::vector<double> s_hat;      // self-normalised conditional mean of S_{pu}
  std::vector<double> predicted;  // u^{tau-2} I_E(p)
  double ess = 0.0;
  long long survivors = 0;
  double sup_rel_dev = 0.0;       // sup_p |s_hat - predicted| / u^{tau-2}
};

// Mean path conditioned on {H_1(0) > u}: self-normalised importance sampling
// with weights e^{-theta u S_u} 1{path > 0}; the normalizer cancels in the
// ratio.
inline ProfileResult conditioned_profile(double u, const std::vector<double>& p_grid,
                                         long long reps, uint64_t seed,
                                         const process::TruncationScheme& scheme,
                                         const ratefn::RateFunctionTable& table,
                                         int threads = 0) {
  for (double p : p_grid)
    if (p < 0.0 || p > 1.0)
      throw std::invalid_argument("conditioned_profile: p grid must lie in [0,1]");
  const double theta = ratefn::theta_star_u(u, table);
  auto law = process::PathLaw::build(table.params, u, scheme, process::Measure::tilted(theta));
  const size_t np = p_grid.size();

  struct Chunk {
    LogSum w, w2;
    double max_lw = -1e308;
    std::vector<double> num;  // sum e^{lw - max_lw} * S_{pu}
    long long survivors = 0;
  };
  auto partials = run_chunked<Chunk>(
      reps,
      [&](long long, long long lo, long long hi, Chunk& out) {
        out.num.assign(np, 0.0);
        process::ClockSample s;
        process::SampleWorkspace ws;
        std::vector<double> vals(np);
        for (long long r = lo; r < hi; ++r) {
          process::sample_clocks_into(law, seed, static_cast<uint64_t>(r), s, ws);
          if (!process::survived(s)) continue;
          ++out.survivors;
          double su = process::eval_path(s, u).value;
          double lw = -theta * u * su;
          for (size_t j = 0; j < np; ++j) vals[j] = process::eval_path(s, p_grid[j] * u).value;
          if (lw > out.max_lw) {
            double f = std::exp(out.max_lw - lw);
            for (auto& x : out.num) x *= f;
            out.max_lw = lw;
          }
          double wgt = std::exp(lw - out.max_lw);
          for (size_t j = 0; j < np; ++j) out.num[j] += wgt * vals[j];
          out.w.add(lw);
          out.w2.add(2.0 * lw);
        }
      },
      threads);

  // deterministic merge
  double gmax = -1e308;
  long long survivors = 0;
  for (const auto& p : partials) {
    if (p.survivors > 0) gmax = std::max(gmax, p.max_lw);
    survivors += p.survivors;
  }
  if (survivors == 0) throw numerical_error("conditioned_profile: no surviving path sampled");
  std::vector<double> num(np, 0.0);
  LogSum w, w2;
  for (const auto& p : partials) {
    if (p.survivors == 0) continue;
    double f = std::exp(p.max_lw - gmax);
    for (size_t j = 0; j < np; ++j) num[j] += p.num[j] * f;
    w.merge(p.w);
    w2.merge(p.w2);
  }
  const double denom = std::exp(w.log_total() - gmax);

  ProfileResult res;
  res.p_grid = p_grid;
  res.s_hat.resize(np);
  res.predicted.resize(np);
  res.survivors = survivors;
  res.ess = std::exp(2.0 * w.log_total() - w2.log_total());
  const double scale = std::pow(u, table.params.tau - 2.0);
  for (size_t j = 0; j < np; ++j) {
    res.s_hat[j] = num[j] / denom;
    res.predicted[j] = scale * ratefn::i_e(p_grid[j], table);
    res.sup_rel_dev = std::max(res.sup_rel_dev,
                               std::fabs(res.s_hat[j] - res.predicted[j]) / scale);
  }
  return res;
}

}  // namespace thinlev::mc
