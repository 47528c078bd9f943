#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "thinlev/core.hpp"
#include "thinlev/process/law.hpp"
#include "thinlev/rng.hpp"

namespace thinlev::process {

// One simulated realization of the clock field on [0,u]. Immutable after
// construction; evaluation helpers only read.
//
// head times: clocks below the dense/sparse boundary are drawn one by one and
// kept in dense_times (true exponentials under the original measure, possibly
// beyond u; +inf marks "no jump in [0,u]" under the tilted law). Sparse clocks
// are Bernoulli-skip sampled; only jumps inside [0,u] exist, which is
// equivalent in law for every functional of the path on [0,u].
struct ClockSample {
  std::shared_ptr<const PathLaw> law;
  uint64_t seed = 0;
  uint64_t replica = 0;

  std::vector<double> dense_times;  // index j holds T_{first_dense + j}
  long long first_dense = 2;

  struct Event {
    double t;
    double size;
  };
  std::vector<Event> events;      // time-sorted jumps with t <= u
  std::vector<double> prefix;     // prefix[k] = sum of sizes of events[0..k-1]
  std::vector<double> noise_cum;  // cumulative tail noise at fine nodes; empty if mean_only

  double dense_time(long long clock_index) const {
    return dense_times[static_cast<size_t>(clock_index - first_dense)];
  }
};

// Reusable scratch buffers; one per worker thread.
struct SampleWorkspace {
  std::vector<int> bucket_start;
  std::vector<ClockSample::Event> tmp;
};

namespace detail {

inline void prefix_sums(ClockSample& s) {
  s.prefix.resize(s.events.size() + 1);
  s.prefix[0] = 0.0;
  for (size_t k = 0; k < s.events.size(); ++k) s.prefix[k + 1] = s.prefix[k] + s.events[k].size;
}

inline void finalize_events(ClockSample& s) {
  std::sort(s.events.begin(), s.events.end(),
            [](const ClockSample::Event& a, const ClockSample::Event& b) { return a.t < b.t; });
  prefix_sums(s);
}

// bucket sort by tail-grid cell; events are near-uniform over [0,u]
inline void finalize_events_bucketed(ClockSample& s, SampleWorkspace& ws) {
  const PathLaw& L = *s.law;
  const int nb = L.cells;
  if (nb <= 1 || s.events.size() < 64) {
    finalize_events(s);
    return;
  }
  ws.bucket_start.assign(static_cast<size_t>(nb) + 1, 0);
  const double inv_step = 1.0 / L.step;
  auto cell_of = [&](double t) {
    int k = static_cast<int>(t * inv_step);
    return k >= nb ? nb - 1 : k;
  };
  for (const auto& e : s.events) ws.bucket_start[static_cast<size_t>(cell_of(e.t)) + 1]++;
  for (int k = 0; k < nb; ++k)
    ws.bucket_start[static_cast<size_t>(k) + 1] += ws.bucket_start[static_cast<size_t>(k)];
  ws.tmp.resize(s.events.size());
  // scatter, advancing each bucket's cursor in place; afterwards
  // bucket_start[k] holds the END of bucket k
  for (const auto& e : s.events)
    ws.tmp[static_cast<size_t>(ws.bucket_start[static_cast<size_t>(cell_of(e.t))]++)] = e;
  // insertion sort inside each small bucket
  for (int k = 0; k < nb; ++k) {
    int lo = k == 0 ? 0 : ws.bucket_start[static_cast<size_t>(k) - 1];
    int hi = ws.bucket_start[static_cast<size_t>(k)];
    for (int i = lo + 1; i < hi; ++i) {
      ClockSample::Event e = ws.tmp[static_cast<size_t>(i)];
      int j = i - 1;
      while (j >= lo && ws.tmp[static_cast<size_t>(j)].t > e.t) {
        ws.tmp[static_cast<size_t>(j) + 1] = ws.tmp[static_cast<size_t>(j)];
        --j;
      }
      ws.tmp[static_cast<size_t>(j) + 1] = e;
    }
  }
  s.events.swap(ws.tmp);
  prefix_sums(s);
}

}  // namespace detail

// Draw one replica. Streams are keyed (seed, replica, purpose, block) so the
// same seed extends deterministically to more replicas or a doubled head
// cutoff: existing blocks reproduce bit-identically, new blocks get fresh
// streams, and the tail noise reuses one epsilon stream scaled by the
// scheme's per-cell standard deviations.
inline void sample_clocks_into(const std::shared_ptr<const PathLaw>& law, uint64_t seed,
                               uint64_t replica, ClockSample& s, SampleWorkspace& ws) {
  const PathLaw& L = *law;
  s.law = law;
  s.seed = seed;
  s.replica = replica;
  s.events.clear();

  const bool tilted = L.measure.is_tilted();
  const long long n_head = L.scheme.head_cutoff;

  // dense clocks, block streams over [2^k, 2^{k+1})
  s.first_dense = (L.excluded == 1) ? 2 : 1;
  s.dense_times.assign(static_cast<size_t>(L.dense_end - s.first_dense), kInf);
  for (long long blk_lo = 1; blk_lo < L.dense_end; blk_lo *= 2) {
    long long blk_hi = std::min(2 * blk_lo, L.dense_end);
    Rng rng = Rng::stream(seed, replica, stream_tag::head_block,
                          static_cast<uint64_t>(blk_lo));
    for (long long i = std::max(blk_lo, s.first_dense); i < blk_hi; ++i) {
      if (i == L.excluded) continue;
      const double ci = L.c[static_cast<size_t>(i)];
      double t;
      if (!tilted) {
        t = rng.exponential(ci);
      } else {
        if (rng.uniform_co() < L.p_ring_tbl[static_cast<size_t>(i)]) {
          t = L.ring_time(i, rng.uniform_co());
        } else {
          t = kInf;  // no jump before u; never needed beyond the horizon
        }
      }
      s.dense_times[static_cast<size_t>(i - s.first_dense)] = t;
      if (t <= L.u) s.events.push_back({t, ci});
    }
  }

  // sparse blocks: Bernoulli skip sampling under the envelope p_max
  for (const auto& blk : L.blocks) {
    Rng rng = Rng::stream(seed, replica, stream_tag::head_block,
                          static_cast<uint64_t>(blk.lo));
    if (!(blk.p_max > 0.0)) continue;
    const double log1m_pmax = std::log1p(-std::min(blk.p_max, 1.0 - 1e-16));
    long long j = blk.lo - 1;
    while (true) {
      double gap = std::floor(std::log(rng.uniform()) / log1m_pmax);
      j += 1 + static_cast<long long>(std::min(gap, 4.0e18));
      if (j >= blk.hi) break;
      if (j == L.excluded) continue;
      if (rng.uniform() * blk.p_max <= L.p_ring_tbl[static_cast<size_t>(j)]) {
        s.events.push_back({L.ring_time(j, rng.uniform_co()), L.c[static_cast<size_t>(j)]});
      }
    }
  }

  detail::finalize_events_bucketed(s, ws);

  // tail noise: one standard-normal stream, scaled by the per-cell sigmas
  if (!L.cell_sigma.empty()) {
    Rng rng = Rng::stream(seed, replica, stream_tag::tail_noise, 0);
    s.noise_cum.resize(static_cast<size_t>(L.cells) + 1);
    s.noise_cum[0] = 0.0;
    for (int k = 0; k < L.cells; ++k) {
      s.noise_cum[static_cast<size_t>(k) + 1] =
          s.noise_cum[static_cast<size_t>(k)] + L.cell_sigma[static_cast<size_t>(k)] * rng.normal();
    }
  } else {
    s.noise_cum.clear();
  }

  (void)n_head;
}

inline ClockSample sample_clocks(const std::shared_ptr<const PathLaw>& law, uint64_t seed,
                                 uint64_t replica = 0) {
  ClockSample s;
  SampleWorkspace ws;
  sample_clocks_into(law, seed, replica, s, ws);
  return s;
}

}  // namespace thinlev::process
