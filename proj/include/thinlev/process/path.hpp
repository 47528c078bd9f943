#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "thinlev/core.hpp"
#include "thinlev/process/sample.hpp"

namespace thinlev::process {

struct PathValue {
  double t = 0.0;
  double value = 0.0;
  double head_part = 0.0;       // sum of rung head jumps minus c_i^2 t compensation
  double tail_mean_part = 0.0;  // m_N(t)
  double tail_noise_part = 0.0; // interpolated Gaussian tail
};

struct StartDrift {
  double start = 1.0;
  double drift = 0.0;  // beta_tilde for the vertex-1 process
};

namespace detail {

inline double noise_at(const ClockSample& s, double t) {
  if (s.noise_cum.empty() || t <= 0.0) return 0.0;
  const PathLaw& L = *s.law;
  double x = t / L.step;
  int k = std::min(static_cast<int>(x), L.cells - 1);
  double frac = x - k;
  return s.noise_cum[static_cast<size_t>(k)] +
         frac * (s.noise_cum[static_cast<size_t>(k) + 1] - s.noise_cum[static_cast<size_t>(k)]);
}

// index of the first event with time > t
inline size_t events_through(const ClockSample& s, double t) {
  return static_cast<size_t>(std::upper_bound(s.events.begin(), s.events.end(), t,
                                              [](double tv, const ClockSample::Event& e) {
                                                return tv < e.t;
                                              }) -
                             s.events.begin());
}

}  // namespace detail

// S_t = start + drift*t + sum_{head} c_i [1{T_i<=t} - c_i t] + m_N(t) + noise(t).
// The components are reported separately and the value is their sum, exactly.
inline PathValue eval_path(const ClockSample& s, double t, double start = 1.0) {
  const PathLaw& L = *s.law;
  if (t < 0.0 || t > L.u * (1.0 + 1e-12))
    throw std::invalid_argument("eval_path: t outside [0,u]");
  t = std::min(t, L.u);
  PathValue out;
  out.t = t;
  out.head_part = s.prefix[detail::events_through(s, t)] - L.c2_head * t;
  out.tail_mean_part = L.tail_mean_at(t);
  out.tail_noise_part = detail::noise_at(s, t);
  double drift = L.params.beta_tilde;
  out.value = start + drift * t + out.head_part + out.tail_mean_part + out.tail_noise_part;
  return out;
}

// Variant with an explicit start/drift pair (the vertex-i processes use
// start = c_i, drift = beta_tilde + 1 - c_i^2 on a law that excludes clock i).
inline PathValue eval_path(const ClockSample& s, double t, const StartDrift& sd) {
  PathValue out = eval_path(s, t, sd.start);
  out.value += (sd.drift - s.law->params.beta_tilde) * t;
  return out;
}

struct HitResult {
  double t = 0.0;   // first time the path reaches <= 0, or u when it survived
  bool hit = false; // false means the path stayed strictly positive on [0,u]
};

// Event-driven sweep over the merged breakpoints (head jumps and tail grid
// nodes). Between breakpoints the path is exactly linear, so each piece is
// checked by its endpoint and the crossing located by bisection on the piece.
inline HitResult first_hit(const ClockSample& s, const StartDrift& sd) {
  const PathLaw& L = *s.law;
  if (!(sd.start > 0.0)) return {0.0, true};
  const double slope_base = sd.drift - L.c2_head;
  const bool have_noise = !s.noise_cum.empty();

  double cur_t = 0.0;
  double cur_v = sd.start;
  size_t ev = 0;
  const size_t n_ev = s.events.size();

  for (int k = 0; k < L.cells; ++k) {
    const double cell_hi = (k + 1 == L.cells) ? L.u : (k + 1) * L.step;
    const double dm = L.tail_mean[static_cast<size_t>(k) + 1] - L.tail_mean[static_cast<size_t>(k)];
    const double dn = have_noise ? s.noise_cum[static_cast<size_t>(k) + 1] -
                                       s.noise_cum[static_cast<size_t>(k)]
                                 : 0.0;
    const double slope = slope_base + (dm + dn) / L.step;

    while (true) {
      double seg_end = cell_hi;
      bool is_event = false;
      if (ev < n_ev && s.events[ev].t <= cell_hi) {
        seg_end = s.events[ev].t;
        is_event = true;
      }
      double v_end = cur_v + slope * (seg_end - cur_t);
      if (v_end <= 0.0) {
        // bisection on the linear piece to 1e-12 relative accuracy
        double lo = cur_t, hi = seg_end;
        double v_lo = cur_v;
        for (int it = 0; it < 64 && (hi - lo) > 1e-12 * std::max(1.0, hi); ++it) {
          double mid = 0.5 * (lo + hi);
          double v_mid = cur_v + slope * (mid - cur_t);
          if (v_mid <= 0.0) {
            hi = mid;
          } else {
            lo = mid;
            v_lo = v_mid;
          }
        }
        (void)v_lo;
        return {hi, true};
      }
      cur_t = seg_end;
      cur_v = v_end;
      if (is_event) {
        cur_v += s.events[ev].size;  // upward jump, right-continuous
        ++ev;
        if (cur_t >= cell_hi) break;
      } else {
        break;
      }
    }
  }
  return {L.u, false};
}

inline StartDrift vertex1_start_drift(const ClockSample& s) {
  return {1.0, s.law->params.beta_tilde};
}

// First hitting time of zero; returns u when the path survives the horizon
// (distinguish via survived() / first_hit()).
inline double hitting_time(const ClockSample& s, const StartDrift& sd) {
  return first_hit(s, sd).t;
}

inline double hitting_time(const ClockSample& s) {
  return first_hit(s, vertex1_start_drift(s)).t;
}

inline bool survived(const ClockSample& s, const StartDrift& sd) {
  return !first_hit(s, sd).hit;
}

inline bool survived(const ClockSample& s) { return !first_hit(s, vertex1_start_drift(s)).hit; }

}  // namespace thinlev::process
