#pragma once

#include <cmath>

#include "thinlev/core.hpp"
#include "thinlev/endgame/constants.hpp"
#include "thinlev/numerics/laplace.hpp"

namespace thinlev::endgame {

struct ScaleValue {
  double w = 0.0;        // scale function W(v)
  double g = 0.0;        // g(v) = kappa W(v), clipped to [0,1]
  bool clip_warning = false;  // raw kappa*W left [0,1] by more than 1e-3
  numerics::GsDiagnostics gs;
};

// W(v) with Laplace transform 1/psi via Gaver-Stehfest on the real axis;
// g(v) = W(v)/W(infty) using W(infty) = 1/psi'(0) = 1/kappa.
inline ScaleValue g_scale(double v, const EndgameConstants& c,
                          const numerics::InversionConfig& cfg = {}) {
  if (!(v > 0.0)) throw std::domain_error("g_scale: v must be > 0");
  ScaleValue out;
  auto transform = [&c](const numerics::BigFloat& a) {
    return numerics::BigFloat(1.0 / c.psi(static_cast<double>(a)));
  };
  out.w = numerics::laplace_invert_gs(transform, v, cfg, &out.gs);
  double raw = out.w * c.kappa;
  if (raw < -1e-3 || raw > 1.0 + 1e-3) out.clip_warning = true;
  out.g = std::min(1.0, std::max(0.0, raw));
  return out;
}

}  // namespace thinlev::endgame
