#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <unordered_map>
#include <vector>

#include "thinlev/core.hpp"
#include "thinlev/numerics/quadrature.hpp"
#include "thinlev/params.hpp"
#include "thinlev/process/scheme.hpp"
#include "thinlev/process/tail.hpp"
#include "thinlev/ratefn/kernels.hpp"

namespace thinlev::ratefn {

namespace detail {

inline std::complex<double> log1p_complex(std::complex<double> w) {
  if (std::abs(w) < 1e-4) {
    // w - w^2/2 + w^3/3 - w^4/4
    auto w2 = w * w;
    return w - 0.5 * w2 + w2 * w / 3.0 - 0.25 * w2 * w2;
  }
  return std::log(1.0 + w);
}

}  // namespace detail

// E[e^{ik S_u}] for the truncated model: exact head product over i in [2,N]
// plus the Gaussian tail correction ik m_N(u) - k^2 v_N(u)/2 under the same
// measure. Holds the per-clock tables so repeated k-evaluations are cheap.
class CharFn {
 public:
  CharFn(const ModelParams& params, double u, const process::Measure& measure,
         const process::TruncationScheme& scheme,
         const numerics::QuadratureSpec& spec = {})
      : params_(params), u_(u), measure_(measure) {
    const long long n = scheme.head_cutoff;
    c_.resize(static_cast<size_t>(n) + 1);
    p_.resize(static_cast<size_t>(n) + 1);
    const double th = measure.theta_eff();
    for (long long i = 2; i <= n; ++i) {
      double ci = std::pow(static_cast<double>(i), -params.alpha());
      c_[static_cast<size_t>(i)] = ci;
      p_[static_cast<size_t>(i)] = q_frac(ci * u, 1.0, th);
      c2_sum_ += ci * ci;
    }
    auto tm = process::tail_moments(params, scheme, u, u, measure, spec);
    tail_mean_ = tm.mean;
    tail_var_ = tm.var;
  }

  std::complex<double> operator()(double k) const {
    if (k == 0.0) return {1.0, 0.0};
    // log chi = ik(1 + beta u) - ik c2_sum u + sum_i log(1 + P_i(e^{ik c_i}-1))
    //           + ik m_N(u) - k^2 v_N(u)/2
    double re = -0.5 * k * k * tail_var_;
    double im = k * (1.0 + params_.beta_tilde * u_ - c2_sum_ * u_ + tail_mean_);
    for (size_t i = 2; i < c_.size(); ++i) {
      double kc = k * c_[i];
      double s = std::sin(kc), h = std::sin(0.5 * kc);
      std::complex<double> w(-2.0 * p_[i] * h * h, p_[i] * s);
      auto lg = detail::log1p_complex(w);
      re += lg.real();
      im += lg.imag();
    }
    return std::exp(re) * std::complex<double>(std::cos(im), std::sin(im));
  }

  // mean and variance of S_u in the truncated model under the measure
  double mean() const {
    double m = 1.0 + params_.beta_tilde * u_ + tail_mean_;
    for (size_t i = 2; i < c_.size(); ++i) m += c_[i] * (p_[i] - c_[i] * u_);
    return m;
  }
  double variance() const {
    double v = tail_var_;
    for (size_t i = 2; i < c_.size(); ++i) v += c_[i] * c_[i] * p_[i] * (1.0 - p_[i]);
    return v;
  }
  double u() const { return u_; }
  const ModelParams& params() const { return params_; }

 private:
  ModelParams params_;
  double u_;
  process::Measure measure_;
  std::vector<double> c_, p_;
  double c2_sum_ = 0.0;
  double tail_mean_ = 0.0, tail_var_ = 0.0;
};

// one-shot evaluation
inline std::complex<double> su_charfn(double k, double u, const process::Measure& measure,
                                      const process::TruncationScheme& scheme,
                                      const ModelParams& params) {
  return CharFn(params, u, measure, scheme)(k);
}

struct DecayEnvelope {
  double c1 = 0.0, c2 = 0.0;  // log|chi(k)| <= c1 - c2 * (k u^{(tau-3)/2})^{tau-2}
  double max_residual = 0.0;  // max fit excess over the grid
};

// least-squares fit of the stretched-exponential decay bound on the rescaled
// grid k' in [5,50]
inline DecayEnvelope fit_decay_envelope(const CharFn& chi) {
  const double tau = chi.params().tau;
  const double scale = std::pow(chi.u(), (tau - 3.0) / 2.0);
  std::vector<double> xs, ys;
  for (double kp = 5.0; kp <= 50.0; kp += 2.5) {
    double k = kp / scale;
    double a = std::abs(chi(k));
    if (a < 1e-300) break;
    xs.push_back(std::pow(kp, tau - 2.0));
    ys.push_back(std::log(a));
  }
  double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t j = 0; j < xs.size(); ++j) {
    sx += xs[j];
    sy += ys[j];
    sxx += xs[j] * xs[j];
    sxy += xs[j] * ys[j];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double inter = (sy - slope * sx) / n;
  DecayEnvelope env;
  env.c2 = -slope;
  env.c1 = inter;
  for (size_t j = 0; j < xs.size(); ++j)
    env.max_residual = std::max(env.max_residual, ys[j] - (inter + slope * xs[j]));
  return env;
}

// Fourier inversion of the characteristic function with evaluations memoised
// across density queries: the adaptive nodes over the fixed (0,K) window
// repeat, so each k is computed once.
class DensityInverter {
 public:
  DensityInverter(const ModelParams& params, double u, const process::Measure& measure,
                  const process::TruncationScheme& scheme,
                  const numerics::QuadratureSpec& spec = {})
      : chi_(params, u, measure, scheme), spec_(spec) {
    env_ = fit_decay_envelope(chi_);
    // pick K so the dropped tail of int |chi| is below ~1e-8
    const double tau = params.tau;
    const double scale = std::pow(u, (tau - 3.0) / 2.0);
    double kp = 5.0;
    if (env_.c2 > 0.0) {
      double target = std::log(1e-10);
      kp = std::pow((env_.c1 - target) / env_.c2, 1.0 / (tau - 2.0));
    }
    k_max_ = std::max(3.0 / std::sqrt(chi_.variance()), kp / scale);
    spec_.abs_tol = std::max(spec_.abs_tol, 1e-9);
  }

  // density of S_u at s, clipped at zero (warning flag records undershoot)
  double operator()(double s) const {
    auto integrand = [&](double k) {
      auto v = cached(k);
      return v.real() * std::cos(k * s) + v.imag() * std::sin(k * s);
    };
    double f = numerics::integrate_improper(integrand, 0.0, k_max_, spec_).value / kPi;
    if (f < -1e-6) warned_ = true;
    return std::max(f, 0.0);
  }

  double mean() const { return chi_.mean(); }
  double sd() const { return std::sqrt(chi_.variance()); }
  double k_max() const { return k_max_; }
  const DecayEnvelope& envelope() const { return env_; }
  bool undershoot_warning() const { return warned_; }

 private:
  std::complex<double> cached(double k) const {
    auto it = memo_.find(k);
    if (it != memo_.end()) return it->second;
    auto v = chi_(k);
    memo_.emplace(k, v);
    return v;
  }

  CharFn chi_;
  numerics::QuadratureSpec spec_;
  DecayEnvelope env_;
  double k_max_ = 0.0;
  mutable std::unordered_map<double, std::complex<double>> memo_;
  mutable bool warned_ = false;
};

// one-shot density evaluation (builds the inverter; prefer DensityInverter
// for repeated queries)
inline double su_density(double s, double u, const process::Measure& measure,
                         const process::TruncationScheme& scheme, const ModelParams& params) {
  return DensityInverter(params, u, measure, scheme)(s);
}

}  // namespace thinlev::ratefn
