#pragma once

#include <cmath>
#include <stdexcept>

#include "thinlev/core.hpp"
#include "thinlev/numerics/quadrature.hpp"
#include "thinlev/params.hpp"

namespace thinlev::numerics {

struct CiExpSum {
  double sum = 0.0;               // sum_{i>=2} c_i^a e^{-b c_i u}
  double scaling_constant = 0.0;  // c(a,b) with sum = c(a,b) u^{tau-a-1}(1+o(1))
};

// Sums of the form sum_{i>=2} c_i^a e^{-b c_i u} with c_i = i^{-alpha}.
// Partial summation up to a fixed cutoff, then an Euler-Maclaurin-corrected
// integral tail in y = x^{-alpha} coordinates. Diverges for a <= tau-1.
inline CiExpSum sum_ci_exp(double a, double b, double u, double tau,
                           const QuadratureSpec& spec = {}) {
  if (!(tau > 3.0 && tau < 4.0)) throw std::invalid_argument("sum_ci_exp: tau must be in (3,4)");
  if (!(a > tau - 1.0))
    throw std::domain_error("sum_ci_exp: need a > tau-1, the sum diverges otherwise");
  if (!(b > 0.0)) throw std::domain_error("sum_ci_exp: b must be > 0");
  if (!(u > 0.0)) throw std::invalid_argument("sum_ci_exp: u must be > 0");

  const double alpha = 1.0 / (tau - 1.0);
  const long long cutoff = 1'000'000;

  double sum = 0.0, comp = 0.0;
  for (long long i = 2; i <= cutoff; ++i) {
    double ci = std::pow(static_cast<double>(i), -alpha);
    double term = std::pow(ci, a) * std::exp(-b * ci * u);
    double y = term - comp, t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }

  // g(x) = x^{-a alpha} e^{-b u x^{-alpha}};  sum_{i>M} g(i) =
  //   int_{M+1}^inf g + g(M+1)/2 - g'(M+1)/12 + ...
  auto g = [=](double x) {
    double y = std::pow(x, -alpha);
    return std::pow(y, a) * std::exp(-b * u * y);
  };
  const double m1 = static_cast<double>(cutoff + 1);
  // integral in y coordinates: (tau-1) int_0^{(M+1)^{-alpha}} y^{a-tau} e^{-b u y} dy
  const double y_hi = std::pow(m1, -alpha);
  auto integrand = [=](double y) { return std::pow(y, a - tau) * std::exp(-b * u * y); };
  auto tail_int = integrate_improper(integrand, 0.0, y_hi, spec);
  const double h = 1e-3 * m1;
  const double gp = (g(m1 + h) - g(m1 - h)) / (2.0 * h);
  sum += (tau - 1.0) * tail_int.value + 0.5 * g(m1) - gp / 12.0;

  // c(a,b) = int_0^inf x^{-a alpha} e^{-b x^{-alpha}} dx
  //        = (tau-1) int_0^inf y^{a-tau} e^{-b y} dy
  auto cint = integrate_improper([=](double y) { return std::pow(y, a - tau) * std::exp(-b * y); },
                                 0.0, kInf, spec);
  return {sum, (tau - 1.0) * cint.value};
}

}  // namespace thinlev::numerics
