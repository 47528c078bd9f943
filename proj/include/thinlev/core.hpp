#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace thinlev {

inline constexpr const char* version() { return "0.1.0"; }

// Numerical failure that carries the best partial estimate available when the
// failure occurred, so callers can decide whether to proceed.
class numerical_error : public std::runtime_error {
 public:
  numerical_error(const std::string& what, double partial, double err_est)
      : std::runtime_error(what), partial_(partial), err_est_(err_est) {}
  explicit numerical_error(const std::string& what)
      : numerical_error(what, std::numeric_limits<double>::quiet_NaN(),
                        std::numeric_limits<double>::quiet_NaN()) {}
  double partial() const { return partial_; }
  double err_est() const { return err_est_; }

 private:
  double partial_, err_est_;
};

class bracket_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// e^x - 1 - x, accurate near x = 0 where expm1(x) - x would cancel.
inline double expm1m(double x) {
  if (std::fabs(x) > 0.03125) return std::expm1(x) - x;
  // x^2/2 * (1 + x/3 + x^2/12 + x^3/60 + x^4/360 + x^5/2520)
  double s = 1.0 + x / 7.0;
  s = 1.0 + x / 6.0 * s;
  s = 1.0 + x / 5.0 * s;
  s = 1.0 + x / 4.0 * s;
  s = 1.0 + x / 3.0 * s;
  return 0.5 * x * x * s;
}

// 1 - e^{-x} without cancellation for small x.
inline double one_m_exp(double x) { return -std::expm1(-x); }

// 1 - e^{-y} - y e^{-y}  (compensator kernel), accurate for small y.
// Series: y^2/2 - y^3/3 + y^4/8 - y^5/30 + y^6/144 - ...
inline double one_m_exp_compensated(double y) {
  if (std::fabs(y) > 0.0625) return -std::expm1(-y) - y * std::exp(-y);
  double s = 0.5 + y * (-1.0 / 3.0 + y * (1.0 / 8.0 + y * (-1.0 / 30.0 + y * (1.0 / 144.0 - y / 840.0))));
  return y * y * s;
}

inline double sq(double x) { return x * x; }

}  // namespace thinlev
