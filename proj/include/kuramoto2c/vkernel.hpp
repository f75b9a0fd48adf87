#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "kuramoto2c/errors.hpp"

// Evaluation of the order-parameter kernel
//
//   V(x) = (integral over the circle of cos(t) e^{x cos t}) /
//          (integral over the circle of e^{x cos t})
//        = I1(x) / I0(x),
//
// the ratio of modified Bessel functions, together with its first two
// derivatives. V is odd, strictly increasing, maps R onto (-1,1), and
// V'(0) = 1/2.

namespace kuramoto2c {

namespace detail {

// Continued fraction for I1(x)/I0(x), x > 0:
//   V(x) = x / (2 + x^2/(4 + x^2/(6 + ...)))
// evaluated with the modified Lentz algorithm. Convergence needs O(x)
// terms, so this is used for moderate arguments only.
inline double bessel_ratio_cf(double x) {
  const double tiny = 1e-300;
  const double x2 = x * x;
  double f = 2.0;
  double c = 2.0;
  double d = 0.0;
  for (int j = 2; j < 8000; ++j) {
    const double b = 2.0 * j;
    d = b + x2 * d;
    if (d == 0.0) d = tiny;
    c = b + x2 / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return x / f;
}

// Asymptotic expansion for large positive x, obtained by substituting a
// power series into the Riccati identity V' = 1 - V/x - V^2. Truncation
// error is far below 1e-14 for x >= 500.
inline double bessel_ratio_asymptotic(double x) {
  const double u = 1.0 / x;
  return 1.0 +
         u * (-0.5 +
              u * (-0.125 +
                   u * (-0.125 +
                        u * (-25.0 / 128.0 +
                             u * (-13.0 / 32.0 +
                                  u * (-1073.0 / 1024.0 + u * (-103.0 / 32.0)))))));
}

inline void require_finite(double x, const char* who) {
  if (!std::isfinite(x)) throw std::domain_error(std::string(who) + ": non-finite argument");
}

}  // namespace detail

// V(x). Odd symmetry is exact by construction: the value is computed for
// |x| and the sign applied afterwards.
inline double v(double x) {
  detail::require_finite(x, "v");
  const double ax = std::fabs(x);
  double r;
  if (ax < 1e-4) {
    // Taylor expansion V(x) = x/2 - x^3/16 + x^5/96 + O(x^7)
    const double x2 = x * x;
    return x * (0.5 + x2 * (-1.0 / 16.0 + x2 * (1.0 / 96.0)));
  } else if (ax <= 600.0) {
    r = detail::bessel_ratio_cf(ax);
  } else {
    r = detail::bessel_ratio_asymptotic(ax);
  }
  return x < 0 ? -r : r;
}

// V'(x), from the Bessel identity V' = 1 - V/x - V^2 away from zero.
inline double v_prime(double x) {
  detail::require_finite(x, "v_prime");
  const double ax = std::fabs(x);
  if (ax < 1e-4) {
    const double x2 = x * x;
    return 0.5 + x2 * (-3.0 / 16.0 + x2 * (5.0 / 96.0));
  }
  const double w = v(x);
  return 1.0 - w / x - w * w;
}

// V''(x) = -V'/x + V/x^2 - 2 V V' away from zero; odd, V''(0) = 0.
inline double v_double_prime(double x) {
  detail::require_finite(x, "v_double_prime");
  const double ax = std::fabs(x);
  if (ax < 1e-4) {
    const double x2 = x * x;
    return x * (-3.0 / 8.0 + x2 * (5.0 / 24.0));
  }
  const double w = v(x);
  const double w1 = 1.0 - w / x - w * w;
  return -w1 / x + w / (x * x) - 2.0 * w * w1;
}

// Kernel value with derivatives, sharing a single V evaluation.
struct KernelValue {
  double x;
  double v;
  double v1;
  double v2;
};

inline KernelValue kernel_eval(double x) {
  detail::require_finite(x, "kernel_eval");
  const double ax = std::fabs(x);
  if (ax < 1e-4) {
    return {x, v(x), v_prime(x), v_double_prime(x)};
  }
  const double w = v(x);
  const double w1 = 1.0 - w / x - w * w;
  const double w2 = -w1 / x + w / (x * x) - 2.0 * w * w1;
  return {x, w, w1, w2};
}

// Inverse of V on (-1,1). Safeguarded Newton with bracket maintenance;
// the residual |V(x) - r| is driven to ~1e-15.
inline double v_inverse(double r) {
  detail::require_finite(r, "v_inverse");
  if (r <= -1.0 || r >= 1.0) throw std::domain_error("v_inverse: argument outside (-1,1)");
  if (r == 0.0) return 0.0;
  const double ar = std::fabs(r);
  double lo = 0.0;
  double hi = std::max(4.0, 1.0 / (1.0 - ar));
  while (v(hi) < ar) hi *= 2.0;
  double x = std::min(hi, 2.0 * ar / (1.0 - ar * ar));  // from V ~ x/2 resp. V ~ 1 - 1/(2x)
  for (int it = 0; it < 200; ++it) {
    const double f = v(x) - ar;
    if (std::fabs(f) < 1e-15) break;
    if (f > 0) hi = x; else lo = x;
    const double fp = v_prime(x);
    double step = fp > 0 ? f / fp : 0.0;
    double xn = x - step;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (xn == x) break;
    x = xn;
  }
  return r < 0 ? -x : x;
}

}  // namespace kuramoto2c
