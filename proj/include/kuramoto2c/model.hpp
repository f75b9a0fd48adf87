#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "kuramoto2c/errors.hpp"
#include "kuramoto2c/vkernel.hpp"

// Domain types for the two-community system and enumeration of all
// stationary solutions of the self-consistency equations
//
//   r1 = V(K1 r1 + L1 r2 cos psi),   r2 = V(K2 r2 + L2 r1 cos psi),
//
// with psi in {0, pi}. The psi = pi analysis equals the psi = 0 analysis
// with both cross couplings negated, so everything below works on the
// sign-flipped coupling internally.

namespace kuramoto2c {

inline constexpr double pi_const = 3.14159265358979323846;

struct Coupling {
  double k1 = 0.0;
  double k2 = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
};

inline void validate(const Coupling& c) {
  if (!std::isfinite(c.k1) || !std::isfinite(c.k2) || !std::isfinite(c.l1) ||
      !std::isfinite(c.l2))
    throw std::domain_error("Coupling: non-finite interaction strength");
}

// Coupling seen by the psi = pi branch.
inline Coupling flipped(const Coupling& c) { return {c.k1, c.k2, -c.l1, -c.l2}; }

struct SyncSolution {
  double r1 = 0.0;
  double r2 = 0.0;
  double psi = 0.0;  // 0 or pi
};

// Residuals h1 = V(K1 r1 + L1 r2) - r1 and h2 = V(K2 r2 + L2 r1) - r2,
// whose zero sets are the level curves Gamma_1 and Gamma_2.
inline double residual(const Coupling& c, int which, double r1, double r2) {
  validate(c);
  if (which == 1) return v(c.k1 * r1 + c.l1 * r2) - r1;
  if (which == 2) return v(c.k2 * r2 + c.l2 * r1) - r2;
  throw std::domain_error("residual: which must be 1 or 2");
}

// Largest r in [0,1) with r = V(s r); zero when s <= 2. This is both the
// one-community synchronization level and the value taken on the symmetric
// line K1 + L1 = K2 + L2 = s.
inline double symmetric_fixed_point(double s) {
  if (!std::isfinite(s)) throw std::domain_error("symmetric_fixed_point: non-finite argument");
  if (s <= 2.0) return 0.0;
  double lo = 1e-14, hi = 1.0 - 1e-15;
  // V(s r) - r > 0 near zero for s > 2 and < 0 at r = 1
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (v(s * mid) - mid > 0.0) lo = mid; else hi = mid;
    if (hi - lo < 1e-16) break;
  }
  return 0.5 * (lo + hi);
}

enum class CurveShape { ConvexConnected, ConvexDisconnected, Parabola, Trivial };

inline const char* to_string(CurveShape s) {
  switch (s) {
    case CurveShape::ConvexConnected: return "convex-connected";
    case CurveShape::ConvexDisconnected: return "convex-disconnected";
    case CurveShape::Parabola: return "parabola";
    case CurveShape::Trivial: return "trivial";
  }
  return "?";
}

// Shape of a level curve with internal strength k and cross strength l.
// k = 2 with l > 0 counts as connected (the curve still starts at zero);
// k <= 2 with l < 0 leaves only the origin.
inline CurveShape shape_of(double k, double l) {
  if (l > 0.0) return k <= 2.0 ? CurveShape::ConvexConnected : CurveShape::ConvexDisconnected;
  return k > 2.0 ? CurveShape::Parabola : CurveShape::Trivial;
}

struct TurningPoint {
  double r1 = 0.0;
  double r2 = 0.0;
};

namespace detail {

// On the curve, the coordinate along the community's own axis determines
// the kernel argument: a = V^{-1}(r_self). The partner coordinate follows
// as (a - k r_self)/l, making every nontrivial curve the graph of one
// scalar function.
inline double curve_partner(double k, double l, double r_self) {
  return (v_inverse(r_self) - k * r_self) / l;
}

// Abscissa of the fold apex of a parabola-shaped curve: the unique root of
// r = V(k r / (k(1 - r^2) - 1)) below sqrt(1 - 1/k).
inline double turning_abscissa(double k) {
  const double top = std::sqrt(1.0 - 1.0 / k);
  double lo = 1e-12, hi = top - 1e-13;
  auto f = [&](double r) { return r - v(k * r / (k * (1.0 - r * r) - 1.0)); };
  // f > 0 near zero (slope deficit (k-2)/(2(k-1))), f < 0 near the pole
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) lo = mid; else hi = mid;
    if (hi - lo < 1e-16) break;
  }
  return 0.5 * (lo + hi);
}

// Damped Newton on (h1, h2). The Jacobian determinant equals minus the
// tangency function, so convergence degrades to linear exactly on solution
// boundaries; the caller supplies a point already close to the root.
inline bool newton_polish(const Coupling& c, double& r1, double& r2, double tol) {
  auto norm2 = [&](double a, double b) { return std::max(std::fabs(a), std::fabs(b)); };
  double h1 = v(c.k1 * r1 + c.l1 * r2) - r1;
  double h2 = v(c.k2 * r2 + c.l2 * r1) - r2;
  double best = norm2(h1, h2);
  for (int it = 0; it < 80; ++it) {
    if (best <= tol) return true;
    const double c11 = v_prime(c.k1 * r1 + c.l1 * r2);
    const double c21 = v_prime(c.k2 * r2 + c.l2 * r1);
    const double j11 = c.k1 * c11 - 1.0, j12 = c.l1 * c11;
    const double j21 = c.l2 * c21, j22 = c.k2 * c21 - 1.0;
    const double det = j11 * j22 - j12 * j21;
    if (std::fabs(det) < 1e-14) return best <= 10.0 * tol;
    const double d1 = (h1 * j22 - h2 * j12) / det;
    const double d2 = (j11 * h2 - j21 * h1) / det;
    double step = 1.0;
    for (int half = 0; half < 30; ++half) {
      const double n1 = r1 - step * d1, n2 = r2 - step * d2;
      const double e1 = v(c.k1 * n1 + c.l1 * n2) - n1;
      const double e2 = v(c.k2 * n2 + c.l2 * n1) - n2;
      if (norm2(e1, e2) < best) {
        r1 = n1; r2 = n2; h1 = e1; h2 = e2; best = norm2(e1, e2);
        break;
      }
      step *= 0.5;
      if (half == 29) return best <= tol;
    }
  }
  return best <= tol;
}

}  // namespace detail

struct LevelCurve {
  int which = 1;
  CurveShape shape = CurveShape::Trivial;
  std::vector<std::array<double, 2>> samples;  // (r1, r2) pairs
};

// Unique fold apex of a parabola-shaped curve (k > 2, l < 0).
inline TurningPoint turning_point(double k, double l) {
  if (!std::isfinite(k) || !std::isfinite(l)) throw std::domain_error("turning_point: non-finite");
  if (k <= 2.0 || l >= 0.0) throw std::domain_error("turning_point: requires k > 2 and l < 0");
  const double r1 = detail::turning_abscissa(k);
  const double x = k * r1 / (k * (1.0 - r1 * r1) - 1.0);
  return {r1, (x - k * r1) / l};
}

// Sampled polyline of one level curve inside the unit square. The trivial
// shape is the single point (0,0); the disconnected shape starts at the
// one-community level (its isolated origin point is not part of the traced
// component); the parabola is traced across its fold with the apex sample
// inserted exactly, skipping any samples whose apex pokes above the square.
inline LevelCurve trace_curve(const Coupling& c, int which, int n) {
  validate(c);
  if (n < 16) throw std::domain_error("trace_curve: n must be >= 16");
  if (which != 1 && which != 2) throw std::domain_error("trace_curve: which must be 1 or 2");
  const double k = which == 1 ? c.k1 : c.k2;
  const double l = which == 1 ? c.l1 : c.l2;
  if (l == 0.0) throw std::domain_error("trace_curve: cross coupling is zero");

  LevelCurve out;
  out.which = which;
  out.shape = shape_of(k, l);
  auto push = [&](double r_self, double r_other) {
    if (which == 1)
      out.samples.push_back({r_self, r_other});
    else
      out.samples.push_back({r_other, r_self});
  };

  if (out.shape == CurveShape::Trivial) {
    out.samples.push_back({0.0, 0.0});
    return out;
  }

  auto partner = [&](double r) { return detail::curve_partner(k, l, r); };

  if (out.shape == CurveShape::Parabola) {
    const TurningPoint tp = turning_point(k, l);
    const double r_end = symmetric_fixed_point(k);  // arch returns to the axis here
    for (int i = 0; i < n; ++i) {
      const double r = r_end * i / (n - 1.0);
      const double p = i == 0 ? 0.0 : partner(r);
      if (p >= 0.0 && p <= 1.0) push(r, p);
      if (i + 1 < n && r < tp.r1 && r_end * (i + 1) / (n - 1.0) > tp.r1 && tp.r2 <= 1.0)
        push(tp.r1, tp.r2);
    }
    return out;
  }

  // convex shapes: graph rises monotonically and exits through the far edge
  const double r_begin = out.shape == CurveShape::ConvexConnected ? 0.0 : symmetric_fixed_point(k);
  double lo = r_begin, hi = 1.0 - 1e-12;
  if (partner(hi) <= 1.0) {
    lo = hi;  // stays inside up to the corner
  } else {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (partner(mid) <= 1.0) lo = mid; else hi = mid;
      if (hi - lo < 1e-15) break;
    }
  }
  const double r_end = lo;
  for (int i = 0; i < n; ++i) {
    const double r = r_begin + (r_end - r_begin) * i / (n - 1.0);
    const double p = (i == 0 && out.shape == CurveShape::ConvexConnected) ? 0.0 : partner(r);
    if (p >= -1e-15 && p <= 1.0 + 1e-12) push(r, std::clamp(p, 0.0, 1.0));
  }
  return out;
}

namespace detail {

// Scan h_other along one level curve (which is a graph over its own
// coordinate), bracketing sign changes and refining near-tangent dips.
// Returns refined (r1, r2) candidates, origin included.
inline std::vector<std::array<double, 2>> scan_intersections(const Coupling& c, int trace_which,
                                                             int grid) {
  const double k = trace_which == 1 ? c.k1 : c.k2;
  const double l = trace_which == 1 ? c.l1 : c.l2;
  const int other = trace_which == 1 ? 2 : 1;

  auto point_at = [&](double r) -> std::array<double, 2> {
    const double p = r == 0.0 ? 0.0 : curve_partner(k, l, r);
    return trace_which == 1 ? std::array<double, 2>{r, p} : std::array<double, 2>{p, r};
  };
  auto f_at = [&](double r) {
    const auto pt = point_at(r);
    return residual(c, other, pt[0], pt[1]);
  };
  auto valid_at = [&](double r) {
    const auto pt = point_at(r);
    const double p = trace_which == 1 ? pt[1] : pt[0];
    return p >= 0.0 && p <= 1.0;
  };

  const double r_hi = 1.0 - 1e-9;
  std::vector<double> rs(grid + 1);
  std::vector<double> fs(grid + 1);
  std::vector<char> ok(grid + 1);
  for (int i = 0; i <= grid; ++i) {
    rs[i] = r_hi * i / grid;
    ok[i] = valid_at(rs[i]) ? 1 : 0;
    fs[i] = ok[i] ? f_at(rs[i]) : 0.0;
  }

  std::vector<std::array<double, 2>> found{{0.0, 0.0}};
  auto bisect = [&](double a, double b) {
    double fa = f_at(a);
    for (int it = 0; it < 100; ++it) {
      const double m = 0.5 * (a + b);
      const double fm = f_at(m);
      if (fa * fm <= 0.0) { b = m; } else { a = m; fa = fm; }
      if (b - a < 1e-14) break;
    }
    found.push_back(point_at(0.5 * (a + b)));
  };

  // locate the exact crossing of the validity boundary inside a cell
  auto clip_edge = [&](double r_ok, double r_bad) {
    for (int it = 0; it < 80; ++it) {
      const double m = 0.5 * (r_ok + r_bad);
      if (valid_at(m)) r_ok = m; else r_bad = m;
    }
    return r_ok;
  };

  for (int i = 0; i < grid; ++i) {
    if (ok[i] && ok[i + 1]) {
      if (fs[i] == 0.0 && rs[i] > 0.0) found.push_back(point_at(rs[i]));
      if (fs[i] * fs[i + 1] < 0.0) bisect(rs[i], rs[i + 1]);
    } else if (ok[i] && !ok[i + 1]) {
      const double edge = clip_edge(rs[i], rs[i + 1]);
      if (fs[i] * f_at(edge) < 0.0) bisect(rs[i], edge);
    } else if (!ok[i] && ok[i + 1]) {
      const double edge = clip_edge(rs[i + 1], rs[i]);
      if (f_at(edge) * fs[i + 1] < 0.0) bisect(edge, rs[i + 1]);
    }
  }

  // near-tangent pairs can hide between nodes: refine interior dips of |f|
  for (int i = 1; i + 1 <= grid; ++i) {
    if (!ok[i - 1] || !ok[i] || !ok[i + 1]) continue;
    if (fs[i] * fs[i - 1] <= 0.0 || fs[i] * fs[i + 1] <= 0.0) continue;
    if (std::fabs(fs[i]) > std::fabs(fs[i - 1]) || std::fabs(fs[i]) > std::fabs(fs[i + 1]))
      continue;
    if (std::fabs(fs[i]) > 1e-2) continue;
    double a = rs[i - 1], b = rs[i + 1];
    const double sign = fs[i] > 0.0 ? 1.0 : -1.0;
    for (int it = 0; it < 200; ++it) {  // golden-section on sign * f
      const double m1 = a + 0.381966011250105 * (b - a);
      const double m2 = b - 0.381966011250105 * (b - a);
      if (sign * f_at(m1) < sign * f_at(m2)) b = m2; else a = m1;
      if (b - a < 1e-13) break;
    }
    const double rm = 0.5 * (a + b);
    const double fm = f_at(rm);
    if (sign * fm < 0.0) {
      bisect(rs[i - 1], rm);  // the dip crosses: two roots straddle the minimum
      bisect(rm, rs[i + 1]);
    } else if (std::fabs(fm) <= 1e-12) {
      found.push_back(point_at(rm));  // exact tangency
    }
  }
  return found;
}

}  // namespace detail

// Every intersection of the two level curves in the unit square for the
// given phase branch, polished to residuals <= 1e-12 and de-duplicated at
// distance 1e-8. (0,0) is always a solution and is always included.
inline std::vector<SyncSolution> solve_all(const Coupling& coupling, double psi, int grid = 400) {
  validate(coupling);
  const bool anti = psi != 0.0;
  if (anti && std::fabs(psi - pi_const) > 1e-12)
    throw std::domain_error("solve_all: psi must be 0 or pi");
  const Coupling c = anti ? flipped(coupling) : coupling;

  std::vector<std::array<double, 2>> pts;
  if (c.l2 != 0.0) {
    pts = detail::scan_intersections(c, 2, grid);
  } else if (c.l1 != 0.0) {
    pts = detail::scan_intersections(c, 1, grid);
  } else {
    // decoupled communities: product of the one-community solution sets
    pts.push_back({0.0, 0.0});
    const double f1 = symmetric_fixed_point(c.k1);
    const double f2 = symmetric_fixed_point(c.k2);
    if (f1 > 0.0) pts.push_back({f1, 0.0});
    if (f2 > 0.0) pts.push_back({0.0, f2});
    if (f1 > 0.0 && f2 > 0.0) pts.push_back({f1, f2});
  }

  std::vector<SyncSolution> out;
  for (auto& p : pts) {
    double r1 = p[0], r2 = p[1];
    if (!(r1 == 0.0 && r2 == 0.0)) {
      detail::newton_polish(c, r1, r2, 1e-13);
      const double e1 = residual(c, 1, r1, r2);
      const double e2 = residual(c, 2, r1, r2);
      if (std::max(std::fabs(e1), std::fabs(e2)) > 1e-10) continue;
      if (r1 < -1e-12 || r1 > 1.0 + 1e-12 || r2 < -1e-12 || r2 > 1.0 + 1e-12) continue;
      r1 = std::clamp(r1, 0.0, 1.0);
      r2 = std::clamp(r2, 0.0, 1.0);
    }
    bool dup = false;
    for (auto& q : out) {
      if (std::hypot(q.r1 - r1, q.r2 - r2) < 1e-8) { dup = true; break; }
    }
    if (!dup) out.push_back({r1, r2, anti ? pi_const : 0.0});
  }
  std::sort(out.begin(), out.end(), [](const SyncSolution& a, const SyncSolution& b) {
    return a.r1 != b.r1 ? a.r1 < b.r1 : a.r2 < b.r2;
  });
  return out;
}

}  // namespace kuramoto2c
