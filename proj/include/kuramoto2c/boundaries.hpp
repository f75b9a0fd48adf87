#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kuramoto2c/errors.hpp"
#include "kuramoto2c/model.hpp"
#include "kuramoto2c/vkernel.hpp"

// Solution boundaries: the closed-form zero boundary, the synchronized
// boundary (a tangency condition evaluated on solutions), the partial-sync
// boundary, boundary sets, starting points and the asymptote systems.

namespace kuramoto2c {

enum class Param { k1, k2, l1, l2 };

inline const char* to_string(Param p) {
  switch (p) {
    case Param::k1: return "k1";
    case Param::k2: return "k2";
    case Param::l1: return "l1";
    case Param::l2: return "l2";
  }
  return "?";
}

inline double get_param(const Coupling& c, Param p) {
  switch (p) {
    case Param::k1: return c.k1;
    case Param::k2: return c.k2;
    case Param::l1: return c.l1;
    case Param::l2: return c.l2;
  }
  throw std::domain_error("get_param");
}

inline void set_param(Coupling& c, Param p, double value) {
  switch (p) {
    case Param::k1: c.k1 = value; return;
    case Param::k2: c.k2 = value; return;
    case Param::l1: c.l1 = value; return;
    case Param::l2: c.l2 = value; return;
  }
}

// ---------------------------------------------------------------------------
// zero boundary

struct BetaZero {
  double value = 0.0;
  // false in the four sign quadrants where bifurcation from zero cannot
  // happen regardless of the value
  bool bifurcation_possible = true;
};

// (K1-2)(K2-2) - L1 L2 in the generic case; at K = 2 the criterion
// degenerates to the relevant cross coupling (L1 L2 when both K equal 2).
inline BetaZero beta_zero(const Coupling& c) {
  validate(c);
  BetaZero out;
  if (c.k1 == 2.0 && c.k2 == 2.0)
    out.value = c.l1 * c.l2;
  else if (c.k1 == 2.0)
    out.value = c.l2;
  else if (c.k2 == 2.0)
    out.value = c.l1;
  else
    out.value = (c.k1 - 2.0) * (c.k2 - 2.0) - c.l1 * c.l2;
  out.bifurcation_possible = !((c.k1 < 2.0 && c.l1 < 0.0) || (c.k2 < 2.0 && c.l2 < 0.0) ||
                               (c.k1 > 2.0 && c.l1 > 0.0) || (c.k2 > 2.0 && c.l2 > 0.0));
  return out;
}

// Root of the generic zero boundary in one parameter, everything else
// fixed. The boundary is linear in each single parameter.
inline std::optional<double> beta_zero_root(Coupling c, Param p) {
  set_param(c, p, 0.0);
  const double b0 = beta_zero(c).value;
  set_param(c, p, 1.0);
  const double b1 = beta_zero(c).value;
  const double slope = b1 - b0;
  if (std::fabs(slope) < 1e-300) return std::nullopt;
  return -b0 / slope;
}

// ---------------------------------------------------------------------------
// synchronized boundary

// (L1 L2 - K1 K2) C11 C21 + K1 C11 + K2 C21 - 1 with C11 = V'(K1 r1 + L1 r2)
// and C21 = V'(K2 r2 + L2 r1). Vanishes exactly where the Jacobian of the
// residual pair is singular, i.e. where the level curves touch.
inline double beta_sync_residual(const Coupling& c, double r1, double r2) {
  validate(c);
  const double c11 = v_prime(c.k1 * r1 + c.l1 * r2);
  const double c21 = v_prime(c.k2 * r2 + c.l2 * r1);
  return (c.l1 * c.l2 - c.k1 * c.k2) * c11 * c21 + c.k1 * c11 + c.k2 * c21 - 1.0;
}

struct BoundarySet {
  std::vector<double> values;                      // descending when two
  std::vector<std::array<double, 2>> levels;       // bifurcation levels
};

namespace detail {

struct BoundaryScanPoint {
  double value;
  double r1, r2;
};

// With three strengths fixed, a point on the non-traced curve determines
// the unknown strength through the membership condition of the other
// curve, turning beta_sync into a scalar function of one curve coordinate.
struct BoundaryReduction {
  Coupling base;
  Param unknown;
  int trace_which;  // curve that stays fixed while the unknown varies

  // valid returns false where the traced point leaves (0,1)^2 or the
  // unknown parameter is not determined
  bool eval(double r, BoundaryScanPoint& out) const {
    const double k = trace_which == 2 ? base.k2 : base.k1;
    const double l = trace_which == 2 ? base.l2 : base.l1;
    const double partner = curve_partner(k, l, r);
    const double r1 = trace_which == 2 ? partner : r;
    const double r2 = trace_which == 2 ? r : partner;
    if (!(r1 > 1e-9 && r1 < 1.0 && r2 > 1e-9 && r2 < 1.0)) return false;
    double value;
    switch (unknown) {
      case Param::k1: value = (v_inverse(r1) - base.l1 * r2) / r1; break;
      case Param::l1: value = (v_inverse(r1) - base.k1 * r1) / r2; break;
      case Param::k2: value = (v_inverse(r2) - base.l2 * r1) / r2; break;
      case Param::l2: value = (v_inverse(r2) - base.k2 * r2) / r1; break;
      default: return false;
    }
    if (!std::isfinite(value)) return false;
    out = {value, r1, r2};
    return true;
  }

  double beta(double r) const {
    BoundaryScanPoint p;
    if (!eval(r, p)) return std::numeric_limits<double>::quiet_NaN();
    Coupling c = base;
    set_param(c, unknown, p.value);
    return beta_sync_residual(c, p.r1, p.r2);
  }
};

}  // namespace detail

// All solutions of {h1 = 0, h2 = 0, beta_sync = 0} in the unknown
// parameter, with bifurcation levels in (0,1)^2. Values are returned in
// descending order; levels match. Empty when no tangency exists. The
// origin limit of the scan (level -> (0,0), where beta_sync degenerates to
// the zero boundary) is excluded by a small level floor.
inline BoundarySet solve_boundary_set(const Coupling& fixed, Param unknown, int grid = 2000) {
  validate(fixed);
  const bool unknown_is_1 = unknown == Param::k1 || unknown == Param::l1;
  detail::BoundaryReduction red{fixed, unknown, unknown_is_1 ? 2 : 1};
  const double l_trace = unknown_is_1 ? fixed.l2 : fixed.l1;
  if (l_trace == 0.0)
    throw std::domain_error("solve_boundary_set: traced curve needs a nonzero cross coupling");

  // no tangency can exist with both cross couplings positive
  if ((unknown == Param::k1 || unknown == Param::k2) && fixed.l1 > 0.0 && fixed.l2 > 0.0)
    return {};

  const double r_lo = 1e-3, r_hi = 1.0 - 1e-6;
  std::vector<double> rs(grid + 1), fs(grid + 1);
  std::vector<char> ok(grid + 1);
  for (int i = 0; i <= grid; ++i) {
    rs[i] = r_lo + (r_hi - r_lo) * i / grid;
    const double f = red.beta(rs[i]);
    ok[i] = std::isfinite(f);
    fs[i] = ok[i] ? f : 0.0;
  }

  std::vector<detail::BoundaryScanPoint> roots;
  auto accept = [&](double r) {
    detail::BoundaryScanPoint p;
    if (!red.eval(r, p)) return;
    if (std::min(p.r1, p.r2) < 1e-3) return;  // origin-limit degenerate root
    roots.push_back(p);
  };
  auto bisect = [&](double a, double b) {
    double fa = red.beta(a);
    for (int it = 0; it < 100; ++it) {
      const double m = 0.5 * (a + b);
      const double fm = red.beta(m);
      if (fa * fm <= 0.0) b = m; else { a = m; fa = fm; }
      if (b - a < 1e-14) break;
    }
    accept(0.5 * (a + b));
  };

  for (int i = 0; i < grid; ++i) {
    if (!ok[i] || !ok[i + 1]) continue;
    if (fs[i] * fs[i + 1] < 0.0) bisect(rs[i], rs[i + 1]);
  }
  // a coincident pair (starting point) appears as a dip touching zero
  for (int i = 1; i + 1 <= grid; ++i) {
    if (!ok[i - 1] || !ok[i] || !ok[i + 1]) continue;
    if (fs[i] * fs[i - 1] <= 0.0 || fs[i] * fs[i + 1] <= 0.0) continue;
    if (std::fabs(fs[i]) > std::fabs(fs[i - 1]) || std::fabs(fs[i]) > std::fabs(fs[i + 1]))
      continue;
    if (std::fabs(fs[i]) > 1e-3) continue;
    double a = rs[i - 1], b = rs[i + 1];
    const double sign = fs[i] > 0.0 ? 1.0 : -1.0;
    for (int it = 0; it < 200; ++it) {
      const double m1 = a + 0.381966011250105 * (b - a);
      const double m2 = b - 0.381966011250105 * (b - a);
      if (sign * red.beta(m1) < sign * red.beta(m2)) b = m2; else a = m1;
      if (b - a < 1e-13) break;
    }
    const double rm = 0.5 * (a + b);
    const double fm = red.beta(rm);
    if (sign * fm < 0.0) {
      bisect(rs[i - 1], rm);
      bisect(rm, rs[i + 1]);
    } else if (std::fabs(fm) <= 1e-9) {
      accept(rm);
    }
  }

  BoundarySet out;
  std::sort(roots.begin(), roots.end(),
            [](const auto& a, const auto& b) { return a.value > b.value; });
  for (const auto& p : roots) {
    bool dup = false;
    for (size_t j = 0; j < out.values.size(); ++j) {
      if (std::fabs(out.values[j] - p.value) < 1e-7 &&
          std::hypot(out.levels[j][0] - p.r1, out.levels[j][1] - p.r2) < 1e-6) {
        dup = true;
        break;
      }
    }
    if (dup) continue;
    out.values.push_back(p.value);
    out.levels.push_back({p.r1, p.r2});
  }
  return out;
}

// ---------------------------------------------------------------------------
// partial-sync boundary

// L1 when K2 > 2, else L2 when K1 > 2, else absent. A zero value flags a
// bifurcation from a partially synchronized state.
inline std::optional<double> beta_psync(const Coupling& c) {
  validate(c);
  if (c.k2 > 2.0) return c.l1;
  if (c.k1 > 2.0) return c.l2;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// starting point

struct StartingPoint {
  double p1 = 0.0;  // K1s (or L1s in the dual)
  double p2 = 0.0;  // K2s (or L2s)
  std::array<double, 2> level{0.0, 0.0};
};

namespace detail {

// Solve a scalar equation on (0,1) given as g(r) with an explicit partner
// map; collects every bracketed root.
inline std::vector<double> scan_roots01(const std::function<double(double)>& g, int grid) {
  std::vector<double> roots;
  double prev_r = 0.0, prev_f = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i <= grid; ++i) {
    const double r = 1e-6 + (1.0 - 2e-6) * i / grid;
    const double f = g(r);
    if (std::isfinite(prev_f) && std::isfinite(f) && prev_f * f < 0.0) {
      double a = prev_r, b = r, fa = prev_f;
      for (int it = 0; it < 100; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = g(m);
        if (fa * fm <= 0.0) b = m; else { a = m; fa = fm; }
        if (b - a < 1e-14) break;
      }
      roots.push_back(0.5 * (a + b));
    }
    prev_r = r;
    prev_f = f;
  }
  return roots;
}

}  // namespace detail

// Point where the two elements of a boundary set coincide, for fixed
// cross couplings L1, L2 < 0: solves {h1 = 0, h2 = 0,
// C11 = 1/(K1 - L1), C21 = 1/(K2 - L2)} for (K1s, K2s, r1, r2). The slope
// conditions pin r2 as an explicit function of r1, reducing the system to
// one scalar equation.
inline StartingPoint starting_point_from_l(double l1, double l2) {
  if (!(l1 < 0.0 && l2 < 0.0))
    throw std::domain_error("starting_point_from_l: requires l1 < 0 and l2 < 0");
  auto phi1 = [&](double r1) {
    const double a1 = v_inverse(r1);
    return (a1 - r1 / v_prime(a1)) / l1 - r1;
  };
  auto g = [&](double r1) {
    const double r2 = phi1(r1);
    if (!(r2 > 0.0 && r2 < 1.0)) return std::numeric_limits<double>::quiet_NaN();
    const double a2 = v_inverse(r2);
    return l2 * (r1 + r2) - a2 + r2 / v_prime(a2);
  };
  const auto roots = detail::scan_roots01(g, 4000);
  if (roots.empty()) throw not_found_error("starting_point_from_l: no solution in (0,1)^2");
  const double r1 = roots.front();
  const double r2 = phi1(r1);
  const double a1 = v_inverse(r1), a2 = v_inverse(r2);
  return {(a1 - l1 * r2) / r1, (a2 - l2 * r1) / r2, {r1, r2}};
}

// Dual form with the internal strengths fixed (both above threshold);
// solves for the cross couplings (L1s, L2s), which come out negative.
inline StartingPoint starting_point_from_k(double k1, double k2) {
  if (!(k1 > 2.0 && k2 > 2.0))
    throw std::domain_error("starting_point_from_k: requires k1 > 2 and k2 > 2");
  auto psi1 = [&](double r1) {
    const double a1 = v_inverse(r1);
    return (a1 - k1 * r1) / (k1 - 1.0 / v_prime(a1));
  };
  auto g = [&](double r1) {
    const double r2 = psi1(r1);
    if (!(r2 > 0.0 && r2 < 1.0)) return std::numeric_limits<double>::quiet_NaN();
    const double a2 = v_inverse(r2);
    return a2 - k2 * (r1 + r2) + r1 / v_prime(a2);
  };
  const auto roots = detail::scan_roots01(g, 4000);
  if (roots.empty()) throw not_found_error("starting_point_from_k: no solution in (0,1)^2");
  const double r1 = roots.front();
  const double r2 = psi1(r1);
  const double a1 = v_inverse(r1), a2 = v_inverse(r2);
  return {k1 - 1.0 / v_prime(a1), k2 - 1.0 / v_prime(a2), {r1, r2}};
}

// ---------------------------------------------------------------------------
// asymptotes

struct Asymptote {
  char kind = 'a';
  Param which = Param::k1;
  double value = 0.0;
  std::array<double, 2> level{0.0, 0.0};
};

namespace detail {

// apex ordinate of the parabola-shaped curve with strengths (k, l): the
// partner coordinate of the turning point
inline double apex_partner(double k, double l) {
  const double r = turning_abscissa(k);
  const double x = k * r / (k * (1.0 - r * r) - 1.0);
  return (x - k * r) / l;
}

// K^a(L): value of the internal strength at which the fold apex reaches
// the far edge of the unit square. Scalar root of
// (a - L)(a(1 - r^2) - r) - a r = 0 with a = V^{-1}(r).
inline std::pair<double, double> asymptote_a_k(double l) {
  if (!(l < 0.0)) throw std::domain_error("asymptote_a: requires l < 0");
  auto phi = [&](double r) {
    const double a = v_inverse(r);
    return (a - l) * (a * (1.0 - r * r) - r) - a * r;
  };
  for (const double root : scan_roots01(phi, 4000)) {
    const double a = v_inverse(root);
    const double k = (a - l) / root;
    if (k > 2.0 && a * (1.0 - root * root) - root > 0.0) return {k, root};
  }
  throw not_found_error("asymptote_a: no admissible root in (0,1)");
}

// L^a(K): with the internal strength fixed the fold abscissa is already
// determined, leaving the cross coupling in closed form.
inline std::pair<double, double> asymptote_a_l(double k) {
  if (!(k > 2.0)) throw std::domain_error("asymptote_a: requires k > 2");
  const double r = turning_abscissa(k);
  const double x = k * r / (k * (1.0 - r * r) - 1.0);
  return {x - k * r, r};
}

}  // namespace detail

// Type-a asymptote: the fold apex of one level curve touches the far edge
// of the unit square. For which = K1/L1 the level is (r, 1); for K2/L2 it
// is (1, s).
inline Asymptote asymptote_a(Param which, double other) {
  if (!std::isfinite(other)) throw std::domain_error("asymptote_a: non-finite argument");
  Asymptote out;
  out.kind = 'a';
  out.which = which;
  switch (which) {
    case Param::k1: {
      auto [k, r] = detail::asymptote_a_k(other);
      out.value = k;
      out.level = {r, 1.0};
      break;
    }
    case Param::k2: {
      auto [k, r] = detail::asymptote_a_k(other);
      out.value = k;
      out.level = {1.0, r};
      break;
    }
    case Param::l1: {
      auto [l, r] = detail::asymptote_a_l(other);
      out.value = l;
      out.level = {r, 1.0};
      break;
    }
    case Param::l2: {
      auto [l, r] = detail::asymptote_a_l(other);
      out.value = l;
      out.level = {1.0, r};
      break;
    }
  }
  return out;
}

// Type-b asymptote: the fold apex aligns with the other curve's
// intersection with its own axis (the one-community level of the other
// community, which therefore must exist: opposite K > 2).
//
//   which = l1 : fixed = {k1, k2};  which = l2 : fixed = {k1, k2}
//   which = k1 : fixed = {k2, l1};  which = k2 : fixed = {k1, l2}
inline Asymptote asymptote_b(Param which, double fixed_a, double fixed_b) {
  if (!std::isfinite(fixed_a) || !std::isfinite(fixed_b))
    throw std::domain_error("asymptote_b: non-finite argument");
  Asymptote out;
  out.kind = 'b';
  out.which = which;
  switch (which) {
    case Param::l1: {
      const double k1 = fixed_a, k2 = fixed_b;
      if (!(k1 > 2.0 && k2 > 2.0)) throw std::domain_error("asymptote_b: requires k1, k2 > 2");
      const double r1 = detail::turning_abscissa(k1);
      const double x = k1 * r1 / (k1 * (1.0 - r1 * r1) - 1.0);
      const double r2 = symmetric_fixed_point(k2);
      out.value = (x - k1 * r1) / r2;
      out.level = {r1, r2};
      break;
    }
    case Param::l2: {
      const double k1 = fixed_a, k2 = fixed_b;
      if (!(k1 > 2.0 && k2 > 2.0)) throw std::domain_error("asymptote_b: requires k1, k2 > 2");
      const double r2 = detail::turning_abscissa(k2);
      const double x = k2 * r2 / (k2 * (1.0 - r2 * r2) - 1.0);
      const double r1 = symmetric_fixed_point(k1);
      out.value = (x - k2 * r2) / r1;
      out.level = {r1, r2};
      break;
    }
    case Param::k1: {
      const double k2 = fixed_a, l1 = fixed_b;
      if (!(l1 < 0.0)) throw std::domain_error("asymptote_b: requires l1 < 0");
      if (!(k2 > 2.0)) throw std::domain_error("asymptote_b: requires k2 > 2");
      const double target = symmetric_fixed_point(k2);
      const double k_hi = detail::asymptote_a_k(l1).first;  // apex reaches 1 here
      double lo = 2.0 + 1e-9, hi = k_hi;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (detail::apex_partner(mid, l1) < target) lo = mid; else hi = mid;
        if (hi - lo < 1e-13) break;
      }
      out.value = 0.5 * (lo + hi);
      out.level = {detail::turning_abscissa(out.value), target};
      break;
    }
    case Param::k2: {
      const double k1 = fixed_a, l2 = fixed_b;
      if (!(l2 < 0.0)) throw std::domain_error("asymptote_b: requires l2 < 0");
      if (!(k1 > 2.0)) throw std::domain_error("asymptote_b: requires k1 > 2");
      const double target = symmetric_fixed_point(k1);
      const double k_hi = detail::asymptote_a_k(l2).first;
      double lo = 2.0 + 1e-9, hi = k_hi;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (detail::apex_partner(mid, l2) < target) lo = mid; else hi = mid;
        if (hi - lo < 1e-13) break;
      }
      out.value = 0.5 * (lo + hi);
      out.level = {target, detail::turning_abscissa(out.value)};
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// boundary tracing in a two-parameter slice

struct BoundaryPolyline {
  std::string label;  // "zero" or "sync"
  std::vector<std::array<double, 2>> points;  // (x param, y param)
};

struct Slice {
  Coupling base;   // fixed values; the varied slots are overwritten
  Param x_axis = Param::k1;
  Param y_axis = Param::k2;
  double x_lo = 0.0, x_hi = 1.0;
  double y_lo = 0.0, y_hi = 1.0;
};

enum class BoundaryKind { zero, sync };

// Polylines of one boundary inside the slice window. The zero boundary is
// evaluated from its closed form column by column (it is linear in the
// y parameter for fixed x); the sync boundary is enumerated per column by
// solve_boundary_set, which yields both branches through the fold without
// any continuation step control.
inline std::vector<BoundaryPolyline> trace_boundary_2d(const Slice& slice, BoundaryKind kind,
                                                       int n = 128) {
  if (n < 32) throw std::domain_error("trace_boundary_2d: n must be >= 32");
  if (!(slice.x_hi > slice.x_lo) || !(slice.y_hi > slice.y_lo))
    throw std::domain_error("trace_boundary_2d: empty range");
  std::vector<BoundaryPolyline> out;

  if (kind == BoundaryKind::zero) {
    BoundaryPolyline cur{"zero", {}};
    for (int i = 0; i <= n; ++i) {
      const double x = slice.x_lo + (slice.x_hi - slice.x_lo) * i / n;
      Coupling c = slice.base;
      set_param(c, slice.x_axis, x);
      const auto root = beta_zero_root(c, slice.y_axis);
      bool keep = false;
      if (root && *root >= slice.y_lo && *root <= slice.y_hi) {
        set_param(c, slice.y_axis, *root);
        if (beta_zero(c).bifurcation_possible) {
          if (!cur.points.empty() &&
              std::fabs(cur.points.back()[1] - *root) > 0.25 * (slice.y_hi - slice.y_lo)) {
            out.push_back(cur);  // split at a pole of the hyperbola
            cur.points.clear();
          }
          cur.points.push_back({x, *root});
          keep = true;
        }
      }
      if (!keep && !cur.points.empty()) {
        out.push_back(cur);
        cur.points.clear();
      }
    }
    if (!cur.points.empty()) out.push_back(cur);
    return out;
  }

  // sync: per-column enumeration; columns carry 0, 1 or 2 points and the
  // two branches are linked by proximity so the fold and the escape past a
  // vertical asymptote both come out right
  BoundaryPolyline upper{"sync", {}}, lower{"sync", {}};
  for (int i = 0; i <= n; ++i) {
    const double x = slice.x_lo + (slice.x_hi - slice.x_lo) * i / n;
    Coupling c = slice.base;
    set_param(c, slice.x_axis, x);
    BoundarySet bs;
    try {
      bs = solve_boundary_set(c, slice.y_axis, 800);
    } catch (const std::domain_error&) {
      bs = {};
    }
    std::vector<double> ys;
    for (const double y : bs.values)
      if (y >= slice.y_lo && y <= slice.y_hi) ys.push_back(y);  // already descending
    if (ys.size() >= 2) {
      upper.points.push_back({x, ys.front()});
      lower.points.push_back({x, ys.back()});
    } else if (ys.size() == 1) {
      const double y = ys.front();
      auto dist = [&](const BoundaryPolyline& p) {
        return p.points.empty() ? std::numeric_limits<double>::infinity()
                                : std::fabs(p.points.back()[1] - y);
      };
      if (dist(lower) < dist(upper)) lower.points.push_back({x, y});
      else upper.points.push_back({x, y});
    }
  }
  if (!upper.points.empty()) out.push_back(upper);
  if (!lower.points.empty()) out.push_back(lower);
  return out;
}

}  // namespace kuramoto2c
