#pragma once

#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kuramoto2c/boundaries.hpp"
#include "kuramoto2c/errors.hpp"
#include "kuramoto2c/model.hpp"

// Region classification: the ten fundamental regions, the admissible
// bifurcation types per region, and the exact solution count obtained by
// combining the boundary predicates with direct enumeration.

namespace kuramoto2c {

enum class Region { R1 = 1, R2, R3, R4, R5, R6, R7, R8, R9, R10 };

inline const char* to_string(Region r) {
  static const char* names[] = {"R1", "R2", "R3", "R4", "R5", "R6", "R7", "R8", "R9", "R10"};
  return names[static_cast<int>(r) - 1];
}

// Fundamental region of a coupling. R1 (a community with a trivial curve)
// is checked first; its comparisons are taken inclusively at K = 2, where
// the curve is still only the origin.
inline Region region_of(const Coupling& c) {
  validate(c);
  if (c.l1 == 0.0 || c.l2 == 0.0)
    throw std::domain_error("region_of: cross couplings must be nonzero");
  if ((c.k1 <= 2.0 && c.l1 < 0.0) || (c.k2 <= 2.0 && c.l2 < 0.0)) return Region::R1;
  if (c.l1 > 0.0 && c.l2 > 0.0) {
    if (c.k1 <= 2.0 && c.k2 <= 2.0) return Region::R2;
    if (c.k1 > 2.0 && c.k2 > 2.0) return Region::R3;
    if (c.k1 <= 2.0) return Region::R4;
    return Region::R5;
  }
  if (c.l1 < 0.0 && c.l2 > 0.0) return c.k2 > 2.0 ? Region::R6 : Region::R8;
  if (c.l1 > 0.0 && c.l2 < 0.0) return c.k1 > 2.0 ? Region::R7 : Region::R9;
  return Region::R10;  // both cross couplings negative, both K above 2
}

inline int max_solutions(Region r) {
  switch (r) {
    case Region::R1: return 1;
    case Region::R2:
    case Region::R3:
    case Region::R4:
    case Region::R5: return 2;
    case Region::R6:
    case Region::R7:
    case Region::R8:
    case Region::R9: return 3;
    case Region::R10: return 4;
  }
  return 0;
}

struct BifurcationTypes {
  bool zero = false;
  bool psync = false;
  bool sync = false;
};

inline BifurcationTypes bifurcation_types(Region r) {
  switch (r) {
    case Region::R1: return {false, false, false};
    case Region::R2: return {true, false, false};
    case Region::R3:
    case Region::R4:
    case Region::R5: return {false, true, false};
    case Region::R6:
    case Region::R7: return {false, true, true};
    case Region::R8:
    case Region::R9:
    case Region::R10: return {true, true, true};
  }
  return {};
}

struct RegionReport {
  Region region = Region::R1;
  int max_solutions = 1;
  BifurcationTypes types;
  int exact_count = 1;
  std::string label;
  bool degenerate = false;  // within tolerance of a solution boundary
};

namespace detail {

inline std::string count_label(int count) {
  if (count <= 1) return "1 unsync";
  std::ostringstream os;
  os << "1 unsync + " << (count - 1) << " sync";
  return os.str();
}

// Number of solutions the region's table predicts, using the boundary
// predicates only. Returns -1 when the table is not decisive here (on a
// boundary, or with an undetermined interior test); the caller then keeps
// the enumerated count and marks the report degenerate.
inline int table_prediction(const Coupling& c, Region region, bool& degenerate) {
  const double b0 = beta_zero(c).value;
  const double b0_tol = 1e-9;
  switch (region) {
    case Region::R1: return 1;
    case Region::R2:
      if (std::fabs(b0) <= b0_tol) { degenerate = true; return 1; }
      return b0 > 0.0 ? 1 : 2;
    case Region::R3:
    case Region::R4:
    case Region::R5: return 2;
    default: break;
  }

  // the remaining regions need the tangency structure along the canonical
  // axis: the internal strength of a parabola-shaped community
  const Param axis = (region == Region::R6 || region == Region::R8 || region == Region::R10)
                         ? Param::k1
                         : Param::k2;
  const double here = get_param(c, axis);
  BoundarySet bs;
  try {
    bs = solve_boundary_set(c, axis);
  } catch (const std::domain_error&) {
    return -1;
  }
  const double near_tol = 1e-7 * std::max(1.0, std::fabs(here));
  for (const double value : bs.values) {
    if (std::fabs(here - value) <= near_tol) { degenerate = true; return -1; }
  }

  // parity of the tangency values below the current parameter decides
  // whether the line has entered the extra-solution pocket: each crossing
  // toggles membership, and lines above the horizontal asymptote enter the
  // pocket once without ever leaving it
  int below = 0;
  for (const double value : bs.values)
    if (value < here) ++below;
  const bool inside = (below % 2) == 1;

  switch (region) {
    case Region::R6:
    case Region::R7:
      return inside ? 3 : 1;
    case Region::R8:
    case Region::R9: {
      if (std::fabs(b0) <= b0_tol) { degenerate = true; return -1; }
      if (b0 < 0.0) return 2;
      return inside ? 3 : 1;
    }
    case Region::R10: {
      if (std::fabs(b0) <= b0_tol) { degenerate = true; return 1; }
      if (b0 < 0.0) return 1;
      return inside ? 4 : 2;
    }
    default: return -1;
  }
}

}  // namespace detail

// Full classification: region, admissible bifurcation types, and the exact
// solution count. The count is enumerated with solve_all and cross-checked
// against the region's table; a disagreement away from boundaries raises
// inconsistency_error.
inline RegionReport subclassify(const Coupling& c) {
  const Region region = region_of(c);
  RegionReport rep;
  rep.region = region;
  rep.max_solutions = max_solutions(region);
  rep.types = bifurcation_types(region);

  const int count = static_cast<int>(solve_all(c, 0.0).size());
  rep.exact_count = count;

  const int predicted = detail::table_prediction(c, region, rep.degenerate);
  if (predicted >= 0 && predicted != count && !rep.degenerate) {
    std::ostringstream os;
    os << "subclassify: table predicts " << predicted << " solutions but enumeration found "
       << count << " in " << to_string(region) << " at (" << c.k1 << ", " << c.k2 << ", " << c.l1
       << ", " << c.l2 << ")";
    throw inconsistency_error(os.str());
  }
  rep.label = detail::count_label(count);
  return rep;
}

}  // namespace kuramoto2c
