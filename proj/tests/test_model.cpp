#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "kuramoto2c/classify.hpp"
#include "kuramoto2c/model.hpp"
#include "oracles.hpp"

using namespace kuramoto2c;
using Catch::Matchers::WithinAbs;

namespace {

// scalar bisection oracle for r = V(s r), independent of symmetric_fixed_point
double fp_oracle(double s) {
  double lo = 1e-12, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (lo + hi);
    if (v(s * m) - m > 0) lo = m; else hi = m;
  }
  return 0.5 * (lo + hi);
}

Coupling random_coupling(oracle::Rng& rng, int sign_pattern) {
  const double sl1 = (sign_pattern & 1) ? 1.0 : -1.0;
  const double sl2 = (sign_pattern & 2) ? 1.0 : -1.0;
  return {rng.uniform(-4.0, 9.0), rng.uniform(-4.0, 9.0), sl1 * rng.uniform(0.3, 5.0),
          sl2 * rng.uniform(0.3, 5.0)};
}

bool matched(const std::vector<SyncSolution>& sols, double r1, double r2, double tol) {
  for (const auto& s : sols)
    if (std::hypot(s.r1 - r1, s.r2 - r2) < tol) return true;
  return false;
}

}  // namespace

TEST_CASE("residual definition") {
  CHECK(residual({1.7, -0.3, 2.2, -4.0}, 1, 0.0, 0.0) == 0.0);
  CHECK_THAT(residual({2, 3, 0, 5}, 2, 0.0, 0.724159), WithinAbs(0.0, 1e-4));
  const double r = fp_oracle(5.0);
  CHECK_THAT(residual({4, 4, 1, 1}, 1, r, r), WithinAbs(0.0, 1e-6));
  CHECK_THROWS_AS(residual({1, 1, 1, 1}, 3, 0.1, 0.1), std::domain_error);
}

TEST_CASE("symmetric fixed point") {
  CHECK(symmetric_fixed_point(2.0) == 0.0);
  CHECK(symmetric_fixed_point(-1.0) == 0.0);
  CHECK_THAT(symmetric_fixed_point(3.0), WithinAbs(0.724159, 1e-4));
  const double r5 = symmetric_fixed_point(5.0);
  CHECK_THAT(r5, WithinAbs(fp_oracle(5.0), 1e-12));
  CHECK(r5 > 0.85);
  CHECK(r5 < 0.92);
}

TEST_CASE("turning point solves the fold system") {
  const TurningPoint tp = turning_point(6.0, -3.0);
  // oracle: bisection on r - V(6r / (6(1-r^2)-1)) over (0, sqrt(1-1/6))
  double lo = 1e-9, hi = std::sqrt(1.0 - 1.0 / 6.0) - 1e-12;
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (lo + hi);
    if (m - v(6.0 * m / (6.0 * (1.0 - m * m) - 1.0)) > 0) lo = m; else hi = m;
  }
  CHECK_THAT(tp.r1, WithinAbs(0.5 * (lo + hi), 1e-10));
  // both defining equations hold
  const double x = 6.0 * tp.r1 / (6.0 * (1.0 - tp.r1 * tp.r1) - 1.0);
  CHECK_THAT(v(x), WithinAbs(tp.r1, 1e-10));
  CHECK_THAT((-36.0 * std::pow(tp.r1, 3) + 36.0 * tp.r1 - 12.0 * tp.r1) /
                 (-3.0 * (6.0 * tp.r1 * tp.r1 - 6.0 + 1.0)),
             WithinAbs(tp.r2, 1e-10));
  CHECK(tp.r1 > 0.0);
  CHECK(tp.r2 > 0.0);

  // at L1 = L1^a(6) = -2.187 the apex touches the top edge
  CHECK_THAT(turning_point(6.0, -2.187).r2, WithinAbs(1.0, 5e-3));
  // just past K1^a(-3) = 7.143 the apex leaves the unit square
  CHECK(turning_point(7.15, -3.0).r2 > 1.0);
  CHECK(turning_point(7.13, -3.0).r2 < 1.0);

  CHECK_THROWS_AS(turning_point(1.5, -3.0), std::domain_error);
  CHECK_THROWS_AS(turning_point(6.0, 0.5), std::domain_error);
}

TEST_CASE("trace_curve shapes") {
  SECTION("trivial") {
    const LevelCurve lc = trace_curve({1.0, 1.0, -1.0, 1.0}, 1, 64);
    CHECK(lc.shape == CurveShape::Trivial);
    REQUIRE(lc.samples.size() == 1);
    CHECK(lc.samples[0][0] == 0.0);
    CHECK(lc.samples[0][1] == 0.0);
  }
  SECTION("convex disconnected stays above the one-community level") {
    const LevelCurve lc = trace_curve({3.0, 1.0, 2.0, 1.0}, 1, 128);
    CHECK(lc.shape == CurveShape::ConvexDisconnected);
    const double fp = fp_oracle(3.0);
    for (const auto& s : lc.samples) {
      CHECK(s[0] >= fp - 1e-9);
      CHECK_THAT(residual({3.0, 1.0, 2.0, 1.0}, 1, s[0], s[1]), WithinAbs(0.0, 1e-10));
    }
  }
  SECTION("parabola apex equals the turning point") {
    const Coupling c{6.0, 1.0, -3.0, 1.0};
    const LevelCurve lc = trace_curve(c, 1, 201);
    CHECK(lc.shape == CurveShape::Parabola);
    const TurningPoint tp = turning_point(6.0, -3.0);
    double apex = 0.0;
    for (const auto& s : lc.samples) {
      apex = std::max(apex, s[1]);
      CHECK_THAT(residual(c, 1, s[0], s[1]), WithinAbs(0.0, 1e-10));
    }
    CHECK_THAT(apex, WithinAbs(tp.r2, 1e-9));
    CHECK(lc.samples.front()[0] == 0.0);  // arch starts at the origin
  }
  SECTION("convex connected starts at the origin") {
    const Coupling c{1.5, 1.0, 2.0, 1.0};
    const LevelCurve lc = trace_curve(c, 1, 64);
    CHECK(lc.shape == CurveShape::ConvexConnected);
    CHECK(lc.samples.front()[0] == 0.0);
    CHECK(lc.samples.front()[1] == 0.0);
    for (const auto& s : lc.samples)
      CHECK_THAT(residual(c, 1, s[0], s[1]), WithinAbs(0.0, 1e-10));
  }
  SECTION("second curve mirrors the roles") {
    const Coupling c{1.0, 6.0, 1.0, -3.0};
    const LevelCurve lc = trace_curve(c, 2, 200);
    CHECK(lc.shape == CurveShape::Parabola);
    for (const auto& s : lc.samples)
      CHECK_THAT(residual(c, 2, s[0], s[1]), WithinAbs(0.0, 1e-10));
  }
  CHECK_THROWS_AS(trace_curve({1, 1, 1, 1}, 1, 8), std::domain_error);
  CHECK_THROWS_AS(trace_curve({1, 1, 0, 1}, 1, 64), std::domain_error);
}

TEST_CASE("solve_all on reference configurations") {
  SECTION("unsynchronized only when the zero boundary is not yet crossed") {
    const auto sols = solve_all({1.0, 1.0, 0.5, 0.5}, 0.0);
    REQUIRE(sols.size() == 1);
    CHECK(sols[0].r1 == 0.0);
    CHECK(sols[0].r2 == 0.0);
  }
  SECTION("tangency pair just past the pop-up point") {
    const auto sols = solve_all({3.9175, 2.0, -1.0, 3.0}, 0.0);
    REQUIRE(sols.size() >= 2);
    CHECK(matched(sols, 0.5699, 0.8325, 5e-3));
  }
  SECTION("interior of the fold pair carries four solutions") {
    const auto sols = solve_all({5.5, 6.5, -2.0, -3.0}, 0.0);
    CHECK(sols.size() == 4);
  }
}

TEST_CASE("psi = pi equals psi = 0 with negated cross couplings") {
  oracle::Rng rng(99);
  for (int trial = 0; trial < 24; ++trial) {
    const Coupling c = random_coupling(rng, trial % 4);
    const auto anti = solve_all(c, pi_const);
    const auto flip = solve_all(flipped(c), 0.0);
    REQUIRE(anti.size() == flip.size());
    for (size_t i = 0; i < anti.size(); ++i) {
      CHECK_THAT(anti[i].r1, WithinAbs(flip[i].r1, 1e-10));
      CHECK_THAT(anti[i].r2, WithinAbs(flip[i].r2, 1e-10));
      CHECK(anti[i].psi == pi_const);
    }
  }
}

TEST_CASE("enumeration agrees with a dense grid scan") {
  oracle::Rng rng(4242);
  int done = 0;
  while (done < 32) {
    const Coupling c = random_coupling(rng, done % 4);
    const auto sols = solve_all(c, 0.0);
    // skip couplings sitting nearly on a tangency, where a grid oracle is
    // not a fair referee
    bool near_fold = false;
    for (const auto& s : sols)
      if (!(s.r1 == 0.0 && s.r2 == 0.0) &&
          std::fabs(beta_sync_residual(c, s.r1, s.r2)) < 1e-4)
        near_fold = true;
    if (near_fold) continue;
    CAPTURE(c.k1, c.k2, c.l1, c.l2);
    const auto ref = oracle::grid_scan_solutions(c, 400);
    REQUIRE(sols.size() == ref.size());
    for (const auto& p : ref) CHECK(matched(sols, p[0], p[1], 1e-6));
    ++done;
  }
}

TEST_CASE("counts respect the regional maxima and partial zeros are absent") {
  oracle::Rng rng(31337);
  for (int trial = 0; trial < 200; ++trial) {
    const Coupling c = random_coupling(rng, trial % 4);
    const auto sols = solve_all(c, 0.0);
    CHECK(static_cast<int>(sols.size()) <= max_solutions(region_of(c)));
    for (const auto& s : sols) {
      const bool zero1 = std::fabs(s.r1) < 1e-10;
      const bool zero2 = std::fabs(s.r2) < 1e-10;
      CHECK(zero1 == zero2);
    }
  }
}

TEST_CASE("symmetric couplings carry the symmetric solution") {
  oracle::Rng rng(5150);
  for (int trial = 0; trial < 20; ++trial) {
    const double s = rng.uniform(2.3, 7.0);
    const double l1 = rng.uniform(-2.0, 2.0);
    const double l2 = rng.uniform(-2.0, 2.0);
    if (std::fabs(l1) < 0.1 || std::fabs(l2) < 0.1) continue;
    const Coupling c{s - l1, s - l2, l1, l2};
    const double r = symmetric_fixed_point(s);
    REQUIRE(r > 0.0);
    CAPTURE(c.k1, c.k2, c.l1, c.l2, r);
    CHECK(matched(solve_all(c, 0.0), r, r, 1e-8));
  }
}
