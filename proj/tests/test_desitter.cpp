#include <gtest/gtest.h>

#include <cmath>

#include "kgds/desitter.hpp"
#include "kgds/fdref.hpp"
#include "oracles.hpp"

using namespace kgds;

namespace {

const RadialProfile kPhi0 = RadialProfile::bump(0.5, 8);
const RadialProfile kPhi1 = RadialProfile::bump(0.4, 8, 0.5);

CauchyProblem problem(int n, double m, RadialProfile a = kPhi0, RadialProfile b = kPhi1) {
  return {MassParams::from_mass(n, m), std::move(a), std::move(b), {}};
}

// Phi'' + n Phi' + m^2 Phi = 1 with zero data, roots -n/2 +- mu (mu real, not 0).
double forced_ode(int n, double m, double t) {
  const double h = 0.5 * n;
  const double mu = std::sqrt(h * h - m * m);
  const double l1 = -h + mu, l2 = -h - mu;
  const double c = 1.0 / (m * m);
  // c + A e^{l1 t} + B e^{l2 t}, A + B = -c, l1 A + l2 B = 0
  const double B = c * l1 / (l2 - l1);
  const double A = -c - B;
  return c + A * std::exp(l1 * t) + B * std::exp(l2 * t);
}

}  // namespace

TEST(DeSitter, InitialConditions) {
  for (auto [n, m] : {std::pair{3, 1.0}, std::pair{3, 2.0}, std::pair{1, 0.3}, std::pair{5, 1.0}}) {
    const auto pb = problem(n, m);
    for (double r : {0.0, 0.2, 0.45}) {
      if (n == 5 && r != 0.0) continue;
      const Point x{r, 0, 0};
      EXPECT_EQ(solve(pb, x, 0.0), kPhi0(x));
      const double h = 1e-4;
      const double d = (-3 * solve(pb, x, 0.0) + 4 * solve(pb, x, h) - solve(pb, x, 2 * h)) / (2 * h);
      EXPECT_NEAR(d, kPhi1(x), 1e-5) << n << " " << m << " " << r;
    }
  }
}

TEST(DeSitter, ForwardDifferenceApproachesTheSecondDatumLinearly) {
  const auto pb = problem(3, 1.0);
  const Point x{0.1, 0, 0};
  const double p0 = solve(pb, x, 0.0);
  const double e3 = std::abs((solve(pb, x, 1e-3) - p0) / 1e-3 - kPhi1(x));
  const double e4 = std::abs((solve(pb, x, 1e-4) - p0) / 1e-4 - kPhi1(x));
  EXPECT_NEAR(e3 / e4, 10.0, 0.5);
}

TEST(DeSitter, VanishesOutsideTheInfluenceDomain) {
  for (auto [n, m] : {std::pair{3, 1.0}, std::pair{3, 2.0}, std::pair{1, 0.7}, std::pair{5, 1.2}}) {
    const auto pb = problem(n, m);
    for (double t : {0.3, 1.0, 4.0}) {
      const double edge = 0.5 + compact_time(t);
      if (n == 5) {
        // origin-only dimension: check the solution stays bounded instead
        EXPECT_TRUE(std::isfinite(solve(pb, {0, 0, 0}, t)));
        continue;
      }
      for (double r : {edge + 1e-3, edge + 0.1, edge + 0.4}) EXPECT_LE(std::abs(solve(pb, {r, 0, 0}, t)), 1e-10);
    }
  }
}

TEST(DeSitter, AgreesWithFiniteDifferences) {
  for (auto [n, m] : {std::pair{1, 0.0}, std::pair{1, 0.5}, std::pair{1, 1.0}, std::pair{1, 2.0}, std::pair{3, 0.0},
                      std::pair{3, 0.5}, std::pair{3, 1.0}, std::pair{3, 1.5}, std::pair{3, std::sqrt(2.0)},
                      std::pair{3, 2.0}, std::pair{3, 6.0}}) {
    const auto pb = problem(n, m);
    fd::FDConfig c;
    c.n = n;
    c.m = m;
    c.t_max = 2.0;
    const auto f = fd::fd_solve(c, kPhi0, kPhi1);
    double err = 0.0, scale = 0.0;
    for (int j = 1; j <= 10; ++j)
      for (int i = 0; i < 10; ++i) {
        const double t = 0.2 * j, r = 0.12 * i;
        const double u = fd::fd_probe(f, r, t);
        err = std::max(err, std::abs(solve(pb, {r, 0, 0}, t) - u));
        scale = std::max(scale, std::abs(u));
      }
    EXPECT_LE(err / scale, 1e-3) << n << " " << m;
  }
}

TEST(DeSitter, KnotClosedFormsMatchTheKernelQuadrature) {
  SolverOptions generic;
  generic.force_generic = true;
  for (auto [n, m] : {std::pair{1, 0.0}, std::pair{3, std::sqrt(2.0)}, std::pair{3, 0.0}, std::pair{5, std::sqrt(6.0)},
                      std::pair{5, 2.0}}) {
    const auto pb = problem(n, m);
    ASSERT_TRUE(pb.mp.is_knot());
    for (double t : {0.3, 1.0, 3.0})
      for (double r : {0.0, 0.3, 0.7}) {
        const Point x{r, 0, 0};
        if (n == 5 && r != 0.0) continue;
        const auto fast = solve_detailed(pb, x, t);
        EXPECT_EQ(fast.method, Method::knot_closed_form);
        const double slow = solve(pb, x, t, generic);
        EXPECT_NEAR(fast.value, slow, 1e-8) << n << " " << m << " " << t << " " << r;
      }
  }
}

TEST(DeSitter, GenericKnotAboveThreeHalves) {
  // n = 7 has the knot mu = 5/2; the representation handles it directly.
  const auto pb = problem(7, std::sqrt(12.25 - 6.25));
  ASSERT_TRUE(pb.mp.is_knot());
  const auto s = solve_detailed(pb, {0, 0, 0}, 1.0);
  EXPECT_EQ(s.method, Method::representation_small);
  EXPECT_TRUE(std::isfinite(s.value));
}

TEST(DeSitter, Linearity) {
  const auto a0 = RadialProfile::bump(0.3, 6), a1 = RadialProfile::bump(0.6, 7, -0.4);
  const auto b0 = RadialProfile::gaussian_trunc(0.5, 8, 3.0, 0.7), b1 = RadialProfile::bump(0.2, 9, 1.3);
  for (double m : {0.6, 1.8, 2.4}) {
    const auto A = problem(3, m, a0, a1), B = problem(3, m, b0, b1);
    const auto C = problem(3, m, 2.0 * a0 + (-0.5) * b0, 2.0 * a1 + (-0.5) * b1);
    for (double t : {0.5, 2.0})
      for (double r : {0.0, 0.25, 0.6}) {
        const Point x{r, 0, 0};
        const double lhs = solve(C, x, t);
        const double rhs = 2.0 * solve(A, x, t) - 0.5 * solve(B, x, t);
        EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs))) << m << " " << t << " " << r;
      }
  }
}

TEST(DeSitter, ZeroDataGivesZero) {
  for (double m : {0.5, 1.7, 4.0}) {
    const auto pb = problem(3, m, RadialProfile::zero(), RadialProfile::zero());
    EXPECT_EQ(solve(pb, {0.1, 0, 0}, 1.5), 0.0);
  }
}

TEST(DeSitter, ContinuousAcrossTheRegimeBoundary) {
  for (int n : {1, 3}) {
    const double h = 0.5 * n;
    const auto lo = problem(n, h - 1e-9), mid = problem(n, h), hi = problem(n, h + 1e-9);
    EXPECT_EQ(lo.mp.regime, Regime::small);
    EXPECT_EQ(hi.mp.regime, Regime::large);
    for (double t : {0.5, 2.0})
      for (double r : {0.0, 0.3}) {
        const Point x{r, 0, 0};
        const double c = solve(mid, x, t);
        EXPECT_NEAR(solve(lo, x, t), c, 1e-6);
        EXPECT_NEAR(solve(hi, x, t), c, 1e-6);
      }
  }
}

TEST(DeSitter, MasslessLineMatchesDAlembert) {
  const auto pb = problem(1, 0.0);
  for (double t : {0.1, 0.8, 3.0})
    for (double x : {-0.6, 0.0, 0.35, 1.1}) {
      const double a = solve_knot_n1_massless(pb, x, t);
      EXPECT_NEAR(solve(pb, {x, 0, 0}, t), a, 1e-13);
      SolverOptions g;
      g.force_generic = true;
      EXPECT_NEAR(solve(pb, {x, 0, 0}, t, g), a, 1e-8);
    }
  EXPECT_THROW(solve_knot_n1_massless(problem(1, 0.2), 0.0, 1.0), DomainError);
  // unit-mass second datum inside the final light cone: half of it is captured
  const auto unit = RadialProfile::bump(0.4, 8, 1.0 / oracle::simpson([](double y) {
    return RadialProfile::bump(0.4, 8).radial(std::abs(y));
  }, -0.4, 0.4, 2000));
  const auto late = problem(1, 0.0, RadialProfile::zero(), unit);
  EXPECT_NEAR(solve_knot_n1_massless(late, 0.0, 40.0), 0.5, 1e-9);
}

TEST(DeSitter, Dispatch) {
  EXPECT_EQ(solve_detailed(problem(3, std::sqrt(2.0)), {0, 0, 0}, 1.0).method, Method::knot_closed_form);
  EXPECT_EQ(solve_detailed(problem(3, 1.0), {0, 0, 0}, 1.0).method, Method::representation_small);
  EXPECT_EQ(solve_detailed(problem(3, 2.0), {0, 0, 0}, 1.0).method, Method::representation_large);
  EXPECT_EQ(to_string(Method::representation_large), "representation/large");
  EXPECT_THROW(solve_small_mass(problem(3, 2.0), {0, 0, 0}, 1.0), DomainError);
  EXPECT_THROW(solve_large_mass(problem(3, 1.0), {0, 0, 0}, 1.0), DomainError);
  EXPECT_NEAR(solve_small_mass(problem(3, 1.0), {0.2, 0, 0}, 1.0), solve(problem(3, 1.0), {0.2, 0, 0}, 1.0), 0.0);
  EXPECT_THROW(solve(problem(3, 1.0), {0, 0, 0}, -1.0), DomainError);
}

TEST(DeSitter, ByPartsRouteAgrees) {
  SolverOptions bp;
  bp.phi1_by_parts = true;
  for (double m : {0.3, 1.0, 2.0, 3.0}) {
    const auto pb = problem(3, m);
    for (double t : {0.4, 1.5})
      for (double r : {0.0, 0.35, 0.8}) {
        const Point x{r, 0, 0};
        EXPECT_NEAR(solve(pb, x, t, bp), solve(pb, x, t), 1e-8) << m << " " << t << " " << r;
      }
  }
}

TEST(DeSitter, OffCentreDataIsATranslate) {
  const Point c{0.2, -0.1, 0.15};
  const auto moved = problem(3, 1.3, RadialProfile::bump(0.4, 8, 1.0, c), RadialProfile::bump(0.3, 8, 0.5, c));
  const auto centred = problem(3, 1.3, RadialProfile::bump(0.4, 8), RadialProfile::bump(0.3, 8, 0.5));
  for (double t : {0.3, 1.2}) {
    const Point x{0.4, 0.1, -0.2};
    EXPECT_NEAR(solve(moved, x, t), solve(centred, {distance(x, c), 0, 0}, t), 1e-10);
  }
}

TEST(DeSitter, SourceWithConstantForcingSolvesTheODE) {
  for (double m : {std::sqrt(2.0), std::sqrt(2.25 - 0.64)}) {
    CauchyProblem pb = problem(3, m, RadialProfile::zero(), RadialProfile::zero());
    pb.forcing = SeparableForcing{[](double) { return 1.0; }, RadialProfile::constant(1.0)};
    for (double t : {0.5, 1.0, 2.0}) EXPECT_NEAR(solve_source(pb, {0.1, 0, 0}, t), forced_ode(3, m, t), 1e-7) << m;
  }
}

TEST(DeSitter, SourceAgreesWithForcedFiniteDifferences) {
  const auto psi = RadialProfile::bump(0.5, 8);
  const auto g = [](double b) { return std::cos(2.0 * b); };
  for (double mu : {0.5, 0.8}) {
    CauchyProblem pb{MassParams::from_mu(3, mu), RadialProfile::zero(), RadialProfile::zero(),
                     SeparableForcing{g, psi}};
    fd::FDConfig c;
    c.n = 3;
    c.m = pb.mp.m;
    c.t_max = 2.0;
    c.forcing = pb.forcing;
    const auto f = fd::fd_solve(c, RadialProfile::zero(), RadialProfile::zero());
    for (double t : {0.5, 1.0, 2.0})
      for (double r : {0.0, 0.3}) {
        const double u = fd::fd_probe(f, r, t);
        EXPECT_NEAR(solve_source(pb, {r, 0, 0}, t), u, 1e-2 * std::abs(u) + 1e-6) << mu << " " << t << " " << r;
      }
  }
}

TEST(DeSitter, SolveFieldCollectsSamples) {
  const auto pb = problem(3, 1.0);
  const auto field = solve_field(pb, {{0, 0, 0}, {0.3, 0, 0}}, {0.0, 0.5, 1.0});
  ASSERT_EQ(field.samples.size(), 6u);
  EXPECT_EQ(field.method, Method::representation_small);
  EXPECT_GT(field.quadrature_nodes, 0);
  EXPECT_EQ(field.samples[0].phi, kPhi0({0, 0, 0}));
}

TEST(DeSitter, Validation) {
  EXPECT_THROW(problem(3, 1.0, RadialProfile::bump(1.0, 8)).validate(), DomainError);
  EXPECT_THROW(problem(5, 1.0, RadialProfile::bump(0.3, 8, 1.0, {0.1, 0, 0})).validate(), DomainError);
  EXPECT_THROW(problem(4, 1.0).validate(), DomainError);
  EXPECT_NO_THROW(problem(2, 0.5).validate());
  CauchyProblem pb = problem(3, 1.0);
  pb.forcing = SeparableForcing{[](double) { return 1.0; }, RadialProfile::bump(0.3, 8)};
  EXPECT_THROW(solve(pb, {0, 0, 0}, 1.0), DomainError);
  EXPECT_THROW(solve_source(problem(3, 1.0), {0, 0, 0}, 1.0), DomainError);
}
