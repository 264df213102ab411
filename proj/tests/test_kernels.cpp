#include <gtest/gtest.h>

#include <cmath>

#include "kgds/kernels.hpp"
#include "oracles.hpp"

using kgds::MassParams;
using kgds::Regime;

namespace {

// admissible (z, t) grid: 40 times x 25 radii = 1000 points, t in (0, 3]
template <class F>
void for_each_admissible(F&& f) {
  for (int i = 1; i <= 40; ++i) {
    const double t = 3.0 * i / 40.0;
    const double edge = -std::expm1(-t);
    for (int j = 0; j < 25; ++j) f(edge * j / 24.0, t);
  }
}

}  // namespace

TEST(MassParams, RegimesAndKnots) {
  const auto a = MassParams::from_mass(3, std::sqrt(2.0));
  EXPECT_EQ(a.regime, Regime::small);
  EXPECT_EQ(a.mu, 0.5);
  EXPECT_TRUE(a.is_knot());
  const auto b = MassParams::from_mass(3, 0.0);
  EXPECT_EQ(b.mu, 1.5);
  EXPECT_TRUE(b.is_knot());
  const auto c = MassParams::from_mass(3, 1.0);
  EXPECT_NEAR(c.mu, std::sqrt(1.25), 1e-15);
  EXPECT_FALSE(c.is_knot());
  const auto d = MassParams::from_mass(3, 2.0);
  EXPECT_EQ(d.regime, Regime::large);
  EXPECT_NEAR(d.mu, std::sqrt(1.75), 1e-15);
  EXPECT_FALSE(d.is_knot());
  const auto e = MassParams::from_mass(3, 1.5);
  EXPECT_EQ(e.mu, 0.0);
  EXPECT_EQ(e.regime, Regime::small);
  EXPECT_TRUE(MassParams::from_mass(5, std::sqrt(6.0)).is_knot());
  EXPECT_TRUE(MassParams::from_mass(5, 2.0).is_knot());  // mu = 3/2
  EXPECT_FALSE(MassParams::from_mass(2, 0.0).is_knot());  // mu = 1
  EXPECT_THROW(MassParams::from_mass(3, -1.0), kgds::DomainError);
  EXPECT_THROW(MassParams::from_mass(0, 1.0), kgds::DomainError);
}

TEST(Kernels, KnotHalfClosedForms) {
  const auto mp = MassParams::from_mu(3, 0.5);
  for_each_admissible([&](double z, double t) {
    EXPECT_NEAR(kgds::eval_K1(mp, z, t).real(), 0.5 * std::exp(t / 2), 1e-12);
    EXPECT_NEAR(kgds::eval_K0(mp, z, t).real(), -0.25 * std::exp(t / 2), 1e-12);
    EXPECT_NEAR(kgds::dK1_ds(mp, z, t).real(), 0.0, 1e-12);
    EXPECT_EQ(kgds::eval_K1(mp, z, t).imag(), 0.0);
  });
  EXPECT_NEAR(kgds::eval_E(mp, 0.1, 1.2, 0.3).real(), 0.5 * std::exp(0.75), 1e-14);
}

TEST(Kernels, KnotThreeHalvesClosedForms) {
  const auto mp = MassParams::from_mu(3, 1.5);
  for_each_admissible([&](double z, double t) {
    const double q2 = std::exp(-2 * t);
    EXPECT_NEAR(kgds::eval_K1(mp, z, t).real(), 0.25 * std::exp(1.5 * t) * (1 + q2 - z * z), 1e-12);
    EXPECT_NEAR(kgds::eval_K0(mp, z, t).real(), 0.125 * std::exp(1.5 * t) * (3 * (z * z - q2) + 1), 1e-12);
    EXPECT_NEAR(kgds::dK1_ds(mp, z, t).real(), -0.5 * std::exp(1.5 * t) * z, 1e-12);
  });
  const double t = 1.1, t0 = 0.2, r = 0.3;
  EXPECT_NEAR(kgds::eval_E(mp, r, t, t0).real(),
              0.25 * std::exp(1.5 * (t0 + t)) * (std::exp(-2 * t0) + std::exp(-2 * t) - r * r), 1e-13);
}

TEST(Kernels, ReferenceValuesSmallMass) {
  const auto mp = MassParams::from_mu(3, 0.8);
  EXPECT_NEAR(kgds::eval_K1(mp, 0.3, 2.0).real(), 1.817580257532246789382180039874582471255, 1e-12);
  EXPECT_NEAR(kgds::eval_K0(mp, 0.3, 2.0).real(), -0.3468818007094111775129756368425793748999, 1e-12);
  const auto mp3 = MassParams::from_mu(3, 0.3);
  EXPECT_NEAR(kgds::dK1_ds(mp3, 0.4, 3.0).real(), 0.2596058431102845005988377383180656484688, 1e-12);
}

TEST(Kernels, K0MatchesRichardsonDifferenceInInitialTime) {
  const auto mp = MassParams::from_mu(3, 0.8);
  const double fd = -oracle::derivative([&](double b) { return kgds::eval_E(mp, 0.3, 2.0, b).real(); }, 0.0, 1e-3);
  EXPECT_NEAR(kgds::eval_K0(mp, 0.3, 2.0).real(), fd, 1e-9);
}

TEST(Kernels, LogarithmicParameters) {
  const auto one = MassParams::from_mu(3, 1.0);
  EXPECT_NEAR(kgds::eval_K1(one, 0.1, 2.5).real(), 3.90311463091179378915151488170167857001411329851862235590322, 1e-11);
  EXPECT_NEAR(kgds::eval_K0(one, 0.1, 2.5).real(), -0.038246365504320441137298610905801038144914214807859950788584, 1e-11);
  const auto zero = MassParams::from_mass(3, 1.5);
  EXPECT_NEAR(kgds::eval_K1(zero, 0.2, 1.5).real(), 0.933100838758160720093110165692459689975096308702811827133355, 1e-12);
}

TEST(Kernels, LargeMassReferenceAndReality) {
  const auto mp = MassParams::from_mass(3, 2.0);
  const auto mp2 = MassParams::from_mu(3, 0.0);
  (void)mp2;
  const auto big = MassParams{3, std::sqrt(2.0 + 2.25), Regime::large, std::sqrt(2.0)};
  EXPECT_NEAR(kgds::eval_E(big, 0.2, 1.0, 0.0).real(), 0.4671517603807033694901237676111820494481, 1e-12);
  EXPECT_NEAR(kgds::eval_K0(big, 0.2, 1.0).real(), -0.935401373834650009903758402303449506461711944691570221525997, 1e-11);
  for_each_admissible([&](double z, double t) {
    const auto k1 = kgds::eval_K1(mp, z, t);
    EXPECT_LE(std::abs(k1.imag()), 1e-10 * std::abs(k1.real())) << z << " " << t;
    const auto k0 = kgds::eval_K0(mp, z, t);
    EXPECT_LE(std::abs(k0.imag()), 1e-10 * std::max(1.0, std::abs(k0.real()))) << z << " " << t;
  });
}

TEST(Kernels, RegimesMeetContinuouslyAtHalfN) {
  // K1 is analytic in m^2 across m = n/2, so the one-sided slopes agree and
  // the jump shrinks linearly with the offset.
  const int n = 3;
  const auto mid = MassParams::from_mass(n, 1.5);
  for (double t : {0.5, 1.0, 2.0, 3.0}) {
    for (double f : {0.0, 0.4, 0.9}) {
      const double z = f * -std::expm1(-t);
      const double k = kgds::eval_K1(mid, z, t).real();
      const double dm = 1e-4;
      const double up = kgds::eval_K1(MassParams::from_mass(n, 1.5 + dm), z, t).real() - k;
      const double down = kgds::eval_K1(MassParams::from_mass(n, 1.5 - dm), z, t).real() - k;
      EXPECT_NEAR(up, -down, 1e-3 * std::abs(up) + 1e-12);
      const double tiny = kgds::eval_K1(MassParams::from_mass(n, 1.5 + 1e-8), z, t).real() - k;
      EXPECT_LE(std::abs(tiny), 1e-6);
    }
  }
}

TEST(Kernels, DK1MatchesDifferences) {
  for (double mu : {0.3, 0.8, 1.2}) {
    const auto mp = MassParams::from_mu(3, mu);
    for (double t : {0.7, 2.0, 4.0}) {
      const double edge = -std::expm1(-t);
      for (double f : {0.2, 0.5, 0.8}) {
        const double s = f * edge;
        const double fd = oracle::derivative([&](double x) { return kgds::eval_K1(mp, x, t).real(); }, s, 1e-3 * edge);
        const double an = kgds::dK1_ds(mp, s, t).real();
        EXPECT_NEAR(an, fd, 1e-6 * std::max(1.0, std::abs(an))) << mu << " " << t << " " << s;
      }
    }
  }
}

TEST(Kernels, RegularAtTheConoid) {
  const auto mp = MassParams::from_mu(3, 0.8);
  const double t = 1.3;
  const double edge = -std::expm1(-t);
  const double at = kgds::eval_K0(mp, edge, t).real();
  EXPECT_TRUE(std::isfinite(at));
  EXPECT_NEAR(kgds::eval_K0(mp, edge * (1 - 1e-9), t).real(), at, 1e-7);
  EXPECT_THROW(kgds::eval_K1(mp, edge * 1.001, t), kgds::DomainError);
  EXPECT_THROW(kgds::eval_K1(mp, -0.1, t), kgds::DomainError);
  EXPECT_THROW(kgds::eval_E(mp, 0.5, 1.0, 0.9), kgds::DomainError);
}

TEST(KernelLimits, DK1AtLargeTime) {
  for (double mu : {0.3, 0.8, 1.2}) {
    const auto mp = MassParams::from_mu(3, mu);
    for (int i = 0; i <= 18; ++i) {
      const double s = 0.05 * i;
      const double scaled = std::pow(4.0, mu) * std::exp(-mu * 30.0) * kgds::dK1_ds(mp, s, 30.0).real();
      EXPECT_NEAR(scaled, kgds::asymptotic_dK1_limit(mp, s), 1e-6) << mu << " " << s;
    }
  }
  EXPECT_NEAR(kgds::asymptotic_dK1_limit(MassParams::from_mu(3, 0.8), 0.6), -0.5458055935697833008970769483718280407694,
              1e-13);
}

TEST(KernelLimits, DK1ClosedFormAtMuOne) {
  const double s = 0.5;
  const double expected = -std::tgamma(2.0) / std::pow(std::tgamma(1.5), 2) * 0.5 / std::sqrt(0.75);
  EXPECT_NEAR(kgds::asymptotic_dK1_limit(MassParams::from_mu(3, 1.0), s), expected, 1e-14);
  EXPECT_EQ(kgds::asymptotic_dK1_limit(MassParams::from_mu(3, 0.5), 0.3), 0.0);
  EXPECT_THROW(kgds::asymptotic_dK1_limit(MassParams::from_mu(3, 0.0), 0.3), kgds::DomainError);
  EXPECT_THROW(kgds::asymptotic_dK1_limit(MassParams::from_mass(3, 2.0), 0.3), kgds::DomainError);
}

TEST(KernelLimits, CombinedLimit) {
  EXPECT_EQ(kgds::asymptotic_dcombo_limit(MassParams::from_mu(3, 1.5), 0.4), 0.0);
  EXPECT_EQ(kgds::asymptotic_dcombo_limit(MassParams::from_mu(5, 0.5), 0.4), 0.0);
  EXPECT_NEAR(kgds::asymptotic_dcombo_limit(MassParams::from_mu(5, 1.5), 0.5), -8.0, 1e-13);
  // against a difference quotient of the kernels at t = 30
  for (auto [n, mu] : {std::pair{5, 1.5}, std::pair{3, 0.8}, std::pair{3, 1.2}}) {
    const auto mp = MassParams::from_mu(n, mu);
    for (double s : {0.2, 0.5, 0.7}) {
      const double fd = oracle::derivative([&](double x) { return kgds::eval_K_combo(mp, x, 30.0).real(); }, s, 1e-3);
      EXPECT_NEAR(std::pow(2.0, 1 + 2 * mu) * std::exp(-mu * 30.0) * fd, kgds::asymptotic_dcombo_limit(mp, s), 1e-6)
          << n << " " << mu << " " << s;
    }
  }
}
