#ifndef KGDS_KERNELS_HPP
#define KGDS_KERNELS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "kgds/error.hpp"
#include "kgds/special.hpp"

// Kernels of the de Sitter Klein-Gordon representation. With p = e^{-t0},
// q = e^{-t}, r = |x - x0|,
//
//   A = (p + q)^2 - r^2,  B = (p - q)^2 - r^2,  zeta = B / A,  w = 1 - zeta = 4pq / A,
//   E = A^{-1/2} w^{-nu} 2F1(1/2 - nu, 1/2 - nu; 1; zeta),
//
// where nu = mu for small mass and nu = i mu for large mass. On the conoid
// (B = 0) zeta vanishes and every expression below is regular.

namespace kgds {

enum class Regime { small, large };

inline const char* to_string(Regime r) { return r == Regime::small ? "small" : "large"; }

struct MassParams {
  int n = 3;
  double m = 0.0;
  Regime regime = Regime::small;
  double mu = 1.5;

  /// Builds the parameters for a physical mass; mu values within 1e-10 of a
  /// half-integer knot are snapped onto it.
  static MassParams from_mass(int n, double m) {
    if (n < 1) throw DomainError("MassParams: n must be positive");
    if (!(m >= 0.0) || !std::isfinite(m)) throw DomainError("MassParams: mass must be finite and non-negative");
    const double h = 0.5 * n;
    MassParams mp;
    mp.n = n;
    mp.m = m;
    mp.regime = m <= h ? Regime::small : Regime::large;
    mp.mu = std::sqrt(std::abs((h - m) * (h + m)));
    if (mp.regime == Regime::small) {
      const double k = std::round(mp.mu - 0.5);
      if (k >= 0.0 && std::abs(mp.mu - (k + 0.5)) < 1e-10) mp.mu = k + 0.5;
    }
    return mp;
  }

  /// Parameters for a prescribed curved mass mu in the small regime.
  static MassParams from_mu(int n, double mu) {
    if (!(mu >= 0.0) || mu > 0.5 * n) throw DomainError("MassParams: mu must lie in [0, n/2]");
    const double h = 0.5 * n;
    MassParams mp{n, std::sqrt(std::max(0.0, (h - mu) * (h + mu))), Regime::small, mu};
    return mp;
  }

  /// Kernel parameter: mu (small) or i mu (large).
  std::complex<double> nu() const {
    return regime == Regime::small ? std::complex<double>{mu, 0.0} : std::complex<double>{0.0, mu};
  }

  /// mu = k + 1/2 for some k in 0..floor((n-1)/2).
  bool is_knot() const {
    if (regime != Regime::small) return false;
    const double k = mu - 0.5;
    return k >= 0.0 && k == std::floor(k) && k <= std::floor((n - 1) / 2.0);
  }
};

using KernelValue = std::complex<double>;

namespace detail {

struct Geometry {
  double A, B, zeta, w;
};

inline Geometry geometry(double p, double q, double r) {
  const double A = (p + q - r) * (p + q + r);
  const double B = std::max(0.0, (std::abs(p - q) - r) * (std::abs(p - q) + r));
  if (B == 0.0) return {A, 0.0, 0.0, 1.0};
  return {A, B, B / A, std::min(1.0, 4.0 * p * q / A)};
}

// G = w^{-nu} F(a, a; 1; zeta) and dG/dzeta, a = 1/2 - nu
struct GValue {
  KernelValue G, dG;
};

inline GValue g_of_zeta(const MassParams& mp, const Geometry& g, bool need_derivative) {
  using special::cplx;
  const cplx nu = mp.nu();
  const cplx a = 0.5 - nu;
  const cplx wpow = std::pow(cplx{g.w}, -nu);
  const cplx F = special::hyp2f1(a, a, cplx{1.0}, g.zeta, g.w).value;
  GValue out{wpow * F, 0.0};
  if (need_derivative) {
    cplx F1{0.0};
    if (std::abs(a) != 0.0) F1 = special::hyp2f1(a + 1.0, a + 1.0, cplx{2.0}, g.zeta, g.w).value;
    out.dG = nu * wpow / g.w * F + wpow * a * a * F1;
  }
  return out;
}

inline void check_cone(double z, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("kernel: t must be non-negative");
  const double edge = -std::expm1(-t);
  if (!(z >= 0.0) || z > edge * (1.0 + 1e-14) + 1e-300)
    throw DomainError("kernel: z = " + std::to_string(z) + " outside [0, 1 - e^{-t}]");
}

}  // namespace detail

/// E(x, t; x0, t0) with r = |x - x0|, inside the closed conoid of (x0, t0).
inline KernelValue eval_E(const MassParams& mp, double r, double t, double t0) {
  const double p = std::exp(-t0);
  const double q = std::exp(-t);
  if (!(r >= 0.0) || r > std::abs(p - q) * (1.0 + 1e-14) + 1e-300)
    throw DomainError("eval_E: point outside the characteristic conoid");
  const auto g = detail::geometry(p, q, r);
  return detail::g_of_zeta(mp, g, false).G / std::sqrt(g.A);
}

/// K1(z, t) = E(z, t; 0, 0).
inline KernelValue eval_K1(const MassParams& mp, double z, double t) {
  detail::check_cone(z, t);
  const auto g = detail::geometry(1.0, std::exp(-t), z);
  return detail::g_of_zeta(mp, g, false).G / std::sqrt(g.A);
}

/// dK1/dz.
inline KernelValue dK1_ds(const MassParams& mp, double s, double t) {
  detail::check_cone(s, t);
  const double q = std::exp(-t);
  const auto g = detail::geometry(1.0, q, s);
  const auto G = detail::g_of_zeta(mp, g, true);
  const double sqA = std::sqrt(g.A);
  return s / (g.A * sqA) * G.G - 8.0 * q * s / (g.A * g.A * sqA) * G.dG;
}

struct KernelPair {
  KernelValue K0, K1;
};

/// K0 and K1 from a single hypergeometric evaluation. K0 = -E_b with
/// E_b = -A_b/(2 A^{3/2}) G + A^{-1/2} G' zeta_b; zeta_b = (B_b A - B A_b)/A^2
/// (B_b = -2(1 - q)) is expanded so that its O(1) parts cancel exactly.
inline KernelPair eval_K01(const MassParams& mp, double z, double t) {
  detail::check_cone(z, t);
  const double q = std::exp(-t);
  const auto g = detail::geometry(1.0, q, z);
  const auto G = detail::g_of_zeta(mp, g, true);
  const double A_b = -2.0 * (1.0 + q);
  const double zeta_b = -4.0 * q * ((1.0 - q) * (1.0 + q) + z * z) / (g.A * g.A);
  const double sqA = std::sqrt(g.A);
  return {0.5 * A_b / (g.A * sqA) * G.G - G.dG * zeta_b / sqA, G.G / sqA};
}

/// K0(z, t) = -dE/dt0 at t0 = 0. Finite up to and including the conoid.
inline KernelValue eval_K0(const MassParams& mp, double z, double t) { return eval_K01(mp, z, t).K0; }

/// 2 K0 + n K1, the weight of the first datum.
inline KernelValue eval_K_combo(const MassParams& mp, double z, double t) {
  return 2.0 * eval_K0(mp, z, t) + double(mp.n) * eval_K1(mp, z, t);
}

namespace detail {

inline void check_limit_args(const MassParams& mp, double s) {
  if (mp.regime != Regime::small) throw DomainError("kernel limit: small-mass regime only");
  if (!(mp.mu > 0.0)) throw DomainError("kernel limit: mu = 0 is the logarithmic case");
  if (!(s >= 0.0 && s < 1.0)) throw DomainError("kernel limit: s must lie in [0, 1)");
}

}  // namespace detail

/// lim_{t->inf} 4^mu e^{-mu t} dK1/ds(s, t).
inline double asymptotic_dK1_limit(const MassParams& mp, double s) {
  detail::check_limit_args(mp, s);
  const double M = mp.mu;
  if (M == 0.5) return 0.0;
  const double c = special::gamma(2.0 * M) / std::pow(special::gamma(0.5 + M), 2);
  return -2.0 * (M - 0.5) * c * s * std::pow(1.0 - s * s, M - 1.5);
}

/// lim_{t->inf} 2^{1+2 mu} e^{-mu t} d/ds (2 K0 + n K1)(s, t).
inline double asymptotic_dcombo_limit(const MassParams& mp, double s) {
  detail::check_limit_args(mp, s);
  const double M = mp.mu;
  const double n = mp.n;
  const double poly = s * s * (M - 0.5 * n) + M + 0.5 * n - 3.0;
  if (M == 0.5 || poly == 0.0) return 0.0;
  return -8.0 * std::pow(1.0 - s * s, M - 2.5) * s * (M - 0.5) * poly * special::hyp2f1_at_one(0.5 - M, 0.5 - M, 1.0);
}

}  // namespace kgds

#endif  // KGDS_KERNELS_HPP
