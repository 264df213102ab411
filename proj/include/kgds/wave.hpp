#ifndef KGDS_WAVE_HPP
#define KGDS_WAVE_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "kgds/error.hpp"
#include "kgds/profile.hpp"
#include "kgds/quadrature.hpp"

// Flat wave propagators. For a datum phi, V_phi solves the wave equation with
// data (0, phi) and v_phi = dV_phi/dt solves it with data (phi, 0).

namespace kgds::wave {

struct WaveSample {
  double v = 0.0;
  double V = 0.0;
};

namespace detail {

inline double projected_distance(int n, const Point& x, const Point& c) {
  switch (n) {
    case 1: return std::abs(x[0] - c[0]);
    case 2: return std::hypot(x[0] - c[0], x[1] - c[1]);
    default: return distance(x, c);
  }
}

// integral of T over [lo, hi] for a single term
inline double term_integral(const ProfileTerm& T, double lo, double hi) {
  if (!T.unbounded()) {
    lo = std::max(lo, -T.radius);
    hi = std::min(hi, T.radius);
  }
  if (!(hi > lo)) return 0.0;
  auto f = [&](double y) { return T.value(y); };
  if (T.alpha == 0.0 && !T.unbounded()) return quad::fixed(f, lo, hi, std::max(16, T.power + 1));
  if (T.unbounded() && T.alpha == 0.0) return T.amplitude * (hi - lo);
  quad::Options opt;
  opt.rel_tol = 1e-14;
  if (lo < 0.0 && hi > 0.0) opt.breakpoints = {0.0};
  return quad::integrate(f, lo, hi, opt).value;
}

// int_0^u s T(s) ds
inline double moment_primitive(const ProfileTerm& T, double u) {
  u = std::abs(u);
  if (T.unbounded()) {
    if (T.alpha == 0.0) return 0.5 * T.amplitude * u * u;
    return T.amplitude * (1.0 - std::exp(-T.alpha * u * u)) / (2.0 * T.alpha);
  }
  if (T.alpha == 0.0) {
    const double R2 = T.radius * T.radius;
    const double w = u >= T.radius ? 0.0 : (T.radius - u) * (T.radius + u) / R2;
    return T.amplitude * R2 / (2.0 * (T.power + 1)) * (1.0 - std::pow(w, T.power + 1));
  }
  const double hi = std::min(u, T.radius);
  quad::Options opt;
  opt.rel_tol = 1e-14;
  return quad::integrate([&](double s) { return s * T.value(s); }, 0.0, hi, opt).value;
}

// j-th derivative of g(u) = u T(u)
inline double g_derivative(const ProfileTerm& T, double u, int j) {
  double r = u * T.derivative(u, j);
  if (j > 0) r += j * T.derivative(u, j - 1);
  return r;
}

// d^k/dt^k of (1/(2 rho)) int_{t-rho}^{t+rho} g for one term in three dimensions
inline double kirchhoff_term(const ProfileTerm& T, double rho, double t, int k) {
  if (!T.unbounded() && t - rho >= T.radius) return 0.0;
  if (!T.unbounded() && rho - t >= T.radius && k == 0) return 0.0;
  constexpr double kSmallRho = 1e-4;
  if (rho < kSmallRho) {
    // symmetric difference quotient expanded in rho
    double s = g_derivative(T, t, k);
    if (rho > 0.0) {
      if (k + 2 <= T.max_order()) s += rho * rho / 6.0 * g_derivative(T, t, k + 2);
      if (k + 4 <= T.max_order()) s += std::pow(rho, 4) / 120.0 * g_derivative(T, t, k + 4);
    }
    return s;
  }
  if (k == 0) return (moment_primitive(T, t + rho) - moment_primitive(T, t - rho)) / (2.0 * rho);
  return (g_derivative(T, t + rho, k - 1) - g_derivative(T, t - rho, k - 1)) / (2.0 * rho);
}

inline double dalembert_term(const ProfileTerm& T, double d, double t, int k) {
  if (k == 0) return 0.5 * term_integral(T, d - t, d + t);
  const double sign = (k - 1) % 2 ? -1.0 : 1.0;
  return 0.5 * (T.derivative(d + t, k - 1) + sign * T.derivative(d - t, k - 1));
}

/// coef * t^power * phi^(order)(t)
struct PowerTerm {
  double coef;
  int power;
  int order;
};

inline std::vector<PowerTerm> apply_dt(const std::vector<PowerTerm>& in) {
  std::vector<PowerTerm> out;
  for (const auto& p : in) {
    if (p.power != 0) out.push_back({p.coef * p.power, p.power - 1, p.order});
    out.push_back({p.coef, p.power, p.order + 1});
  }
  return out;
}

inline std::vector<PowerTerm> apply_inv_t_dt(const std::vector<PowerTerm>& in) {
  auto out = apply_dt(in);
  for (auto& p : out) --p.power;
  return out;
}

}  // namespace detail

/// Symbolic form of d^k/dt^k (1/c0)(t^{-1} d/dt)^{(n-3)/2} [t^{n-2} phi(t)] for odd n >= 3.
inline std::vector<detail::PowerTerm> radial_origin_terms(int n, int k) {
  if (n < 3 || n % 2 == 0) throw DomainError("radial_origin: n must be odd and at least 3");
  double c0 = 1.0;
  for (int j = 3; j <= n - 2; j += 2) c0 *= j;
  std::vector<detail::PowerTerm> terms{{1.0 / c0, n - 2, 0}};
  for (int i = 0; i < (n - 3) / 2; ++i) terms = detail::apply_inv_t_dt(terms);
  for (int i = 0; i < k; ++i) terms = detail::apply_dt(terms);
  return terms;
}

/// k-th time derivative of V_phi(0, t) for odd n from the iterated operator.
inline double radial_origin_dt(int n, const RadialProfile& phi, double t, int k) {
  if (!phi.is_radial()) throw DomainError("radial_origin: profile must be centred at the origin");
  double s = 0.0;
  for (const auto& term : radial_origin_terms(n, k)) {
    if (term.coef == 0.0) continue;
    s += term.coef * std::pow(t, term.power) * phi.derivative(t, term.order);
  }
  return s;
}

inline WaveSample radial_origin_vV(int n, const RadialProfile& phi, double t) {
  if (!(t > 0.0)) throw DomainError("radial_origin_vV: t must be positive");
  return {radial_origin_dt(n, phi, t, 1), radial_origin_dt(n, phi, t, 0)};
}

/// Average of f over the sphere of radius rho about x, by product
/// Gauss-Legendre in (cos theta, azimuth) with order doubling until two
/// successive results agree to `tol`.
template <class F>
double spherical_mean(F&& f, const Point& x, double rho, double tol = 1e-10) {
  if (rho < 0.0) throw DomainError("spherical_mean: negative radius");
  if (rho == 0.0) return f(x);
  auto mean_at = [&](int order) {
    const auto& r = quad::gauss_legendre(order);
    const int naz = 2 * order;
    double s = 0.0;
    for (int i = 0; i < order; ++i) {
      const double ct = r.nodes[i];
      const double st = std::sqrt((1.0 - ct) * (1.0 + ct));
      double ring = 0.0;
      for (int j = 0; j < naz; ++j) {
        const double az = 2.0 * std::numbers::pi * (j + 0.5) / naz;
        ring += f(Point{x[0] + rho * st * std::cos(az), x[1] + rho * st * std::sin(az), x[2] + rho * ct});
      }
      s += r.weights[i] * ring / naz;
    }
    return 0.5 * s;
  };
  double prev = mean_at(16);
  for (int order = 32; order <= quad::kMaxRuleOrder; order *= 2) {
    const double cur = mean_at(order);
    if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  throw ConvergenceError("spherical_mean: product rule did not stabilise");
}

/// Spherical mean of a profile: exact for radial data at the centre, a
/// one-dimensional integral per term otherwise.
inline double spherical_mean(const RadialProfile& phi, const Point& x, double rho) {
  if (rho < 0.0) throw DomainError("spherical_mean: negative radius");
  double s = 0.0;
  for (const auto& T : phi.terms()) {
    const double d = distance(x, T.center);
    if (d == 0.0 || rho == 0.0) {
      s += T.value(d + rho);
      continue;
    }
    // (1/(2 rho d)) int_{|rho-d|}^{rho+d} u T(u) du
    s += (detail::moment_primitive(T, rho + d) - detail::moment_primitive(T, rho - d)) / (2.0 * rho * d);
  }
  return s;
}

namespace detail {

// t/(2 pi) int_0^{2 pi} int_0^{pi/2} h(x + t sin(a) e) sin(a) da dtheta, with
// h = T (k = 0) or the directional term needed for the t-derivative (k = 1).
inline double descent_term(const ProfileTerm& T, double d, double t, int k) {
  if (t == 0.0) return k == 0 ? 0.0 : T.value(d);
  if (!T.unbounded() && d - t >= T.radius) return 0.0;
  const double R = T.radius;
  auto inner = [&](double theta) {
    const double ce = std::cos(theta);
    // |y|^2 = d^2 + 2 d s cos + s^2 with s = t sin(a), d along the x axis
    std::vector<double> bps;
    if (!T.unbounded()) {
      const double disc = d * d * ce * ce - (d * d - R * R);
      if (disc >= 0.0) {
        for (double sgn : {-1.0, 1.0}) {
          const double s = -d * ce + sgn * std::sqrt(disc);
          if (s > 0.0 && s < t) bps.push_back(std::asin(s / t));
        }
      }
    }
    quad::Options opt;
    opt.breakpoints = bps;
    opt.rel_tol = 1e-12;
    opt.max_panel = 0.5;
    auto f = [&](double a) {
      const double sa = std::sin(a);
      const double s = t * sa;
      const double y0 = d + s * ce;
      const double y1 = s * std::sin(theta);
      const double r = std::hypot(y0, y1);
      if (k == 0) return T.value(r) * sa;
      // d/dt of T(|d + t sin(a) e|) = T'(r) (y . e) sin(a) / r
      const double dir = r > 0.0 ? (y0 * ce + y1 * std::sin(theta)) / r : 0.0;
      return (T.value(r) + t * T.derivative(r, 1) * dir * sa) * sa;
    };
    return quad::integrate(f, 0.0, 0.5 * std::numbers::pi, opt).value;
  };
  std::vector<double> outer_bps;
  if (!T.unbounded() && d > 0.0) {
    if (d > R) {
      const double c = std::sqrt(d * d - R * R) / d;
      outer_bps.push_back(std::acos(-c));
    }
    const double c = (R * R - d * d - t * t) / (2.0 * t * d);
    if (c > -1.0 && c < 1.0) outer_bps.push_back(std::acos(c));
  }
  quad::Options opt;
  opt.breakpoints = outer_bps;
  opt.rel_tol = 1e-11;
  opt.max_panel = 0.5;
  const double half = quad::integrate(inner, 0.0, std::numbers::pi, opt).value;
  return (k == 0 ? t : 1.0) / std::numbers::pi * half;
}

}  // namespace detail

/// d^k/dt^k V_phi(x, t) for the flat wave equation in n dimensions.
/// Supported: n = 1, 2 (k <= 1), 3 at any x; odd n >= 5 at the centre of
/// every term.
inline double V_dt(int n, const RadialProfile& phi, const Point& x, double t, int k) {
  if (t < 0.0) throw DomainError("wave: t must be non-negative");
  if (k < 0) throw DomainError("wave: negative derivative order");
  if (n < 1) throw DomainError("wave: n must be positive");
  if (n == 2 && k > 1) throw DomainError("wave: n = 2 supports V and v only");
  if (n >= 4 && n % 2 == 0) throw DomainError("wave: even n >= 4 not supported");
  double s = 0.0;
  for (const auto& T : phi.terms()) {
    const double d = detail::projected_distance(n, x, T.center);
    switch (n) {
      case 1: s += detail::dalembert_term(T, x[0] - T.center[0], t, k); break;
      case 2: s += detail::descent_term(T, d, t, k); break;
      case 3: s += detail::kirchhoff_term(T, d, t, k); break;
      default: {
        if (d != 0.0) throw DomainError("wave: n >= 5 is evaluated at the centre of the data only");
        double c0 = 1.0;
        for (int j = 3; j <= n - 2; j += 2) c0 *= j;
        for (const auto& p : radial_origin_terms(n, k)) {
          if (p.coef == 0.0) continue;
          s += p.coef * std::pow(t, p.power) * T.derivative(t, p.order);
        }
      }
    }
  }
  return s;
}

inline WaveSample vV(int n, const RadialProfile& phi, const Point& x, double t) {
  return {V_dt(n, phi, x, t, 1), V_dt(n, phi, x, t, 0)};
}

/// n = 1: v from phi0, V from phi1.
inline WaveSample dalembert(const RadialProfile& phi0, const RadialProfile& phi1, double x, double t) {
  const Point p{x, 0.0, 0.0};
  return {V_dt(1, phi0, p, t, 1), V_dt(1, phi1, p, t, 0)};
}

/// n = 3: v from phi0, V from phi1.
inline WaveSample kirchhoff_v_V(const RadialProfile& phi0, const RadialProfile& phi1, const Point& x, double t) {
  return {V_dt(3, phi0, x, t, 1), V_dt(3, phi1, x, t, 0)};
}

/// n = 2 (method of descent): v from phi0, V from phi1.
inline WaveSample descent2d_v_V(const RadialProfile& phi0, const RadialProfile& phi1, const Point& x, double t) {
  return {V_dt(2, phi0, x, t, 1), V_dt(2, phi1, x, t, 0)};
}

/// Radii at which v_phi(x, .) or V_phi(x, .) can lose smoothness.
inline std::vector<double> kinks(int n, const RadialProfile& phi, const Point& x) {
  std::vector<double> out;
  for (const auto& T : phi.terms()) {
    if (T.unbounded()) continue;
    const double d = n == 1 ? x[0] - T.center[0] : detail::projected_distance(n, x, T.center);
    if (n == 1) {
      for (double v : {d - T.radius, d + T.radius, -d - T.radius, -d + T.radius})
        if (v > 0.0) out.push_back(v);
    } else {
      for (double v : {std::abs(d - T.radius), d + T.radius})
        if (v > 0.0) out.push_back(v);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace kgds::wave

#endif  // KGDS_WAVE_HPP
