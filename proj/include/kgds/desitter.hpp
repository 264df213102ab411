#ifndef KGDS_DESITTER_HPP
#define KGDS_DESITTER_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "kgds/error.hpp"
#include "kgds/kernels.hpp"
#include "kgds/profile.hpp"
#include "kgds/quadrature.hpp"
#include "kgds/wave.hpp"

// Solver for
//   Phi_tt + n Phi_t - e^{-2t} Laplace Phi + m^2 Phi = f,  Phi(x,0) = phi0, Phi_t(x,0) = phi1
// through the integral transform of flat wave solutions evaluated at the
// compactified time phi(t) = 1 - e^{-t}.

namespace kgds {

struct CauchyProblem {
  MassParams mp;
  RadialProfile phi0;
  RadialProfile phi1;
  std::optional<SeparableForcing> forcing;

  /// Data must sit inside the unit ball; odd n >= 5 only supports origin-centred data.
  void validate() const {
    for (const auto* p : {&phi0, &phi1}) {
      if (!(p->support_radius() < 1.0))
        throw DomainError("CauchyProblem: data support radius must be below 1 (got " +
                          std::to_string(p->support_radius()) + ")");
      if (mp.n >= 4 && !p->is_radial()) throw DomainError("CauchyProblem: n >= 4 needs origin-centred data");
    }
    if (mp.n >= 4 && mp.n % 2 == 0) throw DomainError("CauchyProblem: even n >= 4 is not supported");
  }
};

enum class Method { knot_closed_form, representation_small, representation_large, fd };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::knot_closed_form: return "knot_closed_form";
    case Method::representation_small: return "representation/small";
    case Method::representation_large: return "representation/large";
    case Method::fd: return "fd";
  }
  return "unknown";
}

struct SolverOptions {
  double rel_tol = 1e-11;
  /// Skip the knot closed forms and always use the kernel quadrature.
  bool force_generic = false;
  /// Integrate the phi1 term after moving the s-derivative onto K1.
  bool phi1_by_parts = false;
};

struct SolveResult {
  double value = 0.0;
  Method method = Method::representation_small;
  long quadrature_nodes = 0;
};

inline double compact_time(double t) { return -std::expm1(-t); }

namespace detail {

// Upper end of the r-range where v_phi(x, r) can be nonzero.
inline double reach(int n, const RadialProfile& phi, const Point& x, double cap) {
  if (phi.is_zero()) return 0.0;
  if (n % 2 == 0) return cap;
  const auto k = wave::kinks(n, phi, x);
  for (const auto& T : phi.terms())
    if (T.unbounded()) return cap;
  return k.empty() ? cap : std::min(cap, k.back());
}

inline quad::Options options_for(int n, const CauchyProblem& pb, const Point& x, double upper, double layer,
                                 double rel_tol) {
  quad::Options opt;
  opt.rel_tol = rel_tol;
  // Flat solutions near a front carry cancellation noise of order eps * |data|;
  // asking for more than that only refines noise.
  opt.abs_tol = 1e-15 * (pb.phi0.sup_norm() + pb.phi1.sup_norm());
  opt.layer_scale = layer;
  auto a = wave::kinks(n, pb.phi0, x);
  auto b = wave::kinks(n, pb.phi1, x);
  opt.breakpoints = a;
  opt.breakpoints.insert(opt.breakpoints.end(), b.begin(), b.end());
  opt.breakpoints.erase(std::remove_if(opt.breakpoints.begin(), opt.breakpoints.end(),
                                       [&](double v) { return !(v < upper); }),
                        opt.breakpoints.end());
  return opt;
}

inline double check_residue(std::complex<double> v) {
  if (std::abs(v.imag()) > 1e-8 * std::max(1.0, std::abs(v.real())))
    throw NumericalError("solver: imaginary residue " + std::to_string(v.imag()) + " exceeds tolerance");
  return v.real();
}

// Generic representation: both regimes.
inline SolveResult representation(const CauchyProblem& pb, const Point& x, double t, const SolverOptions& so) {
  const auto& mp = pb.mp;
  const int n = mp.n;
  const double ph = compact_time(t);
  const double q = std::exp(-t);
  const double lead = std::exp(-0.5 * (n - 1) * t) * wave::V_dt(n, pb.phi0, x, ph, 1);
  const double upper = std::max(reach(n, pb.phi0, x, ph), reach(n, pb.phi1, x, ph));
  SolveResult res;
  res.method = mp.regime == Regime::small ? Method::representation_small : Method::representation_large;
  if (!(upper > 0.0)) {
    res.value = lead;
    return res;
  }
  const auto opt = options_for(n, pb, x, upper, upper == ph ? q : 0.0, so.rel_tol);
  const bool zero0 = pb.phi0.is_zero();
  const bool zero1 = pb.phi1.is_zero();
  std::complex<double> boundary{0.0};
  auto integrand = [&](double r) -> std::complex<double> {
    const double v0 = zero0 ? 0.0 : wave::V_dt(n, pb.phi0, x, r, 1);
    if (so.phi1_by_parts) {
      const double V1 = zero1 ? 0.0 : wave::V_dt(n, pb.phi1, x, r, 0);
      if (v0 == 0.0 && V1 == 0.0) return 0.0;
      std::complex<double> s{0.0};
      if (v0 != 0.0) s += v0 * eval_K_combo(mp, r, t);
      if (V1 != 0.0) s -= 2.0 * V1 * dK1_ds(mp, r, t);
      return s;
    }
    const double v1 = zero1 ? 0.0 : wave::V_dt(n, pb.phi1, x, r, 1);
    if (v0 == 0.0 && v1 == 0.0) return 0.0;
    const auto k = eval_K01(mp, r, t);
    return v0 * (2.0 * k.K0 + double(n) * k.K1) + 2.0 * v1 * k.K1;
  };
  if (so.phi1_by_parts && !zero1) boundary = 2.0 * wave::V_dt(n, pb.phi1, x, ph, 0) * eval_K1(mp, ph, t);
  const auto r = quad::integrate(integrand, 0.0, upper, opt);
  res.quadrature_nodes = r.evaluations;
  res.value = lead + check_residue(std::exp(-0.5 * n * t) * (r.value + boundary));
  return res;
}

// mu = 1/2: e^{-(n-1)t/2} [v0 + (n-1)/2 V0 + V1](x, phi(t)).
inline double knot_half(const CauchyProblem& pb, const Point& x, double t) {
  const int n = pb.mp.n;
  const double ph = compact_time(t);
  const double v0 = wave::V_dt(n, pb.phi0, x, ph, 1);
  const double V0 = wave::V_dt(n, pb.phi0, x, ph, 0);
  const double V1 = wave::V_dt(n, pb.phi1, x, ph, 0);
  return std::exp(-0.5 * (n - 1) * t) * (v0 + 0.5 * (n - 1) * V0 + V1);
}

// mu = 3/2, where K0 and K1 are quadratic in the radius.
inline SolveResult knot_three_halves(const CauchyProblem& pb, const Point& x, double t, double rel_tol) {
  const int n = pb.mp.n;
  const double ph = compact_time(t);
  const double q = std::exp(-t);
  SolveResult res{0.0, Method::knot_closed_form, 0};
  quad::Options opt = options_for(n, pb, x, ph, 0.0, rel_tol);
  if (n == 3) {
    // e^{-t} v0 + V0 + e^{-t} V1 + int_0^phi V1(x, s) s ds
    const double base = q * wave::V_dt(3, pb.phi0, x, ph, 1) + wave::V_dt(3, pb.phi0, x, ph, 0) +
                        q * wave::V_dt(3, pb.phi1, x, ph, 0);
    const double upper = reach(3, pb.phi1, x, ph);
    double tail = 0.0;
    if (upper > 0.0) {
      const auto r = quad::integrate([&](double s) { return wave::V_dt(3, pb.phi1, x, s, 0) * s; }, 0.0, upper, opt);
      tail = r.value;
      res.quadrature_nodes = r.evaluations;
    }
    res.value = base + tail;
    return res;
  }
  const double e3 = std::exp(-0.5 * (n - 3) * t);
  const double upper = std::max(reach(n, pb.phi0, x, ph), reach(n, pb.phi1, x, ph));
  double integral = 0.0;
  if (upper > 0.0) {
    auto f = [&](double s) {
      const double w0 = (n - 3) * q * q - (n - 3) * s * s + 1 + n;
      const double w1 = 1 + q * q - s * s;
      return 0.25 * wave::V_dt(n, pb.phi0, x, s, 1) * w0 + 0.5 * wave::V_dt(n, pb.phi1, x, s, 1) * w1;
    };
    const auto r = quad::integrate(f, 0.0, upper, opt);
    integral = r.value;
    res.quadrature_nodes = r.evaluations;
  }
  res.value = std::exp(-0.5 * (n - 1) * t) * wave::V_dt(n, pb.phi0, x, ph, 1) + e3 * integral;
  return res;
}

}  // namespace detail

/// Representation solution for small mass (m <= n/2) through the real kernels.
inline double solve_small_mass(const CauchyProblem& pb, const Point& x, double t, const SolverOptions& so = {}) {
  if (pb.mp.regime != Regime::small) throw DomainError("solve_small_mass: mass is in the large regime");
  if (!(t > 0.0)) throw DomainError("solve_small_mass: t must be positive");
  return detail::representation(pb, x, t, so).value;
}

/// Large mass (m > n/2) through the complex-parameter kernels; the real part
/// is returned after checking that the imaginary residue is negligible.
inline double solve_large_mass(const CauchyProblem& pb, const Point& x, double t, const SolverOptions& so = {}) {
  if (pb.mp.regime != Regime::large) throw DomainError("solve_large_mass: mass is in the small regime");
  if (!(t > 0.0)) throw DomainError("solve_large_mass: t must be positive");
  return detail::representation(pb, x, t, so).value;
}

/// n = 1, m = 0: (phi0(x - phi) + phi0(x + phi))/2 + (1/2) int_{x-phi}^{x+phi} phi1.
inline double solve_knot_n1_massless(const CauchyProblem& pb, double x, double t) {
  if (pb.mp.n != 1 || pb.mp.m != 0.0) throw DomainError("solve_knot_n1_massless: requires n = 1, m = 0");
  if (t == 0.0) return pb.phi0({x, 0.0, 0.0});
  const auto s = wave::dalembert(pb.phi0, pb.phi1, x, compact_time(t));
  return s.v + s.V;
}

/// Dispatcher: knot closed forms for mu in {1/2, 3/2}, otherwise the
/// representation of the corresponding regime.
inline SolveResult solve_detailed(const CauchyProblem& pb, const Point& x, double t, const SolverOptions& so = {}) {
  if (t < 0.0 || !std::isfinite(t)) throw DomainError("solve: t must be finite and non-negative");
  if (pb.forcing) throw DomainError("solve: use solve_source for forced problems");
  const bool knot = !so.force_generic && pb.mp.is_knot() && (pb.mp.mu == 0.5 || pb.mp.mu == 1.5);
  if (t == 0.0) {
    return {pb.phi0(x), knot ? Method::knot_closed_form
                             : (pb.mp.regime == Regime::small ? Method::representation_small
                                                              : Method::representation_large),
            0};
  }
  if (knot) {
    if (pb.mp.mu == 0.5) return {detail::knot_half(pb, x, t), Method::knot_closed_form, 0};
    return detail::knot_three_halves(pb, x, t, so.rel_tol);
  }
  return detail::representation(pb, x, t, so);
}

inline double solve(const CauchyProblem& pb, const Point& x, double t, const SolverOptions& so = {}) {
  return solve_detailed(pb, x, t, so).value;
}

/// Forced problem with vanishing data:
///   Phi = 2 e^{-nt/2} int_0^t db e^{nb/2} int_0^{e^{-b}-e^{-t}} v_f(x, r; b) E(r, t; 0, b) dr.
/// For mu = 1/2 the inner integral is carried out exactly.
inline double solve_source(const CauchyProblem& pb, const Point& x, double t, double rel_tol = 1e-9) {
  if (!pb.forcing) throw DomainError("solve_source: no forcing supplied");
  if (!pb.phi0.is_zero() || !pb.phi1.is_zero()) throw DomainError("solve_source: initial data must vanish");
  if (!(t > 0.0)) throw DomainError("solve_source: t must be positive");
  const auto& mp = pb.mp;
  const int n = mp.n;
  const auto& fr = *pb.forcing;
  const double q = std::exp(-t);
  quad::Options outer;
  outer.rel_tol = rel_tol;
  outer.abs_tol = 1e-300;
  outer.max_panel = 0.25;
  if (mp.is_knot() && mp.mu == 0.5) {
    auto f = [&](double b) {
      const double rho = std::exp(-b) - q;
      return std::exp(0.5 * (n + 1) * b) * fr.g(b) * wave::V_dt(n, fr.psi, x, std::max(rho, 0.0), 0);
    };
    return std::exp(-0.5 * (n - 1) * t) * quad::integrate(f, 0.0, t, outer).value;
  }
  auto slice = [&](double b) -> std::complex<double> {
    const double gb = fr.g(b);
    if (gb == 0.0) return 0.0;
    const double rho = std::exp(-b) - q;
    if (!(rho > 0.0)) return 0.0;
    quad::Options inner;
    inner.rel_tol = rel_tol;
    inner.abs_tol = 1e-300;
    inner.layer_scale = q;
    for (double k : wave::kinks(n, fr.psi, x))
      if (k < rho) inner.breakpoints.push_back(k);
    const double upper = detail::reach(n, fr.psi, x, rho);
    if (!(upper > 0.0)) return 0.0;
    if (upper < rho) inner.layer_scale = 0.0;
    auto g = [&](double r) -> std::complex<double> {
      const double v = wave::V_dt(n, fr.psi, x, r, 1);
      if (v == 0.0) return 0.0;
      return v * eval_E(mp, r, t, b);
    };
    return std::exp(0.5 * n * b) * gb * quad::integrate(g, 0.0, upper, inner).value;
  };
  const auto total = quad::integrate(slice, 0.0, t, outer).value;
  return detail::check_residue(2.0 * std::exp(-0.5 * n * t) * total);
}

struct FieldSample {
  Point x;
  double t;
  double phi;
};

struct SolutionField {
  std::vector<FieldSample> samples;
  Method method = Method::representation_small;
  long quadrature_nodes = 0;
  MassParams mass;
};

/// Evaluates the solution on the tensor grid points x times.
inline SolutionField solve_field(const CauchyProblem& pb, const std::vector<Point>& points,
                                 const std::vector<double>& times, const SolverOptions& so = {}) {
  pb.validate();
  SolutionField field;
  field.mass = pb.mp;
  bool first = true;
  for (double t : times) {
    for (const auto& x : points) {
      const auto r = solve_detailed(pb, x, t, so);
      if (!std::isfinite(r.value)) throw NumericalError("solve_field: non-finite value");
      if (first || t > 0.0) field.method = r.method;
      first = false;
      field.quadrature_nodes += r.quadrature_nodes;
      field.samples.push_back({x, t, r.value});
    }
  }
  return field;
}

}  // namespace kgds

#endif  // KGDS_DESITTER_HPP
