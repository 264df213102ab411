#ifndef KGDS_ASYMPTOTICS_HPP
#define KGDS_ASYMPTOTICS_HPP

#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

#include "kgds/desitter.hpp"
#include "kgds/error.hpp"
#include "kgds/wave.hpp"

// Large-time expansion at the knot mass mu = 1/2, where
//   Phi(x, t) = e^{-(n-1)t/2} [v0 + (n-1)/2 V0 + V1](x, 1 - e^{-t})
// and each flat quantity is expanded in powers of z = e^{-t} about flat time 1.

namespace kgds::asymptotics {

struct ExpansionCoeffs {
  int n = 3;
  int N = 1;
  Point x{};
  std::vector<double> Vk0;  // k = 0..N
  std::vector<double> vk0;  // k = 0..N-1
  std::vector<double> Vk1;  // k = 0..N-1
};

/// V^(k)(x) = (-1)^k / k! d^k/dt^k V(x, t) at t = 1, from the analytic t-derivatives.
inline ExpansionCoeffs expansion_coeffs(int n, const RadialProfile& phi0, const RadialProfile& phi1, const Point& x,
                                        int N) {
  if (N < 1) throw DomainError("expansion_coeffs: N must be at least 1");
  if (n == 2 || (n >= 4 && n % 2 == 0))
    throw DomainError("expansion_coeffs: analytic t-derivatives are available for n = 1, 3 and odd n >= 5 only");
  ExpansionCoeffs c;
  c.n = n;
  c.N = N;
  c.x = x;
  double scale = 1.0;  // (-1)^k / k!
  for (int k = 0; k <= N; ++k) {
    if (k > 0) scale *= -1.0 / k;
    c.Vk0.push_back(scale * wave::V_dt(n, phi0, x, 1.0, k));
    if (k < N) {
      c.vk0.push_back(scale * wave::V_dt(n, phi0, x, 1.0, k + 1));
      c.Vk1.push_back(scale * wave::V_dt(n, phi1, x, 1.0, k));
    }
  }
  return c;
}

/// z^{(n-1)/2} sum_{k<N} [ (n-1)/2 V0^(k) - (k+1) V0^(k+1) + V1^(k) ] z^k, z = e^{-t}.
inline double asympt_eval(const ExpansionCoeffs& c, double t) {
  if (!(t >= 0.0)) throw DomainError("asympt_eval: t must be non-negative");
  const double z = std::exp(-t);
  const double h = 0.5 * (c.n - 1);
  double s = 0.0, zk = 1.0;
  for (int k = 0; k < c.N; ++k, zk *= z) s += (h * c.Vk0[k] - (k + 1) * c.Vk0[k + 1] + c.Vk1[k]) * zk;
  return std::exp(-h * t) * s;
}

inline double asympt_eval(const ExpansionCoeffs& c, double t, int n) {
  if (n != c.n) throw DomainError("asympt_eval: coefficients were computed for another dimension");
  return asympt_eval(c, t);
}

/// Same polynomial written with the separately expanded v0.
inline double asympt_eval_original(const ExpansionCoeffs& c, double t) {
  if (!(t >= 0.0)) throw DomainError("asympt_eval: t must be non-negative");
  const double z = std::exp(-t);
  const double h = 0.5 * (c.n - 1);
  double a = 0.0, b = 0.0, d = 0.0, zk = 1.0;
  for (int k = 0; k < c.N; ++k, zk *= z) {
    a += c.vk0[k] * zk;
    b += c.Vk0[k] * zk;
    d += c.Vk1[k] * zk;
  }
  return std::exp(-h * t) * (a + h * b + d);
}

struct ResidualSample {
  double t, phi, asympt, residual;
  bool used;
};

struct DecayFit {
  double rate = 0.0;
  double c = 0.0;
  std::vector<ResidualSample> samples;
  int used = 0;
};

/// Least-squares slope of log|Phi - Phi_asympt^(N)| in t. Residuals at the
/// rounding floor of Phi are kept in `samples` but excluded from the fit.
inline DecayFit decay_fit(const CauchyProblem& pb, const Point& x, int N, const std::vector<double>& t_list) {
  if (!(pb.mp.is_knot() && pb.mp.mu == 0.5)) throw DomainError("decay_fit: requires the knot mass mu = 1/2");
  if (t_list.size() < 2) throw DomainError("decay_fit: need at least two times");
  for (std::size_t i = 0; i < t_list.size(); ++i)
    if (t_list[i] < 3.0 || (i > 0 && !(t_list[i] > t_list[i - 1])))
      throw DomainError("decay_fit: times must be increasing and at least 3");
  const auto coeffs = expansion_coeffs(pb.mp.n, pb.phi0, pb.phi1, x, N);
  DecayFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (double t : t_list) {
    const double phi = solve(pb, x, t);
    const double as = asympt_eval(coeffs, t);
    const double res = phi - as;
    const bool ok = std::abs(res) > 64.0 * eps * std::max(std::abs(phi), std::abs(as)) && std::abs(res) > 0.0;
    fit.samples.push_back({t, phi, as, res, ok});
    if (!ok) continue;
    const double y = std::log(std::abs(res));
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
    ++fit.used;
  }
  if (fit.used < 2) throw NumericalError("decay_fit: fewer than two residuals above the rounding floor");
  const double k = fit.used;
  fit.rate = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  fit.c = std::exp((sy - fit.rate * sx) / k);
  return fit;
}

/// CSV with columns t, phi, phi_asympt, residual.
inline void write_csv(const DecayFit& fit, std::ostream& os) {
  const auto old = os.precision(17);
  os << "t,phi,phi_asympt,residual\n";
  for (const auto& s : fit.samples) os << s.t << ',' << s.phi << ',' << s.asympt << ',' << s.residual << '\n';
  os.precision(old);
}

}  // namespace kgds::asymptotics

#endif  // KGDS_ASYMPTOTICS_HPP
