#ifndef KGDS_FDREF_HPP
#define KGDS_FDREF_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "kgds/error.hpp"
#include "kgds/profile.hpp"

// Second-order leapfrog for Phi_tt + n Phi_t - e^{-2t} Laplace Phi + m^2 Phi = f
// on the radial half-line (n >= 2) or the full line (n = 1). The damping term
// is centred, the axis uses Laplace ~ n d^2/dr^2, and the far edge is held at
// zero. Shares nothing with the kernel solver except the profile type.

namespace kgds::fd {

struct FDConfig {
  int n = 3;
  double m = 0.0;
  double r_max = 2.0;
  double dr = 2e-3;
  double dt = 1e-3;
  double t_max = 1.0;
  /// Keep every k-th time level.
  int store_every = 1;
  std::optional<SeparableForcing> forcing;
};

struct FDField {
  int n = 0;
  double m = 0.0;
  double dr = 0.0;
  /// Spacing of the stored time levels.
  double dt = 0.0;
  /// Coordinate of the first grid column (0, or -r_max on the line).
  double r0 = 0.0;
  std::size_t nt = 0;
  std::size_t nr = 0;
  std::vector<double> values;  // row-major: values[j * nr + i] = Phi(r0 + i dr, j dt)

  double at(std::size_t j, std::size_t i) const { return values[j * nr + i]; }
  double r(std::size_t i) const { return r0 + double(i) * dr; }
  double t(std::size_t j) const { return double(j) * dt; }
  double r_end() const { return r(nr - 1); }
  double t_end() const { return t(nt - 1); }
};

namespace detail {

inline double line_derivative(const RadialProfile& p, double y, int k) {
  double s = 0.0;
  for (const auto& T : p.terms()) s += T.derivative(y - T.center[0], k);
  return s;
}

// Laplacian of a profile at grid coordinate r.
inline double laplacian(int n, const RadialProfile& p, double r) {
  if (n == 1) return line_derivative(p, r, 2);
  if (r == 0.0) return n * p.derivative(0.0, 2);
  return p.derivative(r, 2) + (n - 1) / r * p.derivative(r, 1);
}

inline double value(int n, const RadialProfile& p, double r) {
  return n == 1 ? line_derivative(p, r, 0) : p.radial(r);
}

}  // namespace detail

/// Runs the scheme; phi0/phi1 must be radial when n >= 2.
inline FDField fd_solve(const FDConfig& cfg, const RadialProfile& phi0, const RadialProfile& phi1) {
  if (cfg.n < 1) throw DomainError("fd_solve: n must be positive");
  if (!(cfg.dr > 0.0) || !(cfg.dt > 0.0) || !(cfg.t_max >= 0.0) || !(cfg.r_max > 0.0))
    throw DomainError("fd_solve: grid parameters must be positive");
  if (cfg.dt > 0.9 * cfg.dr) throw DomainError("fd_solve: CFL condition dt <= 0.9 dr violated");
  if (cfg.store_every < 1) throw DomainError("fd_solve: store_every must be at least 1");
  if (cfg.n >= 2 && (!phi0.is_radial() || !phi1.is_radial() || (cfg.forcing && !cfg.forcing->psi.is_radial())))
    throw DomainError("fd_solve: radial reduction needs origin-centred data");

  const int n = cfg.n;
  const bool line = n == 1;
  const double r0 = line ? -cfg.r_max : 0.0;
  const std::size_t nr = std::size_t(std::lround((cfg.r_max - r0) / cfg.dr)) + 1;
  const double dr = (cfg.r_max - r0) / double(nr - 1);
  const std::size_t steps = std::size_t(std::lround(cfg.t_max / cfg.dt));
  const double dt = steps ? cfg.t_max / double(steps) : cfg.dt;
  const double m2 = cfg.m * cfg.m;

  auto force = [&](double r, double t) {
    return cfg.forcing ? cfg.forcing->g(t) * detail::value(n, cfg.forcing->psi, r) : 0.0;
  };
  auto force_t = [&](double r) {
    if (!cfg.forcing) return 0.0;
    const double h = 1e-5;
    return (cfg.forcing->g(h) - cfg.forcing->g(-h)) / (2 * h) * detail::value(n, cfg.forcing->psi, r);
  };

  std::vector<double> prev(nr), cur(nr), next(nr);
  for (std::size_t i = 0; i < nr; ++i) {
    const double r = r0 + double(i) * dr;
    const double p0 = detail::value(n, phi0, r);
    const double p1 = detail::value(n, phi1, r);
    const double l0 = detail::laplacian(n, phi0, r);
    const double l1 = detail::laplacian(n, phi1, r);
    const double utt = -n * p1 + l0 - m2 * p0 + force(r, 0.0);
    const double uttt = -n * utt - 2.0 * l0 + l1 - m2 * p1 + force_t(r);
    prev[i] = p0;
    cur[i] = p0 + dt * p1 + 0.5 * dt * dt * utt + dt * dt * dt / 6.0 * uttt;
  }
  prev[nr - 1] = cur[nr - 1] = 0.0;
  if (line) prev[0] = cur[0] = 0.0;

  FDField field;
  field.n = n;
  field.m = cfg.m;
  field.dr = dr;
  field.dt = dt * cfg.store_every;
  field.r0 = r0;
  field.nr = nr;
  auto store = [&](const std::vector<double>& u) {
    field.values.insert(field.values.end(), u.begin(), u.end());
    ++field.nt;
  };
  store(prev);
  if (steps >= 1 && cfg.store_every == 1) store(cur);

  const double inv_dr2 = 1.0 / (dr * dr);
  const double a = 1.0 / (dt * dt) + 0.5 * n / dt;
  for (std::size_t j = 1; j < steps; ++j) {
    const double tj = double(j) * dt;
    const double c2 = std::exp(-2.0 * tj);
    for (std::size_t i = 0; i < nr; ++i) {
      if (i == nr - 1 || (line && i == 0)) {
        next[i] = 0.0;
        continue;
      }
      double lap;
      if (!line && i == 0) {
        lap = n * 2.0 * (cur[1] - cur[0]) * inv_dr2;
      } else {
        lap = (cur[i + 1] - 2.0 * cur[i] + cur[i - 1]) * inv_dr2;
        if (!line) lap += (n - 1) / (r0 + double(i) * dr) * (cur[i + 1] - cur[i - 1]) / (2.0 * dr);
      }
      const double rhs = (2.0 * cur[i] - prev[i]) / (dt * dt) + 0.5 * n * prev[i] / dt + c2 * lap - m2 * cur[i] +
                         force(r0 + double(i) * dr, tj);
      next[i] = rhs / a;
      if (!(std::abs(next[i]) <= 1e6)) throw NumericalError("fd_solve: blow-up detected at t = " + std::to_string(tj));
    }
    std::swap(prev, cur);
    std::swap(cur, next);
    if ((j + 1) % std::size_t(cfg.store_every) == 0) store(cur);
  }
  return field;
}

/// Bilinear interpolation in (r, t).
inline double fd_probe(const FDField& f, double r, double t) {
  const double tol = 1e-12;
  if (f.nt == 0 || r < f.r0 - tol * f.dr || r > f.r_end() + tol * f.dr || t < -tol * f.dt ||
      t > f.t_end() + tol * f.dt)
    throw DomainError("fd_probe: point outside the grid");
  const double x = std::clamp((r - f.r0) / f.dr, 0.0, double(f.nr - 1));
  const double y = std::clamp(t / f.dt, 0.0, double(f.nt - 1));
  const std::size_t i = std::min(std::size_t(x), f.nr > 1 ? f.nr - 2 : 0);
  const std::size_t j = std::min(std::size_t(y), f.nt > 1 ? f.nt - 2 : 0);
  const double fx = f.nr > 1 ? x - double(i) : 0.0;
  const double fy = f.nt > 1 ? y - double(j) : 0.0;
  const std::size_t i1 = f.nr > 1 ? i + 1 : i;
  const std::size_t j1 = f.nt > 1 ? j + 1 : j;
  return (1 - fy) * ((1 - fx) * f.at(j, i) + fx * f.at(j, i1)) + fy * ((1 - fx) * f.at(j1, i) + fx * f.at(j1, i1));
}

// Little-endian dump:
//   "KGFD", u32 version, i32 n, f64 m, f64 dr, f64 dt, f64 r0, u64 nt, u64 nr,
//   then nt*nr f64 values in row-major order.
inline constexpr std::uint32_t kBinaryVersion = 1;

namespace detail {

template <class T>
void put(std::ostream& os, T v) {
  std::array<char, sizeof(T)> b;
  std::memcpy(b.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  os.write(b.data(), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  std::array<char, sizeof(T)> b;
  if (!is.read(b.data(), sizeof(T))) throw DomainError("fd binary: truncated input");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  T v;
  std::memcpy(&v, b.data(), sizeof(T));
  return v;
}

}  // namespace detail

inline void write_binary(const FDField& f, std::ostream& os) {
  os.write("KGFD", 4);
  detail::put<std::uint32_t>(os, kBinaryVersion);
  detail::put<std::int32_t>(os, f.n);
  detail::put<double>(os, f.m);
  detail::put<double>(os, f.dr);
  detail::put<double>(os, f.dt);
  detail::put<double>(os, f.r0);
  detail::put<std::uint64_t>(os, f.nt);
  detail::put<std::uint64_t>(os, f.nr);
  for (double v : f.values) detail::put<double>(os, v);
}

inline FDField read_binary(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "KGFD", 4) != 0) throw DomainError("fd binary: bad magic");
  if (detail::get<std::uint32_t>(is) != kBinaryVersion) throw DomainError("fd binary: unsupported version");
  FDField f;
  f.n = detail::get<std::int32_t>(is);
  f.m = detail::get<double>(is);
  f.dr = detail::get<double>(is);
  f.dt = detail::get<double>(is);
  f.r0 = detail::get<double>(is);
  f.nt = detail::get<std::uint64_t>(is);
  f.nr = detail::get<std::uint64_t>(is);
  f.values.resize(f.nt * f.nr);
  for (auto& v : f.values) v = detail::get<double>(is);
  return f;
}

}  // namespace kgds::fd

#endif  // KGDS_FDREF_HPP
