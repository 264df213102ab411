#ifndef KGDS_HUYGENS_HPP
#define KGDS_HUYGENS_HPP

#include <algorithm>
#include <cmath>
#include <future>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "kgds/desitter.hpp"
#include "kgds/error.hpp"
#include "kgds/fdref.hpp"

// Tail measurements at the spatial origin once the backward light cone of
// (0, t) has left the support of the data.

namespace kgds::huygens {

enum class DatumMode { full, first_datum_only, second_datum_only };
enum class Verdict { huygens, incomplete_huygens, tailed, indeterminate };

inline const char* to_string(DatumMode m) {
  switch (m) {
    case DatumMode::full: return "full";
    case DatumMode::first_datum_only: return "first_datum_only";
    case DatumMode::second_datum_only: return "second_datum_only";
  }
  return "unknown";
}

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::huygens: return "huygens";
    case Verdict::incomplete_huygens: return "incomplete_huygens";
    case Verdict::tailed: return "tailed";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "unknown";
}

inline constexpr double kHuygensThreshold = 1e-6;
inline constexpr double kTailedThreshold = 1e-3;

struct TailSample {
  double t;
  double abs;
  double rel;
};

struct HuygensReport {
  MassParams mp;
  DatumMode datum_mode = DatumMode::full;
  double margin = 0.1;
  double exit_time = 0.0;
  double data_norm = 0.0;
  Method method = Method::representation_small;
  std::vector<TailSample> tail_samples;
  double tail_sup = 0.0;
  Verdict verdict = Verdict::indeterminate;
};

/// t* with 1 - e^{-t*} = supp + margin.
inline double exit_time(double support_radius, double margin) {
  const double reach = support_radius + margin;
  if (!(margin >= 0.0) || !(reach < 1.0)) throw DomainError("huygens: support radius + margin must stay below 1");
  return -std::log1p(-reach);
}

inline DatumMode datum_mode(const CauchyProblem& pb) {
  if (pb.phi1.is_zero()) return DatumMode::first_datum_only;
  if (pb.phi0.is_zero()) return DatumMode::second_datum_only;
  return DatumMode::full;
}

/// Evenly spaced times in [t* + offset, t_max].
inline std::vector<double> tail_grid(double t_star, double t_max, int count, double offset = 0.2) {
  if (count < 2 || !(t_max > t_star + offset)) throw DomainError("huygens: empty tail window");
  std::vector<double> ts(count);
  for (int i = 0; i < count; ++i) ts[i] = t_star + offset + (t_max - t_star - offset) * i / (count - 1);
  return ts;
}

inline Verdict classify(double tail_sup, DatumMode mode) {
  if (tail_sup <= kHuygensThreshold)
    return mode == DatumMode::first_datum_only ? Verdict::incomplete_huygens : Verdict::huygens;
  if (tail_sup >= kTailedThreshold) return Verdict::tailed;
  return Verdict::indeterminate;
}

namespace detail {

// Sup norm of the pair (phi0, phi1).
inline double data_norm(const CauchyProblem& pb) {
  const double s = std::max(pb.phi0.sup_norm(), pb.phi1.sup_norm());
  if (!(s > 0.0)) throw DomainError("huygens: data vanish identically");
  return s;
}

// Even dimensions have no closed-form origin propagator beyond n = 2, and the
// descent quadrature is slow at late times, so they go through the FD oracle.
inline std::vector<double> fd_origin_values(const CauchyProblem& pb, const std::vector<double>& ts) {
  fd::FDConfig c;
  c.n = pb.mp.n;
  c.m = pb.mp.m;
  c.r_max = 1.6;  // beyond supp + 1, so the edge never talks to the origin
  c.dr = 2e-3;
  c.dt = 1e-3;
  c.t_max = ts.back();
  const auto f = fd::fd_solve(c, pb.phi0, pb.phi1);
  std::vector<double> out;
  for (double t : ts) out.push_back(fd::fd_probe(f, 0.0, t));
  return out;
}

}  // namespace detail

/// Samples Phi(0, t) on t_grid (all beyond the exit time) and classifies the tail.
inline HuygensReport measure_tail(const CauchyProblem& pb, const std::vector<double>& t_grid, double margin = 0.1) {
  pb.validate();
  HuygensReport rep;
  rep.mp = pb.mp;
  rep.datum_mode = datum_mode(pb);
  rep.margin = margin;
  rep.exit_time = exit_time(std::max(pb.phi0.support_radius(), pb.phi1.support_radius()), margin);
  rep.data_norm = detail::data_norm(pb);
  if (t_grid.empty()) throw DomainError("huygens: empty time grid");
  for (double t : t_grid)
    if (!(t > rep.exit_time)) throw DomainError("huygens: sample time " + std::to_string(t) + " before exit time");

  std::vector<double> values;
  if (pb.mp.n % 2 == 0) {
    rep.method = Method::fd;
    values = detail::fd_origin_values(pb, t_grid);
  } else {
    for (double t : t_grid) {
      const auto s = solve_detailed(pb, {0.0, 0.0, 0.0}, t);
      rep.method = s.method;
      values.push_back(s.value);
    }
  }
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double a = std::abs(values[i]);
    rep.tail_samples.push_back({t_grid[i], a, a / rep.data_norm});
    rep.tail_sup = std::max(rep.tail_sup, a / rep.data_norm);
  }
  rep.verdict = classify(rep.tail_sup, rep.datum_mode);
  return rep;
}

/// One report per mass, sharing the data of `data` and the same tail window.
inline std::vector<HuygensReport> mass_sweep(int n, const std::vector<double>& masses, const CauchyProblem& data,
                                             double t_max = 8.0, int samples = 40, double margin = 0.1) {
  for (double m : masses)
    if (!(m >= 0.0 && m <= 2.0 * n)) throw DomainError("mass_sweep: masses must lie in [0, 2n]");
  std::vector<std::future<HuygensReport>> jobs;
  for (double m : masses) {
    jobs.push_back(std::async(std::launch::async, [=, &data] {
      CauchyProblem pb{MassParams::from_mass(n, m), data.phi0, data.phi1, {}};
      const double ts = exit_time(std::max(pb.phi0.support_radius(), pb.phi1.support_radius()), margin);
      return measure_tail(pb, tail_grid(ts, t_max, samples), margin);
    }));
  }
  std::vector<HuygensReport> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  int points = 0;
};

/// Least-squares fit of log|Phi(0,t)| = slope t + intercept over samples with t >= t_min.
inline SlopeFit fit_tail_slope(const HuygensReport& rep, double t_min) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  for (const auto& s : rep.tail_samples) {
    if (s.t < t_min || !(s.abs > 0.0)) continue;
    const double y = std::log(s.abs);
    sx += s.t;
    sy += y;
    sxx += s.t * s.t;
    sxy += s.t * y;
    ++k;
  }
  if (k < 2) throw DomainError("fit_tail_slope: fewer than two usable samples");
  const double d = k * sxx - sx * sx;
  SlopeFit f;
  f.slope = (k * sxy - sx * sy) / d;
  f.intercept = (sy - f.slope * sx) / k;
  f.points = k;
  return f;
}

/// CSV with columns t, tail_abs, tail_rel.
inline void write_csv(const HuygensReport& rep, std::ostream& os) {
  const auto old = os.precision(17);
  os << "t,tail_abs,tail_rel\n";
  for (const auto& s : rep.tail_samples) os << s.t << ',' << s.abs << ',' << s.rel << '\n';
  os.precision(old);
}

}  // namespace kgds::huygens

#endif  // KGDS_HUYGENS_HPP
