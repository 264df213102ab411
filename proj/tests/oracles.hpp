#ifndef KGDS_TESTS_ORACLES_HPP
#define KGDS_TESTS_ORACLES_HPP

// Reference computations used only by the tests. Nothing in here calls into
// the library paths it is used to check.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

/// Plain Gauss series summed in long double for a fixed number of terms.
inline long double gauss_series(long double a, long double b, long double c, long double z,
                                std::size_t terms) {
  long double term = 1.0L;
  long double sum = 1.0L;
  for (std::size_t k = 0; k < terms; ++k) {
    term *= (a + k) * (b + k) / ((c + k) * (k + 1.0L)) * z;
    sum += term;
  }
  return sum;
}

/// Gamma(x) by downward recursion onto [1,2] and the long double library gamma there.
inline long double gamma_recursive(long double x) {
  long double prod = 1.0L;
  while (x > 2.0L) {
    x -= 1.0L;
    prod *= x;
  }
  return prod * std::tgamma(x);
}

/// Richardson-extrapolated central difference, two levels.
inline double derivative(const std::function<double(double)>& f, double x, double h) {
  auto d = [&](double step) { return (f(x + step) - f(x - step)) / (2.0 * step); };
  const double d1 = d(h);
  const double d2 = d(h / 2.0);
  const double d4 = d(h / 4.0);
  const double r1 = (4.0 * d2 - d1) / 3.0;
  const double r2 = (4.0 * d4 - d2) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

/// Composite Simpson rule with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Leapfrog for u_tt = u_rr + (n-1)/r u_r on [0, r_max] with a symmetric axis
/// (n = 1 gives the even-data line problem). Returns u(r_i, t_end) with
/// r_i = i*dr; t_end must be a multiple of dt.
inline std::vector<double> radial_wave_fd(int n, const std::function<double(double)>& phi0,
                                          const std::function<double(double)>& phi1, double r_max,
                                          double dr, double dt, double t_end) {
  const int nr = int(std::lround(r_max / dr)) + 1;
  std::vector<double> prev(nr), cur(nr), next(nr);
  auto lap = [&](const std::vector<double>& u, int i) {
    if (i == 0) return n * 2.0 * (u[1] - u[0]) / (dr * dr);
    if (i == nr - 1) return 0.0;
    const double r = i * dr;
    return (u[i + 1] - 2 * u[i] + u[i - 1]) / (dr * dr) + (n - 1) / r * (u[i + 1] - u[i - 1]) / (2 * dr);
  };
  for (int i = 0; i < nr; ++i) prev[i] = phi0(i * dr);
  for (int i = 0; i < nr; ++i) cur[i] = prev[i] + dt * phi1(i * dr) + 0.5 * dt * dt * lap(prev, i);
  const int steps = int(std::lround(t_end / dt));
  for (int s = 1; s < steps; ++s) {
    for (int i = 0; i < nr; ++i) next[i] = 2 * cur[i] - prev[i] + dt * dt * lap(cur, i);
    std::swap(prev, cur);
    std::swap(cur, next);
  }
  return steps == 0 ? prev : cur;
}

}  // namespace oracle

#endif  // KGDS_TESTS_ORACLES_HPP
