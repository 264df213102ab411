#ifndef KGDS_SPECIAL_HPP
#define KGDS_SPECIAL_HPP

// Gamma, digamma and the Gauss hypergeometric function 2F1(a,b;c;z) on
// z in [0,1), for real parameters and for the complex parameters that the
// large-mass kernels need. Everything here is a pure function.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>

#include "kgds/error.hpp"

namespace kgds::special {

using cplx = std::complex<double>;

namespace detail {

// Lanczos approximation, g = 7, nine terms.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }
inline bool is_nonpositive_integer(const cplx& x) {
  return x.imag() == 0.0 && is_nonpositive_integer(x.real());
}

}  // namespace detail

/// Gamma function. Relative error is a few ulp on [0.1, 30].
inline double gamma(double x) {
  if (detail::is_nonpositive_integer(x))
    throw DomainError("gamma: pole at non-positive integer " + std::to_string(x));
  if (x < 0.5) {
    const double pi = std::numbers::pi;
    return pi / (std::sin(pi * x) * gamma(1.0 - x));
  }
  x -= 1.0;
  double acc = detail::kLanczosCoef[0];
  for (int i = 1; i < 9; ++i) acc += detail::kLanczosCoef[i] / (x + i);
  const double t = x + detail::kLanczosG + 0.5;
  // split the power so Gamma(x) near 171 does not overflow early
  const double half = std::pow(t, 0.5 * (x + 0.5));
  return std::sqrt(2.0 * std::numbers::pi) * half * (half * std::exp(-t)) * acc;
}

inline cplx gamma(cplx z) {
  if (detail::is_nonpositive_integer(z))
    throw DomainError("gamma: pole at non-positive integer");
  if (z.imag() == 0.0) return {gamma(z.real()), 0.0};
  if (z.real() < 0.5) {
    const double pi = std::numbers::pi;
    return pi / (std::sin(pi * z) * gamma(1.0 - z));
  }
  z -= 1.0;
  cplx acc = detail::kLanczosCoef[0];
  for (int i = 1; i < 9; ++i) acc += detail::kLanczosCoef[i] / (z + double(i));
  const cplx t = z + detail::kLanczosG + 0.5;
  return std::sqrt(2.0 * std::numbers::pi) * std::exp((z + 0.5) * std::log(t) - t) * acc;
}

/// 1/Gamma(x), zero at the poles.
inline double rgamma(double x) { return detail::is_nonpositive_integer(x) ? 0.0 : 1.0 / gamma(x); }
inline cplx rgamma(cplx z) { return detail::is_nonpositive_integer(z) ? cplx{0.0} : 1.0 / gamma(z); }

/// Digamma psi(x) = Gamma'(x)/Gamma(x) for real x.
inline double digamma(double x) {
  if (detail::is_nonpositive_integer(x))
    throw DomainError("digamma: pole at non-positive integer");
  if (x < 0.0) {
    const double pi = std::numbers::pi;
    return digamma(1.0 - x) - pi / std::tan(pi * x);
  }
  double shift = 0.0;
  while (x < 12.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double f = 1.0 / (x * x);
  const double tail =
      f * (1.0 / 12 -
           f * (1.0 / 120 - f * (1.0 / 252 - f * (1.0 / 240 - f * (1.0 / 132 - f * (691.0 / 32760))))));
  return shift + std::log(x) - 0.5 / x - tail;
}

template <class T>
struct HypResult {
  T value{};
  double abs_err_est = 0.0;
  int terms_used = 0;
};

/// Real call-site parameters. a = b in all kernel uses; c is 1 or 2.
struct HypParams {
  double a = 0.0;
  double b = 0.0;
  double c = 1.0;
  double z = 0.0;
};

inline constexpr int kMaxSeriesTerms = 10000;

namespace detail {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

template <class T>
struct SeriesSum {
  T value{};
  double abs_sum = 0.0;  // sum of |term|, drives the rounding estimate
  int terms = 0;

  [[nodiscard]] double err() const { return 4.0 * kEps * abs_sum; }
};

// Stops once three consecutive terms fall below 1e-16 of the partial sum,
// or as soon as a term is exactly zero (terminating series).
template <class T>
class Terminator {
 public:
  bool done(const T& term, const T& sum, double abs_sum) {
    const double t = std::abs(term);
    if (t < 1e-16 * std::abs(sum) || t < 1e-17 * abs_sum)
      ++run_;
    else
      run_ = 0;
    return run_ >= 3;
  }

 private:
  int run_ = 0;
};

template <class T>
SeriesSum<T> gauss_series(T a, T b, T c, double z) {
  T term{1.0};
  SeriesSum<T> s{T{1.0}, 1.0, 1};
  Terminator<T> stop;
  for (int k = 0; k < kMaxSeriesTerms; ++k) {
    const double kk = k;
    term *= (a + kk) * (b + kk) / ((c + kk) * (kk + 1.0)) * z;
    if (term == T{0.0}) return s;
    s.value += term;
    s.abs_sum += std::abs(term);
    ++s.terms;
    if (stop.done(term, s.value, s.abs_sum)) return s;
  }
  throw ConvergenceError("hyp2f1: power series did not converge within the term budget");
}

// sum_k (alpha)_k (beta)_k / (k! (k+m)!) w^k
//       * [ln w - psi(k+1) - psi(k+m+1) + psi(alpha+k) + psi(beta+k)]
inline SeriesSum<double> log_series(double alpha, double beta, int m, double w) {
  double coef = 1.0;
  for (int j = 2; j <= m; ++j) coef /= j;
  const double lw = std::log(w);
  double psi_k1 = digamma(1.0);
  double psi_km1 = digamma(m + 1.0);
  double psi_a = digamma(alpha);
  double psi_b = digamma(beta);
  SeriesSum<double> s{0.0, 0.0, 0};
  Terminator<double> stop;
  for (int k = 0; k < kMaxSeriesTerms; ++k) {
    const double term = coef * (lw - psi_k1 - psi_km1 + psi_a + psi_b);
    s.value += term;
    s.abs_sum += std::abs(term) + std::abs(coef * lw);
    ++s.terms;
    if (k > 0 && stop.done(term, s.value, s.abs_sum)) return s;
    if (coef == 0.0) return s;
    coef *= (alpha + k) * (beta + k) / ((k + 1.0) * (k + m + 1.0)) * w;
    psi_k1 += 1.0 / (k + 1.0);
    psi_km1 += 1.0 / (k + m + 1.0);
    psi_a += 1.0 / (alpha + k);
    psi_b += 1.0 / (beta + k);
  }
  throw ConvergenceError("hyp2f1: logarithmic series did not converge within the term budget");
}

inline HypResult<double> from_series(const SeriesSum<double>& s) {
  return {s.value, s.err(), s.terms};
}

// c - a - b = m, an integer; z > 1/2 and neither a nor b a non-positive integer.
inline HypResult<double> connection_log(double a, double b, double c, int m, double w) {
  HypResult<double> out;
  if (m >= 0) {
    double part1 = 0.0;
    if (m > 0) {
      const double pre = gamma(double(m)) * gamma(c) * rgamma(a + m) * rgamma(b + m);
      double term = 1.0;
      double sum = 1.0;
      for (int k = 0; k + 1 < m; ++k) {
        term *= (a + k) * (b + k) / ((k + 1.0) * (1.0 - m + k)) * w;
        sum += term;
      }
      part1 = pre * sum;
      out.terms_used += m;
      out.abs_err_est += 4.0 * kEps * std::abs(part1) * m;
    }
    const double pre2 = -std::pow(-w, m) * gamma(c) * rgamma(a) * rgamma(b);
    double part2 = 0.0;
    if (pre2 != 0.0) {
      const auto s = log_series(a + m, b + m, m, w);
      part2 = pre2 * s.value;
      out.terms_used += s.terms;
      out.abs_err_est += std::abs(pre2) * s.err();
    }
    out.value = part1 + part2;
  } else {
    const int mm = -m;
    const double pre1 = gamma(double(mm)) * gamma(c) * rgamma(a) * rgamma(b) * std::pow(w, -mm);
    double term = 1.0;
    double sum = 1.0;
    for (int k = 0; k + 1 < mm; ++k) {
      term *= (a - mm + k) * (b - mm + k) / ((k + 1.0) * (1.0 - mm + k)) * w;
      sum += term;
    }
    const double part1 = pre1 * sum;
    out.terms_used += mm;
    out.abs_err_est += 4.0 * kEps * std::abs(part1) * mm;
    const double sign = (mm % 2 == 0) ? 1.0 : -1.0;
    const double pre2 = -sign * gamma(c) * rgamma(a - mm) * rgamma(b - mm);
    double part2 = 0.0;
    if (pre2 != 0.0) {
      const auto s = log_series(a, b, mm, w);
      part2 = pre2 * s.value;
      out.terms_used += s.terms;
      out.abs_err_est += std::abs(pre2) * s.err();
    }
    out.value = part1 + part2;
  }
  out.abs_err_est += 4.0 * kEps * std::abs(out.value);
  return out;
}

// Non-integer c - a - b: the standard z -> 1 - z connection formula.
template <class T>
HypResult<T> connection_generic(T a, T b, T c, double w) {
  const T d = c - a - b;
  HypResult<T> out;
  const T pre1 = gamma(c) * gamma(d) * rgamma(c - a) * rgamma(c - b);
  if (pre1 != T{0.0}) {
    const auto s1 = gauss_series(a, b, 1.0 - d, w);
    out.value += pre1 * s1.value;
    out.terms_used += s1.terms;
    out.abs_err_est += std::abs(pre1) * (s1.err() + 2.0 * kEps * std::abs(s1.value));
  }
  const T pre2 = gamma(c) * gamma(-d) * rgamma(a) * rgamma(b) * std::pow(T{w}, d);
  if (pre2 != T{0.0}) {
    const auto s2 = gauss_series(c - a, c - b, 1.0 + d, w);
    out.value += pre2 * s2.value;
    out.terms_used += s2.terms;
    out.abs_err_est += std::abs(pre2) * (s2.err() + 2.0 * kEps * std::abs(s2.value));
  }
  return out;
}

inline void check_argument(double z, double w) {
  if (!(z >= 0.0 && z < 1.0) || !(w > 0.0 && w <= 1.0))
    throw DomainError("hyp2f1: argument z=" + std::to_string(z) + " outside [0,1)");
}

}  // namespace detail

/// 2F1(a,b;c;z) for real parameters. `one_minus_z` must equal 1 - z; callers
/// that know 1 - z more accurately than z itself pass it directly.
inline HypResult<double> hyp2f1(double a, double b, double c, double z, double one_minus_z) {
  detail::check_argument(z, one_minus_z);
  if (detail::is_nonpositive_integer(c))
    throw DomainError("hyp2f1: c is a non-positive integer");
  if (detail::is_nonpositive_integer(a) || detail::is_nonpositive_integer(b) || z <= 0.5)
    return detail::from_series(detail::gauss_series(a, b, c, z));
  const double d = c - a - b;
  const double m = std::round(d);
  if (std::abs(d - m) < 1e-12) return detail::connection_log(a, b, a + b + m, int(m), one_minus_z);
  return detail::connection_generic(a, b, c, one_minus_z);
}

/// Complex-parameter variant. Integer c - a - b is only supported for real
/// parameters, which are forwarded to the real routine.
inline HypResult<cplx> hyp2f1(cplx a, cplx b, cplx c, double z, double one_minus_z) {
  if (a.imag() == 0.0 && b.imag() == 0.0 && c.imag() == 0.0) {
    const auto r = hyp2f1(a.real(), b.real(), c.real(), z, one_minus_z);
    return {cplx{r.value}, r.abs_err_est, r.terms_used};
  }
  detail::check_argument(z, one_minus_z);
  if (detail::is_nonpositive_integer(c))
    throw DomainError("hyp2f1: c is a non-positive integer");
  if (detail::is_nonpositive_integer(a) || detail::is_nonpositive_integer(b) || z <= 0.5) {
    const auto s = detail::gauss_series(a, b, c, z);
    return {s.value, s.err(), s.terms};
  }
  const cplx d = c - a - b;
  if (d.imag() == 0.0 && d.real() == std::round(d.real()))
    throw DomainError("hyp2f1: integer c-a-b with complex parameters");
  return detail::connection_generic(a, b, c, one_minus_z);
}

inline HypResult<double> hyp2f1(const HypParams& p) { return hyp2f1(p.a, p.b, p.c, p.z, 1.0 - p.z); }

/// Gauss summation: 2F1(a,b;c;1) = Gamma(c)Gamma(c-a-b) / (Gamma(c-a)Gamma(c-b)).
inline double hyp2f1_at_one(double a, double b, double c) {
  const double d = c - a - b;
  if (!(d > 0.0)) throw DomainError("hyp2f1_at_one: requires c - a - b > 0");
  return gamma(c) * gamma(d) * rgamma(c - a) * rgamma(c - b);
}

/// (1 - z) 2F1(3/2, 3/2; 2; z), which tends to 4/pi as z -> 1-.
inline double one_minus_z_limit_check(double z) {
  if (!(z > 0.9 && z < 1.0)) throw DomainError("one_minus_z_limit_check: z must lie in (0.9, 1)");
  const double w = 1.0 - z;
  return w * hyp2f1(1.5, 1.5, 2.0, z, w).value;
}

}  // namespace kgds::special

#endif  // KGDS_SPECIAL_HPP
