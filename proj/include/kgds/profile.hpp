#ifndef KGDS_PROFILE_HPP
#define KGDS_PROFILE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "kgds/error.hpp"

namespace kgds {

using Point = std::array<double, 3>;

inline double norm(const Point& p) { return std::hypot(p[0], p[1], p[2]); }
inline double distance(const Point& a, const Point& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
}

/// One radially symmetric piece a * ((R^2 - r^2)/R^2)^p * exp(-alpha r^2),
/// centred at `center` and cut off at r = R. An infinite R with p = 0 gives
/// a global Gaussian (or a constant when alpha = 0).
struct ProfileTerm {
  double amplitude = 1.0;
  double radius = 0.5;
  int power = 8;
  double alpha = 0.0;
  Point center{0.0, 0.0, 0.0};

  bool unbounded() const { return !std::isfinite(radius); }

  /// Highest derivative order that is continuous across r = R.
  int max_order() const { return unbounded() ? 64 : power - 1; }

  /// k-th derivative in the radial variable, valid for any real r (the term
  /// is an even function of r).
  double derivative(double r, int k) const {
    if (k < 0 || k > max_order()) throw DomainError("profile: derivative order exceeds K_max");
    if (!unbounded() && std::abs(r) >= radius) return 0.0;
    double acc = 0.0;
    for (int j = 0; j <= k; ++j) {
      const double pj = poly_derivative(r, j);
      if (pj == 0.0) continue;
      acc += binomial(k, j) * pj * gauss_derivative(r, k - j);
    }
    return amplitude * acc;
  }

  double value(double r) const { return derivative(r, 0); }

 private:
  static double binomial(int k, int j) {
    double b = 1.0;
    for (int i = 1; i <= j; ++i) b = b * (k - j + i) / i;
    return b;
  }

  // d^j/dr^j ((R^2 - r^2)/R^2)^p; the sum is over the chain rule for a
  // quadratic inner function, so it never forms (R^2 - r^2) by subtraction
  // more than once.
  double poly_derivative(double r, int j) const {
    if (unbounded()) return j == 0 ? 1.0 : 0.0;
    const double u = (radius - r) * (radius + r);
    const double scale = std::pow(radius, -2.0 * power);
    double sum = 0.0;
    double fact_j = 1.0;
    for (int i = 2; i <= j; ++i) fact_j *= i;
    for (int i = 0; 2 * i <= j; ++i) {
      const int outer = j - i;  // order of the derivative of u^p
      if (outer > power) continue;
      double falling = 1.0;
      for (int l = 0; l < outer; ++l) falling *= power - l;
      double denom = 1.0;
      for (int l = 2; l <= i; ++l) denom *= l;
      for (int l = 2; l <= j - 2 * i; ++l) denom *= l;
      const double sign = (i % 2) ? -1.0 : 1.0;
      sum += sign * fact_j / denom * falling * std::pow(u, power - outer) * std::pow(-2.0 * r, j - 2 * i);
    }
    return scale * sum;
  }

  // d^j/dr^j exp(-alpha r^2) = (-sqrt(alpha))^j H_j(sqrt(alpha) r) exp(-alpha r^2)
  double gauss_derivative(double r, int j) const {
    if (alpha == 0.0) return j == 0 ? 1.0 : 0.0;
    const double s = std::sqrt(alpha);
    const double x = s * r;
    double h0 = 1.0;
    double h1 = 2.0 * x;
    double h = j == 0 ? h0 : h1;
    for (int i = 1; i < j; ++i) {
      h = 2.0 * x * h1 - 2.0 * i * h0;
      h0 = h1;
      h1 = h;
    }
    return std::pow(-s, j) * h * std::exp(-alpha * r * r);
  }
};

/// Initial datum or forcing profile: a finite sum of radial terms. Each term
/// carries analytic derivatives of every order up to its K_max.
class RadialProfile {
 public:
  RadialProfile() = default;

  static RadialProfile zero() { return RadialProfile{}; }

  /// ((R^2 - r^2)/R^2)^p, scaled so that the peak value is `amplitude`.
  static RadialProfile bump(double radius, int power, double amplitude = 1.0, Point center = {}) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("profile: radius must be positive and finite");
    if (power < 1) throw DomainError("profile: power must be at least 1");
    return RadialProfile({ProfileTerm{amplitude, radius, power, 0.0, center}});
  }

  /// Gaussian exp(-alpha r^2) multiplied by a bump so that it is compactly
  /// supported and smooth to order power-1.
  static RadialProfile gaussian_trunc(double radius, int power, double alpha, double amplitude = 1.0,
                                      Point center = {}) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("profile: radius must be positive and finite");
    if (power < 1 || alpha < 0.0) throw DomainError("profile: invalid gaussian_trunc parameters");
    return RadialProfile({ProfileTerm{amplitude, radius, power, alpha, center}});
  }

  /// Spatially constant profile (unbounded support).
  static RadialProfile constant(double c) {
    return RadialProfile({ProfileTerm{c, std::numeric_limits<double>::infinity(), 0, 0.0, {}}});
  }

  const std::vector<ProfileTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// True when every term is centred at the origin.
  bool is_radial() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const ProfileTerm& t) { return norm(t.center) == 0.0; });
  }

  /// Radius of the smallest origin-centred ball containing the support.
  double support_radius() const {
    double r = 0.0;
    for (const auto& t : terms_) r = std::max(r, norm(t.center) + t.radius);
    return r;
  }

  int max_order() const {
    int k = 64;
    for (const auto& t : terms_) k = std::min(k, t.max_order());
    return k;
  }

  /// Value at a point of space.
  double operator()(const Point& y) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.value(distance(y, t.center));
    return s;
  }

  /// k-th radial derivative; requires is_radial().
  double derivative(double r, int k) const {
    if (!is_radial()) throw DomainError("profile: radial derivative of an off-centre profile");
    double s = 0.0;
    for (const auto& t : terms_) s += t.derivative(r, k);
    return s;
  }
  double radial(double r) const { return derivative(r, 0); }

  /// Sup norm. Exact for a single origin-centred bump; otherwise sampled on
  /// a fine radial grid, or bounded by the sum of amplitudes for off-centre data.
  double sup_norm() const {
    if (terms_.empty()) return 0.0;
    if (terms_.size() == 1 && terms_[0].alpha == 0.0) return std::abs(terms_[0].amplitude);
    if (!is_radial()) {
      double s = 0.0;
      for (const auto& t : terms_) s += std::abs(t.amplitude);
      return s;
    }
    const double R = std::isfinite(support_radius()) ? support_radius() : 10.0;
    double best = 0.0;
    const int samples = 4000;
    for (int i = 0; i <= samples; ++i) best = std::max(best, std::abs(radial(R * i / samples)));
    return best;
  }

  RadialProfile& operator+=(const RadialProfile& o) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    return *this;
  }
  RadialProfile& operator*=(double a) {
    if (a == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto& t : terms_) t.amplitude *= a;
    return *this;
  }
  friend RadialProfile operator+(RadialProfile a, const RadialProfile& b) { return a += b; }
  friend RadialProfile operator*(double a, RadialProfile p) { return p *= a; }

  /// Compares analytic derivatives with central differences of the next lower
  /// order; throws DomainError on mismatch.
  void validate() const {
    for (const auto& t : terms_) {
      const double R = t.unbounded() ? 1.0 : t.radius;
      const int kmax = std::min(t.max_order(), 4);
      const double h = 1e-5 * R;
      for (int k = 1; k <= kmax; ++k) {
        double scale = 0.0;
        for (double f : {0.13, 0.41, 0.77}) scale = std::max(scale, std::abs(t.derivative(f * R, k)));
        for (double f : {0.13, 0.41, 0.77}) {
          const double r = f * R;
          const double fd = (t.derivative(r + h, k - 1) - t.derivative(r - h, k - 1)) / (2.0 * h);
          const double an = t.derivative(r, k);
          if (std::abs(fd - an) > 1e-6 * std::max(1.0, scale))
            throw DomainError("profile: analytic derivative of order " + std::to_string(k) +
                              " disagrees with finite differences");
        }
      }
    }
  }

 private:
  explicit RadialProfile(std::vector<ProfileTerm> terms) : terms_(std::move(terms)) { validate(); }

  std::vector<ProfileTerm> terms_;
};

/// Separable source term f(x, b) = g(b) psi(x).
struct SeparableForcing {
  std::function<double(double)> g;
  RadialProfile psi;
};

}  // namespace kgds

#endif  // KGDS_PROFILE_HPP
