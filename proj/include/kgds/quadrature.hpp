#ifndef KGDS_QUADRATURE_HPP
#define KGDS_QUADRATURE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <type_traits>
#include <utility>
#include <vector>

#include "kgds/error.hpp"

namespace kgds::quad {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline constexpr int kMaxRuleOrder = 128;

namespace detail {

inline GaussRule make_rule(int n) {
  GaussRule rule{std::vector<double>(n), std::vector<double>(n)};
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute the derivative at the converged root for the weight
    double p1 = 1.0;
    double p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
    dp = n * (z * p1 - p2) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace detail

/// Cached rule of the given order (1..128). Thread-safe.
inline const GaussRule& gauss_legendre(int order) {
  if (order < 1 || order > kMaxRuleOrder) throw DomainError("gauss_legendre: unsupported order");
  static const std::vector<GaussRule> rules = [] {
    std::vector<GaussRule> r(kMaxRuleOrder + 1);
    for (int n = 1; n <= kMaxRuleOrder; ++n) r[n] = detail::make_rule(n);
    return r;
  }();
  return rules[order];
}

/// Fixed-order rule mapped to [a, b].
template <class F>
auto fixed(F&& f, double a, double b, int order) {
  using R = std::decay_t<std::invoke_result_t<F&, double>>;
  const auto& rule = gauss_legendre(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  R sum{};
  for (int i = 0; i < order; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return R(sum * half);
}

struct Options {
  /// Interior points where the integrand may lose smoothness.
  std::vector<double> breakpoints;
  /// Width of a boundary layer at the upper limit; panels are graded
  /// geometrically towards b when positive.
  double layer_scale = 0.0;
  /// Longest initial panel.
  double max_panel = 0.125;
  int order = 16;
  double rel_tol = 1e-12;
  double abs_tol = 0.0;
  int max_depth = 40;
};

template <class R>
struct Result {
  R value{};
  double err_est = 0.0;
  long evaluations = 0;
};

namespace detail {

inline std::vector<double> panel_edges(double a, double b, const Options& opt) {
  std::vector<double> edges{a, b};
  for (double p : opt.breakpoints)
    if (p > a && p < b) edges.push_back(p);
  if (opt.layer_scale > 0.0) {
    for (double d = opt.layer_scale; b - d > a; d *= 4.0) edges.push_back(b - d);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  std::vector<double> out;
  out.push_back(edges.front());
  for (std::size_t i = 1; i < edges.size(); ++i) {
    const double lo = edges[i - 1];
    const double hi = edges[i];
    if (hi - lo <= 0.0) continue;
    const int pieces = std::max(1, int(std::ceil((hi - lo) / opt.max_panel)));
    for (int k = 1; k <= pieces; ++k) out.push_back(k == pieces ? hi : lo + (hi - lo) * k / pieces);
  }
  return out;
}

template <class R>
struct Panel {
  double lo, hi;
  R whole;
  int depth;
};

}  // namespace detail

/// Adaptive composite Gauss-Legendre on [a, b]: each panel is accepted once
/// its value agrees with the sum over its two halves.
template <class F>
auto integrate(F&& f, double a, double b, const Options& opt = {}) {
  using R = std::decay_t<std::invoke_result_t<F&, double>>;
  Result<R> res;
  if (!(b > a)) return res;
  const auto& rule = gauss_legendre(opt.order);

  auto apply = [&](double lo, double hi, double* abs_out) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    R sum{};
    double abs_sum = 0.0;
    for (int i = 0; i < opt.order; ++i) {
      const R v = f(mid + half * rule.nodes[i]);
      sum += rule.weights[i] * v;
      abs_sum += rule.weights[i] * std::abs(v);
    }
    res.evaluations += opt.order;
    if (abs_out) *abs_out += abs_sum * half;
    return R(sum * half);
  };

  const auto edges = detail::panel_edges(a, b, opt);
  std::vector<detail::Panel<R>> stack;
  double magnitude = 0.0;
  for (std::size_t i = 1; i < edges.size(); ++i)
    stack.push_back({edges[i - 1], edges[i], apply(edges[i - 1], edges[i], &magnitude), 0});

  const double target = std::max(opt.abs_tol, opt.rel_tol * magnitude);
  bool unresolved = false;
  while (!stack.empty()) {
    auto p = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (p.lo + p.hi);
    const R left = apply(p.lo, mid, nullptr);
    const R right = apply(mid, p.hi, nullptr);
    const double diff = std::abs(left + right - p.whole);
    const double tol = target * std::max((p.hi - p.lo) / (b - a), 0.01);
    const bool unresolvable = p.hi - p.lo <= 1e-13 * std::max(std::abs(p.lo), std::abs(p.hi));
    if (diff <= tol || p.depth >= opt.max_depth || unresolvable) {
      if (diff > tol) unresolved = true;
      res.value += left + right;
      res.err_est += diff;
      continue;
    }
    stack.push_back({p.lo, mid, left, p.depth + 1});
    stack.push_back({mid, p.hi, right, p.depth + 1});
  }
  if (unresolved && res.err_est > 10.0 * target)
    throw ConvergenceError("quadrature: error target not met at maximum subdivision depth");
  return res;
}

}  // namespace kgds::quad

#endif  // KGDS_QUADRATURE_HPP
