#include "starspec/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace starspec {

namespace {

// Nodes and weights on [-1, 1] by Newton iteration on P_n.
const QuadratureRule& reference_rule(int n) {
  static std::map<int, QuadratureRule> cache;
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(n); it != cache.end()) return it->second;

  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return cache.emplace(n, std::move(rule)).first->second;
}

}  // namespace

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("quadrature needs at least one node");
  const auto& ref = reference_rule(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  QuadratureRule out;
  out.nodes.reserve(ref.size());
  out.weights.reserve(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    out.nodes.push_back(mid + half * ref.nodes[i]);
    out.weights.push_back(half * ref.weights[i]);
  }
  return out;
}

QuadratureRule composite_gauss_legendre(int points, double a, double b, int panel_order) {
  if (points < 1 || panel_order < 1) throw std::invalid_argument("bad quadrature size");
  const int panels = (points + panel_order - 1) / panel_order;
  const int order = (points + panels - 1) / panels;
  QuadratureRule out;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double hi = p + 1 == panels ? b : lo + h;
    auto panel = gauss_legendre(order, lo, hi);
    out.nodes.insert(out.nodes.end(), panel.nodes.begin(), panel.nodes.end());
    out.weights.insert(out.weights.end(), panel.weights.begin(), panel.weights.end());
  }
  return out;
}

QuadratureRule piecewise_rule(std::span<const double> cuts, int points, int panel_order) {
  QuadratureRule out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    auto part = composite_gauss_legendre(points, cuts[i], cuts[i + 1], panel_order);
    out.nodes.insert(out.nodes.end(), part.nodes.begin(), part.nodes.end());
    out.weights.insert(out.weights.end(), part.weights.begin(), part.weights.end());
  }
  return out;
}

}  // namespace starspec
