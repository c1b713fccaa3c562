#pragma once

#include <span>
#include <vector>

namespace starspec {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

/// n-point Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Composite Gauss-Legendre: `points` nodes in total, split into equal panels
/// of at most `panel_order` nodes each.
QuadratureRule composite_gauss_legendre(int points, double a, double b, int panel_order = 16);

/// Concatenation of composite rules on consecutive intervals [cuts[i], cuts[i+1]],
/// `points` nodes per interval.
QuadratureRule piecewise_rule(std::span<const double> cuts, int points, int panel_order = 16);

}  // namespace starspec
