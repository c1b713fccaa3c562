#include "starspec/spectrum.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace starspec {

namespace {

struct TanValue {
  double value;
  double derivative;
};

TanValue tan_sum(std::span<const double> lengths, double lambda) {
  TanValue out{0.0, 0.0};
  for (double l : lengths) {
    const double t = std::tan(lambda * l);
    out.value += t;
    out.derivative += l * (1.0 + t * t);
  }
  return out;
}

// Poles pi (n + 1/2) / l_i in (lambda_min, lambda_max].
std::vector<double> sorted_poles(std::span<const double> lengths, double lambda_min, double lambda_max) {
  std::vector<double> poles;
  for (double l : lengths) {
    const auto first = static_cast<long>(std::max(0.0, std::floor(lambda_min * l / std::numbers::pi - 0.5)));
    for (long n = first;; ++n) {
      const double p = std::numbers::pi * (static_cast<double>(n) + 0.5) / l;
      if (p > lambda_max) break;
      if (p > lambda_min) poles.push_back(p);
    }
  }
  std::sort(poles.begin(), poles.end());
  return poles;
}

// A few extra Newton steps past the tolerance, kept while the residual
// shrinks; this takes the root to the floating-point floor of sum tan.
double polish(std::span<const double> lengths, double x, double lo, double hi) {
  double residual = std::abs(tan_sum(lengths, x).value);
  for (int i = 0; i < 4 && residual > 0.0; ++i) {
    const auto f = tan_sum(lengths, x);
    const double next = x - f.value / f.derivative;
    if (!(next >= lo && next <= hi)) break;
    const double r = std::abs(tan_sum(lengths, next).value);
    if (!(r < residual)) break;
    x = next;
    residual = r;
  }
  return x;
}

// Root of the increasing function sum tan on the open bracket (lo, hi).
std::optional<double> root_in_bracket(std::span<const double> lengths, double lo, double hi,
                                      const SolverOptions& opt) {
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < opt.max_iterations; ++it) {
    const auto f = tan_sum(lengths, x);
    if (f.value > 0.0) {
      hi = x;
    } else if (f.value < 0.0) {
      lo = x;
    } else {
      return x;
    }
    // Newton once the bracket is narrow; fall back to bisection when the
    // step leaves the bracket.
    double next = 0.5 * (lo + hi);
    if (hi - lo < 1e-4 && std::isfinite(f.derivative) && f.derivative > 0.0) {
      const double newton = x - f.value / f.derivative;
      if (newton > lo && newton < hi) {
        if (std::abs(newton - x) < opt.tolerance) return polish(lengths, newton, lo, hi);
        next = newton;
      }
    }
    if (hi - lo < opt.tolerance) return polish(lengths, 0.5 * (lo + hi), lo, hi);
    x = next;
  }
  return std::nullopt;
}

}  // namespace

std::complex<double> secular_det(const StarGraph& graph, double lambda) {
  const int v = graph.v();
  const int dim = 2 * v;
  // Edge index i is (0 -> i), index v + i is (i -> 0).
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(dim, dim);
  const double transmit = s_amplitude(Scattering::transmit, v);
  const double back = s_amplitude(Scattering::backscatter, v);
  for (int i = 0; i < v; ++i) {
    const std::complex<double> phase = std::polar(1.0, -lambda * graph.length(i));
    m(i, v + i) -= phase * s_amplitude(Scattering::trivial, v);
    for (int k = 0; k < v; ++k) {
      m(v + i, k) -= phase * (i == k ? back : transmit);
    }
  }
  return m.partialPivLu().determinant();
}

std::optional<double> secular_tan(const StarGraph& graph, double lambda, double pole_tolerance) {
  for (double l : graph.lengths()) {
    const double x = lambda * l / std::numbers::pi - 0.5;
    const double distance = std::abs(x - std::round(x)) * std::numbers::pi / l;
    if (distance <= pole_tolerance) return std::nullopt;
  }
  return tan_sum(graph.lengths(), lambda).value;
}

Spectrum solve_spectrum(const StarGraph& graph, double lambda_max, SolverOptions options) {
  return solve_spectrum(graph, 0.0, lambda_max, options);
}

Spectrum solve_spectrum(const StarGraph& graph, double lambda_min, double lambda_max, SolverOptions options) {
  if (!(lambda_max > 0.0)) throw std::invalid_argument("lambda_max must be positive");
  if (!(lambda_min >= 0.0 && lambda_min < lambda_max)) {
    throw std::invalid_argument("lambda_min must lie in [0, lambda_max)");
  }
  const auto lengths = graph.lengths();
  const auto poles = sorted_poles(lengths, lambda_min, lambda_max);

  Spectrum out;
  out.lambda_max = lambda_max;
  out.lambda_min = lambda_min;
  out.graph_v = graph.v();
  out.graph_seed = graph.seed();
  out.total_length = graph.total_length();
  out.eigenvalues.reserve(poles.size());

  std::vector<std::pair<double, double>> failed;
  auto solve = [&](double lo, double hi) {
    if (!(hi > lo)) return;  // coincident poles
    if (auto root = root_in_bracket(lengths, lo, hi, options)) {
      out.eigenvalues.push_back(*root);
    } else {
      failed.emplace_back(lo, hi);
    }
  };

  // (0, first pole) holds only the excluded root at zero; a window starting
  // later holds a root below its first pole when sum tan is negative there.
  if (lambda_min > 0.0 && !poles.empty() && tan_sum(lengths, lambda_min).value < 0.0) solve(lambda_min, poles.front());
  for (std::size_t k = 0; k + 1 < poles.size(); ++k) solve(poles[k], poles[k + 1]);
  if (poles.empty() && lambda_min > 0.0) {
    if (tan_sum(lengths, lambda_min).value < 0.0 && tan_sum(lengths, lambda_max).value >= 0.0) {
      solve(lambda_min, lambda_max);
    }
  }
  if (!poles.empty() && poles.back() < lambda_max) {
    const double f = tan_sum(lengths, lambda_max).value;
    if (f == 0.0) {
      out.eigenvalues.push_back(lambda_max);
    } else if (f > 0.0) {
      solve(poles.back(), lambda_max);
    }
  }

  if (!failed.empty()) {
    throw ConvergenceError(std::to_string(failed.size()) + " bracket(s) did not converge",
                           std::move(failed));
  }
  return out;
}

}  // namespace starspec
