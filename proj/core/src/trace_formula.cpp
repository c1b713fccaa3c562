#include "starspec/trace_formula.hpp"

#include "starspec/orbits.hpp"
#include "starspec/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace starspec {

namespace {

struct OrbitTerm {
  double length;
  double weight;  // sum over orbits of A_p / r_p
};

void check_grid(std::span<const double> grid) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("grid must be strictly increasing");
  }
}

}  // namespace

SmoothedDensity density_from_orbits(const StarGraph& graph, std::span<const double> grid, double sigma,
                                    int k_max, double max_words) {
  if (k_max < 0) throw std::invalid_argument("k_max must be >= 0");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  check_grid(grid);
  const int v = graph.v();

  double words = 0.0;
  for (int k = 1; k <= k_max; ++k) words += std::pow(static_cast<double>(v), k);
  if (words > max_words) {
    throw std::length_error("orbit enumeration needs " + std::to_string(words) +
                            " words, budget is " + std::to_string(max_words));
  }

  // Orbits of one letter multiset have a common length; sum their weights
  // first, in necklace (lexicographic) order so the result is reproducible.
  std::vector<OrbitTerm> terms;
  for (int k = 1; k <= k_max; ++k) {
    std::map<std::vector<int>, double> by_content;
    std::vector<int> content(static_cast<std::size_t>(v));
    for_each_necklace(v, k, [&](const std::vector<int>& word, int period) {
      std::fill(content.begin(), content.end(), 0);
      int backscatters = 0;
      for (std::size_t i = 0; i < word.size(); ++i) {
        ++content[static_cast<std::size_t>(word[i] - 1)];
        if (word[i] == word[(i + 1) % word.size()]) ++backscatters;
      }
      const double a = std::pow(s_amplitude(Scattering::backscatter, v), backscatters) *
                       std::pow(s_amplitude(Scattering::transmit, v), k - backscatters);
      by_content[content] += a * period / k;
    });
    for (const auto& [counts, weight] : by_content) {
      double length = 0.0;
      for (int i = 0; i < v; ++i) length += 2.0 * counts[static_cast<std::size_t>(i)] * graph.length(i);
      terms.push_back({length, weight});
    }
  }

  SmoothedDensity out;
  out.grid.assign(grid.begin(), grid.end());
  out.values.assign(grid.size(), 0.0);
  out.sigma = sigma;
  out.max_period = 2 * k_max;

  std::vector<double> prefactor(terms.size());
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const double l = terms[t].length;
    prefactor[t] = l * terms[t].weight * std::exp(-0.5 * sigma * sigma * l * l) / std::numbers::pi;
  }
  const double weyl = graph.total_length() / (2.0 * std::numbers::pi);
  parallel_for(grid.size(), [&](std::size_t g) {
    double sum = weyl;
    for (std::size_t t = 0; t < terms.size(); ++t) sum += prefactor[t] * std::cos(grid[g] * terms[t].length);
    out.values[g] = sum;
  });
  return out;
}

SmoothedDensity density_from_spectrum(const Spectrum& spectrum, std::span<const double> grid,
                                      double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  check_grid(grid);
  for (double x : grid) {
    if (!(x > 0.0) || x > spectrum.lambda_max - 5.0 * sigma) {
      throw std::invalid_argument("grid point outside (0, lambda_max - 5 sigma]");
    }
  }
  SmoothedDensity out;
  out.grid.assign(grid.begin(), grid.end());
  out.values.assign(grid.size(), 0.0);
  out.sigma = sigma;

  const auto& ev = spectrum.eigenvalues;
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  const double reach = 12.0 * sigma;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto first = std::lower_bound(ev.begin(), ev.end(), grid[g] - reach);
    double sum = 0.0;
    for (auto it = first; it != ev.end() && *it <= grid[g] + reach; ++it) {
      const double z = (grid[g] - *it) / sigma;
      sum += std::exp(-0.5 * z * z);
    }
    out.values[g] = norm * sum;
  }
  return out;
}

double relative_l2_distance(const SmoothedDensity& a, const SmoothedDensity& b) {
  if (a.grid != b.grid) throw std::invalid_argument("densities sampled on different grids");
  double diff = 0.0;
  double ref = 0.0;
  for (std::size_t i = 0; i + 1 < a.grid.size(); ++i) {
    const double h = 0.5 * (a.grid[i + 1] - a.grid[i]);
    for (std::size_t k : {i, i + 1}) {
      const double d = a.values[k] - b.values[k];
      diff += h * d * d;
      ref += h * b.values[k] * b.values[k];
    }
  }
  return std::sqrt(diff / ref);
}

double integrate(const SmoothedDensity& density) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < density.grid.size(); ++i) {
    sum += 0.5 * (density.grid[i + 1] - density.grid[i]) * (density.values[i] + density.values[i + 1]);
  }
  return sum;
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw std::invalid_argument("bad grid specification");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 0.5));
  for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

}  // namespace starspec
