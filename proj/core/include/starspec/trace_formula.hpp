#pragma once

#include "starspec/graph.hpp"
#include "starspec/spectrum.hpp"

#include <span>
#include <vector>

namespace starspec {

/// Spectral density convolved with a unit-mass Gaussian of width sigma,
/// sampled on `grid`.
struct SmoothedDensity {
  std::vector<double> grid;
  std::vector<double> values;
  double sigma = 0.0;
  int max_period = 0;  // 2 * k_max for the orbit side, 0 for the spectrum side
};

/// Truncated trace formula
///   d(lambda) = L/(2 pi) + (1/pi) sum_p (l_p / r_p) A_p cos(lambda l_p)
/// over all periodic orbits with half-period k <= k_max, each oscillatory term
/// damped by exp(-sigma^2 l_p^2 / 2).  Orbits sharing a letter multiset share
/// l_p = 2 sum l_letter and are summed first.  Throws std::length_error when
/// sum_k v^k exceeds `max_words`.
SmoothedDensity density_from_orbits(const StarGraph& graph, std::span<const double> grid, double sigma,
                                    int k_max, double max_words = 5e7);

/// sum_n N(lambda - lambda_n; sigma).  Grid points must lie in
/// (0, lambda_max - 5 sigma].
SmoothedDensity density_from_spectrum(const Spectrum& spectrum, std::span<const double> grid,
                                      double sigma);

/// ||a - b|| / ||b|| in L2 over the common grid (trapezoid weights).
double relative_l2_distance(const SmoothedDensity& a, const SmoothedDensity& b);

/// Trapezoid integral of a sampled density.
double integrate(const SmoothedDensity& density);

/// Evenly spaced grid lo, lo + step, ..., up to hi inclusive (within step/2).
std::vector<double> uniform_grid(double lo, double hi, double step);

}  // namespace starspec
