#pragma once

#include "starspec/spectrum.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace starspec {

struct EnsembleConfig {
  int v = 100;
  int realizations = 200;
  double lambda_max = 400.0;
  double lambda_min = 0.0;  // start of the spectral window; 0 keeps the whole spectrum
  std::uint64_t seed = 1;
  double kernel_width = 0.08;  // Gaussian sigma, in mean spacings
  std::vector<double> x_grid;
  std::vector<std::pair<double, double>> xy_grid;

  /// Throws std::invalid_argument on v < 1, realizations < 1,
  /// lambda_max <= 0, lambda_min outside [0, lambda_max) or kernel_width <= 0.
  void validate() const;
};

/// One row per grid point.  For two-point estimates `y` is empty.
struct CorrelationEstimate {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> values;
  std::vector<double> std_error;   // across-realization scatter / sqrt(n)
  std::vector<long long> pairs;    // contributions within 3 kernel widths
  std::string metadata;            // JSON: configuration and estimator settings
  std::vector<std::string> warnings;
};

/// Sorted levels on a known window [lo, hi], in units of the mean spacing.
struct LevelWindow {
  std::vector<double> levels;
  double lo = 0.0;
  double hi = 0.0;
};

/// Eigenvalues times L / (2 pi), so that the mean spacing is 1.
std::vector<double> unfold(const Spectrum& spectrum);

/// unfold() plus the window [lambda_min, lambda_max] L / (2 pi).
LevelWindow unfolded_window(const Spectrum& spectrum);

/// SplitMix64 of (seed, index): the seed of realisation `index`.
std::uint64_t realization_seed(std::uint64_t seed, std::uint64_t index);

/// Solves `realizations` independent star graphs in parallel.
std::vector<LevelWindow> star_ensemble(const EnsembleConfig& config);

/// Homogeneous Poisson points of the given rate on [0, length].
LevelWindow poisson_levels(double rate, double length, std::uint64_t seed);

/// Integers shifted by one uniform offset in [0, 1), on [0, length].
LevelWindow picket_fence_levels(double length, std::uint64_t seed);

/// Two-point function from a set of level windows.
///
/// Levels closer than 5 kernel widths to a window edge are discarded.  A
/// reference level must sit far enough inside what remains that every grid
/// offset, plus 8 kernel widths, stays inside the window.  For each reference
/// the Gaussian-smoothed count of levels at signed distance x is divided by
/// the sample's level density, so Poisson input gives 1 at every rate.  The
/// estimate is the mean of per-sample values; std_error is their standard
/// deviation over sqrt(samples).
CorrelationEstimate estimate_r2(std::span<const LevelWindow> samples, std::span<const double> x_grid,
                                double kernel_width);

/// Three-point function at (x, y): smoothed count of ordered pairs of other
/// distinct levels at distances x and y from the reference, divided by the
/// squared density, averaged over the six relabellings of the triple so that
/// (x, y) and (y, x) give identical results.
CorrelationEstimate estimate_r3(std::span<const LevelWindow> samples,
                                std::span<const std::pair<double, double>> xy_grid, double kernel_width);

/// Ensemble versions: star_ensemble() followed by the estimator, with the
/// configuration echoed into the metadata.
CorrelationEstimate estimate_r2(const EnsembleConfig& config);
CorrelationEstimate estimate_r3(const EnsembleConfig& config);

/// Echo of the configuration as a JSON object string.
std::string to_json(const EnsembleConfig& config);

}  // namespace starspec
