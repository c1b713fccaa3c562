#include "starspec/empirical.hpp"

#include "starspec/graph.hpp"
#include "starspec/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>

namespace starspec {

namespace {

constexpr double kEdgeTrim = 5.0;      // kernel widths dropped at each window edge
constexpr double kReach = 8.0;         // Gaussian evaluated within this many widths
constexpr double kPairBand = 3.0;      // "pairs" counts contributions within this many widths
constexpr long long kSparsePairs = 10000;

struct Prepared {
  std::vector<double> levels;  // after edge trimming
  std::size_t ref_begin = 0;
  std::size_t ref_end = 0;
  double density = 0.0;
};

Prepared prepare(const LevelWindow& sample, double max_offset, double width) {
  if (!(sample.hi > sample.lo)) throw std::invalid_argument("level window is empty");
  const double lo = sample.lo + kEdgeTrim * width;
  const double hi = sample.hi - kEdgeTrim * width;
  Prepared p;
  for (double e : sample.levels) {
    if (e >= lo && e <= hi) p.levels.push_back(e);
  }
  std::sort(p.levels.begin(), p.levels.end());
  const double margin = max_offset + kReach * width;
  const auto first = std::lower_bound(p.levels.begin(), p.levels.end(), lo + margin);
  const auto last = std::upper_bound(p.levels.begin(), p.levels.end(), hi - margin);
  p.ref_begin = static_cast<std::size_t>(first - p.levels.begin());
  p.ref_end = std::max(p.ref_begin, static_cast<std::size_t>(last - p.levels.begin()));
  if (p.ref_end == p.ref_begin) {
    throw std::invalid_argument("level window too short for the requested grid and kernel width");
  }
  p.density = static_cast<double>(p.levels.size()) / (hi - lo);
  return p;
}

// Signed distances e_ref - e_j of all other levels within `reach`.
void neighbours(const Prepared& p, std::size_t ref, double reach, std::vector<double>& out) {
  out.clear();
  const double e = p.levels[ref];
  auto j = static_cast<std::size_t>(std::lower_bound(p.levels.begin(), p.levels.end(), e - reach) -
                                    p.levels.begin());
  for (; j < p.levels.size() && p.levels[j] <= e + reach; ++j) {
    if (j != ref) out.push_back(e - p.levels[j]);
  }
}

struct Gaussian {
  double width;
  double norm;
  explicit Gaussian(double w) : width(w), norm(1.0 / (w * std::sqrt(2.0 * std::numbers::pi))) {}
  double operator()(double z) const {
    if (std::abs(z) > kReach * width) return 0.0;
    const double u = z / width;
    return norm * std::exp(-0.5 * u * u);
  }
};

void aggregate(const std::vector<std::vector<double>>& per_sample, CorrelationEstimate& out) {
  const std::size_t points = out.x.size();
  const auto n = static_cast<double>(per_sample.size());
  out.values.assign(points, 0.0);
  out.std_error.assign(points, 0.0);
  for (std::size_t g = 0; g < points; ++g) {
    double mean = 0.0;
    for (const auto& s : per_sample) mean += s[g];
    mean /= n;
    double var = 0.0;
    for (const auto& s : per_sample) var += (s[g] - mean) * (s[g] - mean);
    out.values[g] = mean;
    out.std_error[g] = per_sample.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
  }
  if (per_sample.size() < 2) out.warnings.push_back("single sample: standard errors are reported as 0");
  long long fewest = -1;
  std::size_t sparse = 0;
  for (long long c : out.pairs) {
    if (c < kSparsePairs) ++sparse;
    if (fewest < 0 || c < fewest) fewest = c;
  }
  if (sparse > 0) {
    out.warnings.push_back(std::to_string(sparse) + " grid point(s) have fewer than " +
                           std::to_string(kSparsePairs) + " contributing pairs (fewest: " +
                           std::to_string(fewest) + ")");
  }
}

nlohmann::ordered_json estimator_metadata(const char* name, std::span<const LevelWindow> samples,
                                          double width) {
  std::size_t levels = 0;
  for (const auto& s : samples) levels += s.levels.size();
  return {
      {"estimator", name},
      {"kernel", "gaussian"},
      {"kernel_width", width},
      {"edge_trim_widths", kEdgeTrim},
      {"reference_margin_widths", kReach},
      {"pair_band_widths", kPairBand},
      {"samples", samples.size()},
      {"levels", levels},
  };
}

void check_width(double width) {
  if (!(width > 0.0)) throw std::invalid_argument("kernel width must be positive");
}

std::string with_config(const std::string& estimator_meta, const EnsembleConfig& config) {
  auto meta = nlohmann::ordered_json::parse(estimator_meta);
  meta["ensemble"] = nlohmann::ordered_json::parse(to_json(config));
  return meta.dump(2);
}

}  // namespace

void EnsembleConfig::validate() const {
  if (v < 1) throw std::invalid_argument("ensemble: v must be >= 1");
  if (realizations < 1) throw std::invalid_argument("ensemble: realizations must be >= 1");
  if (!(lambda_max > 0.0)) throw std::invalid_argument("ensemble: lambda_max must be positive");
  if (!(lambda_min >= 0.0 && lambda_min < lambda_max)) {
    throw std::invalid_argument("ensemble: lambda_min must lie in [0, lambda_max)");
  }
  if (!(kernel_width > 0.0)) throw std::invalid_argument("ensemble: kernel_width must be positive");
}

std::string to_json(const EnsembleConfig& config) {
  nlohmann::ordered_json j = {
      {"v", config.v},
      {"realizations", config.realizations},
      {"lambda_max", config.lambda_max},
      {"lambda_min", config.lambda_min},
      {"seed", config.seed},
      {"kernel_width", config.kernel_width},
      {"unfolding", "lambda * L / (2 pi)"},
      {"sub_seeds", "splitmix64(seed, index)"},
  };
  return j.dump(2);
}

std::vector<double> unfold(const Spectrum& spectrum) {
  const double scale = spectrum.total_length / (2.0 * std::numbers::pi);
  std::vector<double> out(spectrum.eigenvalues.size());
  std::transform(spectrum.eigenvalues.begin(), spectrum.eigenvalues.end(), out.begin(),
                 [&](double e) { return e * scale; });
  return out;
}

LevelWindow unfolded_window(const Spectrum& spectrum) {
  const double scale = spectrum.total_length / (2.0 * std::numbers::pi);
  return {unfold(spectrum), spectrum.lambda_min * scale, spectrum.lambda_max * scale};
}

std::uint64_t realization_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<LevelWindow> star_ensemble(const EnsembleConfig& config) {
  config.validate();
  std::vector<LevelWindow> out(static_cast<std::size_t>(config.realizations));
  parallel_for(out.size(), [&](std::size_t i) {
    const auto graph = build_graph(config.v, realization_seed(config.seed, i));
    out[i] = unfolded_window(solve_spectrum(graph, config.lambda_min, config.lambda_max));
  });
  return out;
}

LevelWindow poisson_levels(double rate, double length, std::uint64_t seed) {
  if (!(rate > 0.0) || !(length > 0.0)) throw std::invalid_argument("rate and length must be positive");
  std::mt19937_64 rng(seed);
  std::poisson_distribution<long> count(rate * length);
  std::uniform_real_distribution<double> pos(0.0, length);
  LevelWindow w{{}, 0.0, length};
  w.levels.resize(static_cast<std::size_t>(count(rng)));
  for (auto& e : w.levels) e = pos(rng);
  std::sort(w.levels.begin(), w.levels.end());
  return w;
}

LevelWindow picket_fence_levels(double length, std::uint64_t seed) {
  if (!(length > 1.0)) throw std::invalid_argument("length must exceed 1");
  std::mt19937_64 rng(seed);
  const double shift = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  LevelWindow w{{}, 0.0, length};
  for (double e = shift; e <= length; e += 1.0) w.levels.push_back(e);
  return w;
}

CorrelationEstimate estimate_r2(std::span<const LevelWindow> samples, std::span<const double> x_grid,
                                double kernel_width) {
  check_width(kernel_width);
  if (samples.empty()) throw std::invalid_argument("no samples");
  if (x_grid.empty()) throw std::invalid_argument("empty grid");
  double max_offset = 0.0;
  for (double x : x_grid) max_offset = std::max(max_offset, std::abs(x));

  const Gaussian kernel(kernel_width);
  const std::size_t points = x_grid.size();
  std::vector<std::vector<double>> per_sample(samples.size());
  std::vector<std::vector<long long>> counts(samples.size());
  parallel_for(samples.size(), [&](std::size_t s) {
    const Prepared p = prepare(samples[s], max_offset, kernel_width);
    std::vector<double> sums(points, 0.0);
    std::vector<long long> pairs(points, 0);
    std::vector<double> diffs;
    for (std::size_t r = p.ref_begin; r < p.ref_end; ++r) {
      neighbours(p, r, max_offset + kReach * kernel_width, diffs);
      for (std::size_t g = 0; g < points; ++g) {
        for (double d : diffs) {
          sums[g] += kernel(d - x_grid[g]);
          if (std::abs(d - x_grid[g]) <= kPairBand * kernel_width) ++pairs[g];
        }
      }
    }
    const double refs = static_cast<double>(p.ref_end - p.ref_begin);
    for (auto& v : sums) v /= refs * p.density;
    per_sample[s] = std::move(sums);
    counts[s] = std::move(pairs);
  });

  CorrelationEstimate out;
  out.x.assign(x_grid.begin(), x_grid.end());
  out.pairs.assign(points, 0);
  for (const auto& c : counts) {
    for (std::size_t g = 0; g < points; ++g) out.pairs[g] += c[g];
  }
  aggregate(per_sample, out);
  out.metadata = estimator_metadata("r2", samples, kernel_width).dump(2);
  return out;
}

CorrelationEstimate estimate_r3(std::span<const LevelWindow> samples,
                                std::span<const std::pair<double, double>> xy_grid, double kernel_width) {
  check_width(kernel_width);
  if (samples.empty()) throw std::invalid_argument("no samples");
  if (xy_grid.empty()) throw std::invalid_argument("empty grid");

  // The six relabellings of a triple seen from each of its members.
  using Point = std::pair<double, double>;
  std::vector<std::vector<Point>> images(xy_grid.size());
  std::vector<double> offsets;
  for (std::size_t g = 0; g < xy_grid.size(); ++g) {
    const auto [x, y] = xy_grid[g];
    images[g] = {{x, y}, {y, x}, {-x, y - x}, {y - x, -x}, {-y, x - y}, {x - y, -y}};
    std::sort(images[g].begin(), images[g].end());
    for (const auto& [a, b] : images[g]) {
      offsets.push_back(a);
      offsets.push_back(b);
    }
  }
  std::sort(offsets.begin(), offsets.end());
  offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
  const auto index_of = [&](double o) {
    return static_cast<std::size_t>(std::lower_bound(offsets.begin(), offsets.end(), o) - offsets.begin());
  };

  // Unordered offset pairs actually needed, and each image's slot among them.
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> slot_of;
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  std::vector<std::vector<std::size_t>> image_slots(xy_grid.size());
  for (std::size_t g = 0; g < xy_grid.size(); ++g) {
    for (const auto& [a, b] : images[g]) {
      const auto key = std::minmax({index_of(a), index_of(b)});
      auto [it, fresh] = slot_of.try_emplace({key.first, key.second}, slots.size());
      if (fresh) slots.emplace_back(key.first, key.second);
      image_slots[g].push_back(it->second);
    }
  }
  const double max_offset = std::max(std::abs(offsets.front()), std::abs(offsets.back()));
  const double overlap = 2.0 * kReach * kernel_width;

  const Gaussian kernel(kernel_width);
  const std::size_t n_off = offsets.size();
  std::vector<std::vector<double>> per_sample(samples.size());
  std::vector<std::vector<long long>> counts(samples.size());
  parallel_for(samples.size(), [&](std::size_t s) {
    const Prepared p = prepare(samples[s], max_offset, kernel_width);
    std::vector<double> slot_sums(slots.size(), 0.0);
    std::vector<long long> slot_pairs(slots.size(), 0);
    std::vector<double> diffs;
    std::vector<double> table;
    std::vector<double> dens(n_off);
    std::vector<long long> near(n_off);
    std::vector<std::vector<char>> in_band(n_off);
    for (std::size_t r = p.ref_begin; r < p.ref_end; ++r) {
      neighbours(p, r, max_offset + kReach * kernel_width, diffs);
      const std::size_t m = diffs.size();
      table.assign(n_off * m, 0.0);
      for (std::size_t o = 0; o < n_off; ++o) {
        double sum = 0.0;
        long long c = 0;
        in_band[o].assign(m, 0);
        for (std::size_t j = 0; j < m; ++j) {
          const double g = kernel(diffs[j] - offsets[o]);
          table[o * m + j] = g;
          sum += g;
          if (std::abs(diffs[j] - offsets[o]) <= kPairBand * kernel_width) {
            in_band[o][j] = 1;
            ++c;
          }
        }
        dens[o] = sum;
        near[o] = c;
      }
      for (std::size_t k = 0; k < slots.size(); ++k) {
        const auto [a, b] = slots[k];
        double value = dens[a] * dens[b];
        long long c = near[a] * near[b];
        // Remove the a == b terms: the two partners of the reference must be
        // distinct levels.
        if (offsets[b] - offsets[a] <= overlap) {
          for (std::size_t j = 0; j < m; ++j) {
            value -= table[a * m + j] * table[b * m + j];
            c -= in_band[a][j] & in_band[b][j];
          }
        }
        slot_sums[k] += value;
        slot_pairs[k] += c;
      }
    }
    const double norm = static_cast<double>(p.ref_end - p.ref_begin) * p.density * p.density;
    std::vector<double> values(xy_grid.size());
    std::vector<long long> pairs(xy_grid.size(), 0);
    for (std::size_t g = 0; g < xy_grid.size(); ++g) {
      double sum = 0.0;
      for (std::size_t k : image_slots[g]) {
        sum += slot_sums[k];
        pairs[g] += slot_pairs[k];
      }
      values[g] = sum / (6.0 * norm);
    }
    per_sample[s] = std::move(values);
    counts[s] = std::move(pairs);
  });

  CorrelationEstimate out;
  for (const auto& [x, y] : xy_grid) {
    out.x.push_back(x);
    out.y.push_back(y);
  }
  out.pairs.assign(xy_grid.size(), 0);
  for (const auto& c : counts) {
    for (std::size_t g = 0; g < xy_grid.size(); ++g) out.pairs[g] += c[g];
  }
  aggregate(per_sample, out);
  out.metadata = estimator_metadata("r3", samples, kernel_width).dump(2);
  return out;
}

CorrelationEstimate estimate_r2(const EnsembleConfig& config) {
  const auto samples = star_ensemble(config);
  auto out = estimate_r2(samples, config.x_grid, config.kernel_width);
  out.metadata = with_config(out.metadata, config);
  return out;
}

CorrelationEstimate estimate_r3(const EnsembleConfig& config) {
  const auto samples = star_ensemble(config);
  auto out = estimate_r3(samples, config.xy_grid, config.kernel_width);
  out.metadata = with_config(out.metadata, config);
  return out;
}

}  // namespace starspec
