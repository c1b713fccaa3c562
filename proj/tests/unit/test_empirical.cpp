#include "starspec/empirical.hpp"

#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>
#include <set>

using namespace starspec;

namespace {

std::vector<LevelWindow> poisson_sample(int n, double length, std::uint64_t seed) {
  std::vector<LevelWindow> out;
  for (int i = 0; i < n; ++i) out.push_back(poisson_levels(1.0, length, realization_seed(seed, i)));
  return out;
}

}  // namespace

TEST_CASE("unfolding") {
  Spectrum s;
  s.eigenvalues = {std::numbers::pi, 2 * std::numbers::pi, 3 * std::numbers::pi};
  s.total_length = 2.0;
  s.lambda_max = 4 * std::numbers::pi;
  const auto u = unfold(s);
  REQUIRE(u.size() == 3);
  CHECK(u[0] == doctest::Approx(1.0));
  CHECK(u[1] == doctest::Approx(2.0));
  CHECK(u[2] == doctest::Approx(3.0));
  const auto w = unfolded_window(s);
  CHECK(w.lo == 0.0);
  CHECK(w.hi == doctest::Approx(4.0));
}

TEST_CASE("unfolded star spectra have unit mean spacing") {
  EnsembleConfig c;
  c.v = 20;
  c.realizations = 4;
  c.lambda_max = 100.0;
  for (const auto& w : star_ensemble(c)) {
    const double density = static_cast<double>(w.levels.size()) / (w.hi - w.lo);
    CHECK(density == doctest::Approx(1.0).epsilon(0.03));
  }
}

TEST_CASE("ensemble spectral window") {
  EnsembleConfig c;
  c.v = 10;
  c.realizations = 2;
  c.lambda_min = 200.0;
  c.lambda_max = 260.0;
  for (const auto& w : star_ensemble(c)) {
    REQUIRE(!w.levels.empty());
    CHECK(w.levels.front() >= w.lo);
    CHECK(w.levels.back() <= w.hi);
    const double density = static_cast<double>(w.levels.size()) / (w.hi - w.lo);
    CHECK(density == doctest::Approx(1.0).epsilon(0.05));
  }
  c.lambda_min = 300.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("sub-seeds are distinct and reproducible") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(realization_seed(7, i));
  CHECK(seen.size() == 1000);
  CHECK(realization_seed(7, 3) == realization_seed(7, 3));
  CHECK(realization_seed(7, 3) != realization_seed(8, 3));
}

TEST_CASE("ensemble configuration") {
  EnsembleConfig c;
  CHECK_NOTHROW(c.validate());
  c.kernel_width = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = EnsembleConfig{};
  c.realizations = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  const auto j = nlohmann::json::parse(to_json(EnsembleConfig{}));
  CHECK(j.at("v") == 100);
  CHECK(j.at("kernel_width") == 0.08);
}

TEST_CASE("Poisson levels are uncorrelated") {
  const auto samples = poisson_sample(20, 2000.0, 3);
  const std::vector<double> grid{0.25, 0.5, 1.0, 1.5, 2.0};
  const auto r2 = estimate_r2(samples, grid, 0.08);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    CAPTURE(grid[g]);
    CHECK(std::abs(r2.values[g] - 1.0) < 3.0 * r2.std_error[g]);
  }
  const std::vector<std::pair<double, double>> xy{{0.5, 1.0}, {1.0, 0.5}, {0.75, 1.5}};
  const auto r3 = estimate_r3(samples, xy, 0.15);
  for (std::size_t g = 0; g < xy.size(); ++g) CHECK(std::abs(r3.values[g] - 1.0) < 3.0 * r3.std_error[g]);
}

TEST_CASE("picket fence shows lattice peaks") {
  std::vector<LevelWindow> samples;
  for (int i = 0; i < 4; ++i) samples.push_back(picket_fence_levels(400.0, realization_seed(1, i)));
  const std::vector<double> grid{0.0, 0.5, 1.0, 2.0};
  const auto r2 = estimate_r2(samples, grid, 0.05);
  const double peak = 1.0 / (0.05 * std::sqrt(2.0 * std::numbers::pi));
  CHECK(r2.values[0] < 1e-6);
  CHECK(r2.values[1] < 1e-6);
  CHECK(r2.values[2] == doctest::Approx(peak).epsilon(0.02));
  CHECK(r2.values[3] == doctest::Approx(peak).epsilon(0.02));
}

TEST_CASE("three-point estimate is symmetric under exchange") {
  const auto samples = poisson_sample(3, 500.0, 9);
  const std::vector<std::pair<double, double>> xy{{0.3, 1.1}, {1.1, 0.3}, {-0.4, 0.8}, {0.8, -0.4}};
  const auto r3 = estimate_r3(samples, xy, 0.1);
  CHECK(r3.values[0] == r3.values[1]);
  CHECK(r3.values[2] == r3.values[3]);
}

TEST_CASE("standard error shrinks with more samples") {
  const std::vector<double> grid{1.0};
  const auto few = estimate_r2(poisson_sample(10, 1000.0, 5), grid, 0.1);
  const auto many = estimate_r2(poisson_sample(40, 1000.0, 5), grid, 0.1);
  const double ratio = few.std_error[0] / many.std_error[0];
  CHECK(ratio > 1.4);
  CHECK(ratio < 2.8);
}

TEST_CASE("levels outside the window are ignored") {
  auto samples = poisson_sample(2, 300.0, 11);
  const std::vector<double> grid{0.5, 1.0};
  const auto before = estimate_r2(samples, grid, 0.1);
  for (auto& s : samples) {
    s.levels.insert(s.levels.begin(), -0.5);
    s.levels.push_back(s.hi + 0.25);
  }
  const auto after = estimate_r2(samples, grid, 0.1);
  CHECK(before.values == after.values);
}

TEST_CASE("estimator refusals and diagnostics") {
  const auto tiny = poisson_sample(2, 2.0, 1);
  const std::vector<double> grid{1.0};
  CHECK_THROWS_AS(estimate_r2(tiny, grid, 0.1), std::invalid_argument);
  const auto samples = poisson_sample(1, 200.0, 1);
  CHECK_THROWS_AS(estimate_r2(samples, grid, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(estimate_r2(samples, std::vector<double>{}, 0.1), std::invalid_argument);
  const auto single = estimate_r2(samples, grid, 0.1);
  CHECK(single.std_error[0] == 0.0);
  CHECK(single.warnings.size() == 2);  // single sample, and too few pairs
  const auto meta = nlohmann::json::parse(single.metadata);
  CHECK(meta.at("kernel_width") == 0.1);
  CHECK(meta.at("samples") == 1);
}
