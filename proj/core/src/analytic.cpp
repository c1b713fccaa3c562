#include "starspec/analytic.hpp"

#include "starspec/parallel.hpp"
#include "starspec/quadrature.hpp"
#include "starspec/series.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace starspec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// (4^j / j!) C_M as doubles, indexed [j][M].
const std::vector<std::vector<double>>& k_series_table(int j_max, int m_max) {
  static std::map<std::pair<int, int>, std::vector<std::vector<double>>> cache;
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  if (auto it = cache.find({j_max, m_max}); it != cache.end()) return it->second;
  std::vector<std::vector<double>> table(static_cast<std::size_t>(std::max(j_max, 1) + 1));
  for (int j = 2; j <= j_max; ++j) {
    const Rational pre(BigInt(1) << (2 * j), factorial(j));
    for (const auto& c : c_coefficients(j, m_max)) table[static_cast<std::size_t>(j)].push_back(to_double(pre * c));
  }
  return cache.emplace(std::make_pair(j_max, m_max), std::move(table)).first->second;
}

double f2_with(double tau, double tau_p, const QuadratureRule& unit) {
  const double s = tau + tau_p;
  double bracket = bessel_ratio(tau * tau_p);
  if (tau_p > 0.0) {
    const double a = tau_p * unit.integrate([&](double u) {
      const double q = tau_p * u;
      return bessel_ratio(q * (s - q)) * bessel_ratio(q * (tau_p - q));
    });
    bracket += 8.0 * tau_p * a;
  }
  if (tau > 0.0) {
    const double b = tau * unit.integrate([&](double u) {
      const double q = tau * u;
      return bessel_ratio(q * (s - q)) * bessel_ratio(q * (tau - q));
    });
    bracket += 8.0 * tau * b;
  }
  if (tau > 0.0 && tau_p > 0.0) {
    const std::size_t n = unit.size();
    std::vector<double> inner_a(n), inner_b(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double q = tau * unit.nodes[i];
      const double qp = tau_p * unit.nodes[i];
      inner_a[i] = unit.weights[i] * bessel_ratio(q * (tau - q));
      inner_b[i] = unit.weights[i] * bessel_ratio(qp * (tau_p - qp));
    }
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double q = tau * unit.nodes[i];
      double row = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double sum = q + tau_p * unit.nodes[k];
        row += inner_b[k] * bessel_ratio(sum * (s - sum));
      }
      c += inner_a[i] * row;
    }
    bracket += 8.0 * tau * tau_p * (tau * tau_p * c);
  }
  return std::exp(-4.0 * s) * s * bracket;
}

struct PowerTable {
  std::vector<double> x;
  std::vector<double> y;
  PowerTable(double a, double b, int degree) : x(static_cast<std::size_t>(degree + 1)), y(x.size()) {
    x[0] = y[0] = 1.0;
    for (std::size_t d = 1; d < x.size(); ++d) {
      x[d] = x[d - 1] * a;
      y[d] = y[d - 1] * b;
    }
  }
};

int max_degree(const std::vector<std::vector<Monomial>>& blocks) {
  int deg = 0;
  for (const auto& blk : blocks) {
    for (const auto& m : blk) deg = std::max({deg, m.a, m.b});
  }
  return deg;
}

double f3_series(double tau, double tau_p, const KernelSeries& series) {
  const PowerTable p(tau, tau_p, max_degree(series.f3));
  double sum = 0.0;
  for (const auto& blk : series.f3) {
    for (const auto& m : blk) {
      sum += m.value * p.x[static_cast<std::size_t>(m.a)] * p.y[static_cast<std::size_t>(m.b)];
    }
  }
  return (tau + tau_p) * sum;
}

double f4_series(double tau, double tau_p, const KernelSeries& series) {
  const PowerTable p(tau, tau_p, max_degree(series.f4));
  const double e = std::exp(-2.0 * tau);
  const double ep = std::exp(-2.0 * tau_p);
  double sum = 0.0;
  for (const auto& blk : series.f4) {
    for (const auto& m : blk) {
      const auto a = static_cast<std::size_t>(m.a);
      const auto b = static_cast<std::size_t>(m.b);
      sum += m.value * (p.y[a] * p.x[b] * e + p.x[a] * p.y[b] * ep);
    }
  }
  return (tau + tau_p) * sum;
}

void check_series_domain(double tau, double tau_p) {
  if (!(tau >= 0.0 && tau <= 1.0 && tau_p >= 0.0 && tau_p <= 1.0)) {
    throw std::domain_error("j >= 3 kernel series evaluated outside [0, 1]^2");
  }
}

void check_nonnegative(double tau, double tau_p) {
  if (!(tau >= 0.0 && tau_p >= 0.0)) throw std::domain_error("kernel arguments must be >= 0");
}

}  // namespace

void Truncation::validate() const {
  if (j_max < 1 || m_max < 1 || k_m_max < 1 || quad_points < 2) {
    throw std::invalid_argument("truncation: j_max, m_max, k_m_max >= 1 and quad_points >= 2 required");
  }
  if (!(tau_cutoff >= 3.0)) throw std::invalid_argument("truncation: tau_cutoff must be >= 3");
  if (!(series_radius > 0.0 && series_radius <= tau_cutoff)) {
    throw std::invalid_argument("truncation: series_radius must lie in (0, tau_cutoff]");
  }
}

std::string to_json(const Truncation& trunc) {
  const nlohmann::ordered_json j = {
      {"j_max", trunc.j_max},
      {"m_max", trunc.m_max},
      {"k_m_max", trunc.k_m_max},
      {"quad_points", trunc.quad_points},
      {"tau_cutoff", trunc.tau_cutoff},
      {"series_radius", trunc.series_radius},
  };
  return j.dump(2);
}

Truncation truncation_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  Truncation t;
  t.j_max = j.value("j_max", t.j_max);
  t.m_max = j.value("m_max", t.m_max);
  t.k_m_max = j.value("k_m_max", t.k_m_max);
  t.quad_points = j.value("quad_points", t.quad_points);
  t.tau_cutoff = j.value("tau_cutoff", t.tau_cutoff);
  t.series_radius = j.value("series_radius", t.series_radius);
  t.validate();
  return t;
}

double bessel_ratio(double x) {
  if (!(x >= 0.0)) throw std::domain_error("bessel_ratio needs x >= 0");
  const double z = 4.0 * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 1000; ++k) {
    term *= z / (static_cast<double>(k) * (k + 1));
    sum += term;
    if (term <= 1e-17 * sum && k * (k + 1.0) > z) break;
  }
  return 2.0 * sum;
}

Rational c_coeff(int j, int M) {
  if (M < 0) throw std::invalid_argument("C_M needs M >= 0");
  return c_coefficients(j, M).back();
}

double k_formfactor(double tau, const Truncation& trunc) {
  if (!(tau >= 0.0 && tau <= 0.5)) throw std::domain_error("K(tau) series used outside [0, 0.5]");
  const auto& table = k_series_table(trunc.j_max, trunc.k_m_max);
  double series = 0.0;
  for (int j = 2; j <= trunc.j_max; ++j) {
    const auto& row = table[static_cast<std::size_t>(j)];
    // Horner in tau over M, then the common tau^(j+1).
    double poly = 0.0;
    for (auto it = row.rbegin(); it != row.rend(); ++it) poly = poly * tau + *it;
    series += poly * std::pow(tau, j + 1);
  }
  return std::exp(-4.0 * tau) + series;
}

double r2_transform(double x, const std::function<double(double)>& form_factor, double tau_max,
                    int quad_points) {
  const auto rule = composite_gauss_legendre(quad_points, 0.0, tau_max);
  // K is even in tau, so the transform is twice the cosine integral over [0, tau_max].
  return 1.0 + 2.0 * rule.integrate([&](double t) { return form_factor(t) * std::cos(kTwoPi * x * t); });
}

double r2_analytic(double x, const Truncation& trunc) {
  return r2_transform(x, [&](double t) { return k_formfactor(t, trunc); }, std::min(0.5, trunc.tau_cutoff),
                      trunc.quad_points);
}

double f1(double tau, double tau_p) { return 2.0 * std::exp(-4.0 * tau) * std::exp(-4.0 * tau_p); }

double f2(double tau, double tau_p, const Truncation& trunc) {
  check_nonnegative(tau, tau_p);
  const auto fine = composite_gauss_legendre(trunc.quad_points, 0.0, 1.0);
  const auto coarse = composite_gauss_legendre(std::max(1, trunc.quad_points / 2), 0.0, 1.0);
  const double value = f2_with(tau, tau_p, fine);
  const double check = f2_with(tau, tau_p, coarse);
  if (std::abs(value - check) > 1e-8) {
    throw QuadratureError("f2 quadrature not converged at (" + std::to_string(tau) + ", " +
                          std::to_string(tau_p) + "): refinement changed the value by " +
                          std::to_string(std::abs(value - check)));
  }
  return value;
}

double f3(double tau, double tau_p, const Truncation& trunc) {
  check_series_domain(tau, tau_p);
  return f3_series(tau, tau_p, kernel_series(trunc.j_max, trunc.m_max));
}

double f4(double tau, double tau_p, const Truncation& trunc) {
  check_series_domain(tau, tau_p);
  return f4_series(tau, tau_p, kernel_series(trunc.j_max, trunc.m_max));
}

KernelValue f_components(double tau, double tau_p, const Truncation& trunc) {
  return {f1(tau, tau_p), f2(tau, tau_p, trunc), f3(tau, tau_p, trunc), f4(tau, tau_p, trunc)};
}

double f_total(double tau, double tau_p, const Truncation& trunc) {
  return f_components(tau, tau_p, trunc).total();
}

double f_expansion(double tau, double tau_p) {
  return 2.0 - 6.0 * tau - 6.0 * tau_p + 16.0 * tau * tau_p + 8.0 * tau * tau + 8.0 * tau_p * tau_p;
}

Kernel3 zero_kernel(const Truncation& trunc) {
  trunc.validate();
  Kernel3 k;
  k.trunc = trunc;
  const std::array<double, 3> cuts{0.0, trunc.series_radius, trunc.tau_cutoff};
  const auto rule = piecewise_rule(cuts, trunc.quad_points);
  k.nodes = rule.nodes;
  k.weights = rule.weights;
  k.values.assign(k.nodes.size() * k.nodes.size(), KernelValue{});
  return k;
}

Kernel3 tabulate_kernel(const Truncation& trunc) {
  Kernel3 k = zero_kernel(trunc);
  const auto& series = kernel_series(trunc.j_max, trunc.m_max);
  const auto fine = composite_gauss_legendre(trunc.quad_points, 0.0, 1.0);
  const auto coarse = composite_gauss_legendre(std::max(1, trunc.quad_points / 2), 0.0, 1.0);
  const std::size_t n = k.size();
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t c = i; c < n; ++c) {
      const double a = k.nodes[i];
      const double b = k.nodes[c];
      KernelValue val;
      val.f1 = f1(a, b);
      val.f2 = f2_with(a, b, fine);
      if (std::abs(val.f2 - f2_with(a, b, coarse)) > 1e-8) {
        throw QuadratureError("f2 quadrature not converged at (" + std::to_string(a) + ", " +
                              std::to_string(b) + "); increase quad_points");
      }
      if (a <= trunc.series_radius && b <= trunc.series_radius) {
        val.f3 = f3_series(a, b, series);
        val.f4 = f4_series(a, b, series);
      }
      k.values[i * n + c] = val;
      k.values[c * n + i] = val;
    }
  });
  return k;
}

double r3_connected(double x, double y, const Kernel3& kernel) {
  const std::size_t n = kernel.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = kernel.nodes[i];
    double row = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      const double tp = kernel.nodes[c];
      const double cosines = std::cos(kTwoPi * (y * t + (y - x) * tp)) +
                             std::cos(kTwoPi * (y * tp - x * (t + tp))) +
                             std::cos(kTwoPi * (y * t + x * tp));
      row += kernel.weights[c] * cosines * kernel.at(i, c).total();
    }
    sum += kernel.weights[i] * row;
  }
  return sum;
}

double r3_connected(double x, double y, const Truncation& trunc) {
  return r3_connected(x, y, tabulate_kernel(trunc));
}

double r3_full(double x, double y, const Kernel3& kernel, const std::function<double(double)>& r2) {
  return r2(x) + r2(y) + r2(x - y) - 2.0 + r3_connected(x, y, kernel);
}

double r3_full(double x, double y, const Kernel3& kernel) {
  return r3_full(x, y, kernel, [&](double z) { return r2_analytic(z, kernel.trunc); });
}

double r3_full(double x, double y, const Truncation& trunc) { return r3_full(x, y, tabulate_kernel(trunc)); }

double dirichlet_moment(std::span<const int> exponents, double tau) {
  if (exponents.size() < 2) throw std::invalid_argument("dirichlet_moment needs j >= 2");
  BigInt num = 1;
  int total = 0;
  for (int m : exponents) {
    if (m < 0) throw std::invalid_argument("exponents must be >= 0");
    num *= factorial(m);
    total += m;
  }
  const int power = total + static_cast<int>(exponents.size()) - 1;
  return to_double(Rational(num, factorial(power))) * std::pow(tau, power);
}

}  // namespace starspec
