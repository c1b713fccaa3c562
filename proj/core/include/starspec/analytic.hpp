#pragma once

#include "starspec/combinatorics.hpp"

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace starspec {

/// Cut-offs for the infinite sums and integrals of the v -> infinity
/// correlation functions.
struct Truncation {
  int j_max = 6;            // distinct-edge count cut in K and in F3/F4
  int m_max = 8;            // degree excess per j-block in F3/F4
  // M cut in K.  The j-sum of K only converges on [0, 0.5] when the M-sum is
  // carried several times further than j, hence a separate, larger cut.
  int k_m_max = 32;
  int quad_points = 64;     // Gauss-Legendre nodes per axis and interval
  double tau_cutoff = 4.0;  // upper limit of the (tau, tau') transforms
  // F3 and F4 are power series that only converge near the origin; the
  // tabulated kernel includes them on [0, series_radius]^2 and drops them
  // outside.
  double series_radius = 0.15;

  /// Throws std::invalid_argument unless every field is positive and
  /// tau_cutoff >= 3, series_radius <= tau_cutoff.
  void validate() const;

  friend bool operator==(const Truncation&, const Truncation&) = default;
};

std::string to_json(const Truncation& trunc);
/// Missing keys keep their defaults; the result is validated.
Truncation truncation_from_json(const std::string& text);

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// I_1(4 sqrt x) / sqrt x = 2 sum_k (4x)^k / (k! (k+1)!), finite at x = 0.
double bessel_ratio(double x);

/// C_M of the two-point form factor at fixed j >= 2, exact.
Rational c_coeff(int j, int M);

/// K(tau) = exp(-4 tau) + sum_{j=2}^{j_max} sum_{M=0}^{k_m_max} (4^j / j!) C_M tau^(M+j+1).
/// The series is a small-tau expansion; throws std::domain_error outside
/// [0, 0.5].
double k_formfactor(double tau, const Truncation& trunc);

/// 1 + integral of form_factor(|tau|) cos(2 pi x tau) over |tau| <= tau_max.
double r2_transform(double x, const std::function<double(double)>& form_factor, double tau_max,
                    int quad_points);

/// r2_transform of k_formfactor over |tau| <= min(0.5, tau_cutoff).
double r2_analytic(double x, const Truncation& trunc);

double f1(double tau, double tau_p);

/// Degenerate-orbit (j <= 2) kernel: a closed one- and two-dimensional
/// integral over products of bessel_ratio.  The integrals are mapped to the
/// unit interval/square and evaluated with quad_points and quad_points / 2
/// nodes; a QuadratureError is thrown if the two disagree by more than 1e-8.
double f2(double tau, double tau_p, const Truncation& trunc);

/// j >= 3 kernel, generic decomposition.  Power series; tau, tau_p in [0, 1].
double f3(double tau, double tau_p, const Truncation& trunc);

/// j >= 3 kernel with one single-edge orbit.  Power series times e^{-2 tau};
/// tau, tau_p in [0, 1].
double f4(double tau, double tau_p, const Truncation& trunc);

struct KernelValue {
  double f1 = 0.0;
  double f2 = 0.0;
  double f3 = 0.0;
  double f4 = 0.0;
  double total() const { return f1 + f2 + f3 + f4; }
};

KernelValue f_components(double tau, double tau_p, const Truncation& trunc);
double f_total(double tau, double tau_p, const Truncation& trunc);

/// 2 - 6 tau - 6 tau' + 16 tau tau' + 8 tau^2 + 8 tau'^2.
double f_expansion(double tau, double tau_p);

/// F tabulated on a tensor Gauss-Legendre grid over [0, tau_cutoff]^2 with a
/// node break at series_radius.  Symmetric by construction.
struct Kernel3 {
  Truncation trunc;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<KernelValue> values;  // row-major, values[i * n + k] = F(nodes[i], nodes[k])

  std::size_t size() const { return nodes.size(); }
  const KernelValue& at(std::size_t i, std::size_t k) const { return values[i * nodes.size() + k]; }
};

Kernel3 tabulate_kernel(const Truncation& trunc);

/// Zero kernel on the same grid, the Poisson surrogate.
Kernel3 zero_kernel(const Truncation& trunc);

/// integral over [0, tau_cutoff]^2 of
///   [cos 2pi(y tau + (y-x) tau') + cos 2pi(y tau' - x(tau+tau')) + cos 2pi(y tau + x tau')] F.
double r3_connected(double x, double y, const Kernel3& kernel);
double r3_connected(double x, double y, const Truncation& trunc);

/// R2(x) + R2(y) + R2(x-y) - 2 + r3_connected(x, y).
double r3_full(double x, double y, const Kernel3& kernel, const std::function<double(double)>& r2);
double r3_full(double x, double y, const Kernel3& kernel);
double r3_full(double x, double y, const Truncation& trunc);

/// Integral over the simplex q_i >= 0, sum q_i = tau of prod q_i^{m_i}
///   = prod(m_i!) / (M + j - 1)! * tau^(M + j - 1),  j >= 2.
double dirichlet_moment(std::span<const int> exponents, double tau);

}  // namespace starspec
