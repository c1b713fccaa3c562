#pragma once

#include "starspec/graph.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace starspec {

/// Sorted positive eigenvalues of one graph realisation in (lambda_min, lambda_max].
struct Spectrum {
  std::vector<double> eigenvalues;
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  // Provenance of the generating graph.
  int graph_v = 0;
  std::uint64_t graph_seed = 0;
  double total_length = 0.0;
};

/// det(I - exp(-i lambda L) S) over the 2v directed edges.  O(v^3); kept as an
/// independent check on the scalar secular function below.
std::complex<double> secular_det(const StarGraph& graph, double lambda);

/// sum_i tan(lambda * l_i).  Returns std::nullopt when lambda lies within
/// `pole_tolerance` of a pole pi (n + 1/2) / l_i.
std::optional<double> secular_tan(const StarGraph& graph, double lambda,
                                  double pole_tolerance = 1e-12);

struct SolverOptions {
  double tolerance = 1e-12;  // absolute, in lambda
  int max_iterations = 200;  // bisection steps per bracket
};

/// Thrown by solve_spectrum when some brackets did not converge.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<std::pair<double, double>> brackets)
      : std::runtime_error(what), brackets_(std::move(brackets)) {}
  const std::vector<std::pair<double, double>>& brackets() const { return brackets_; }

 private:
  std::vector<std::pair<double, double>> brackets_;
};

/// All eigenvalues in (0, lambda_max].  The poles pi (n + 1/2) / l_i split the
/// axis into intervals on which sum tan is strictly increasing from -inf to
/// +inf, so every interval after the first holds exactly one root.  Roots are
/// bracketed by bisection and polished by safeguarded Newton steps.
Spectrum solve_spectrum(const StarGraph& graph, double lambda_max, SolverOptions options = {});

/// Eigenvalues in the window (lambda_min, lambda_max] only; the cost scales
/// with the window, not with lambda_max.
Spectrum solve_spectrum(const StarGraph& graph, double lambda_min, double lambda_max,
                        SolverOptions options = {});

}  // namespace starspec
