#pragma once

#include "starspec/combinatorics.hpp"

#include <vector>

namespace starspec {

/// One term coeff * tau^a * tau'^b of a bivariate power series.
struct Monomial {
  int a = 0;
  int b = 0;
  Rational coeff;
  double value = 0.0;  // coeff rounded once
};

/// Exact coefficient tables of the j >= 3 kernel components, one block per j.
///
///   F3 = (tau + tau') sum_j sum_{(a,b)} c * tau^a tau'^b
///   F4 = (tau + tau') sum_j sum_{(a,b)} c * (tau'^a tau^b e^{-2 tau} + tau^a tau'^b e^{-2 tau'})
///
/// Block j of F3 collects every (t, t', t'', s) with T + T' + T'' - 3j <= excess;
/// block j of F4 every (t', t'', s) with T' + T'' - 2j <= excess.  Each block
/// thus holds complete homogeneous shells of total degree 2j .. 2j + excess
/// (F3) and j .. j + excess (F4), before the (tau + tau') factor.
struct KernelSeries {
  int j_max = 0;
  int excess = 0;
  std::vector<std::vector<Monomial>> f3;  // f3[j - 3]
  std::vector<std::vector<Monomial>> f4;  // f4[j - 3]
};

/// Built on first use and shared; thread safe.
const KernelSeries& kernel_series(int j_max, int excess);

/// C_M for M = 0..m_max at fixed j >= 2, exact.
std::vector<Rational> c_coefficients(int j, int m_max);

}  // namespace starspec
