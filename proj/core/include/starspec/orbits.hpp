#pragma once

#include "starspec/combinatorics.hpp"

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace starspec {

/// Periodic orbit on a star graph, written as the cyclic sequence of edges
/// visited on successive out-and-back excursions from the centre.  A word of
/// length k is an orbit of period 2k.  Letters are edge labels 1..v.
class OrbitWord {
 public:
  OrbitWord() = default;
  explicit OrbitWord(std::vector<int> letters);

  /// Digits map to themselves ("11212332"); lower-case letters map a -> 1,
  /// b -> 2, ... ("abab").
  static OrbitWord parse(std::string_view text);

  const std::vector<int>& letters() const { return letters_; }
  int size() const { return static_cast<int>(letters_.size()); }
  std::string str() const;

  friend bool operator==(const OrbitWord&, const OrbitWord&) = default;
  friend auto operator<=>(const OrbitWord&, const OrbitWord&) = default;

 private:
  std::vector<int> letters_;
};

/// Degeneracy class: j distinct edges, n_i visits and m_i cyclic blocks of
/// edge i (edges ordered by label).  Orbits of one class share length and
/// amplitude.
struct OrbitClass {
  std::vector<int> n;
  std::vector<int> m;

  int j() const { return static_cast<int>(n.size()); }
  int total_visits() const;  // N
  int total_blocks() const;  // M

  /// 1 <= m_i <= n_i for all i and matching lengths.
  bool well_formed() const;
  /// Whether some cyclic word realises the class: j = 1 needs m = (1); for
  /// j >= 2 no edge may own more than half of the blocks.
  bool feasible() const;

  friend bool operator==(const OrbitClass&, const OrbitClass&) = default;
};

OrbitClass classify(const OrbitWord& word);

int repetition_number(const OrbitWord& word);

/// Lexicographically minimal rotation.
OrbitWord canonical_rotation(const OrbitWord& word);

/// Product of vertex amplitudes around the orbit for a star with v edges:
/// (-1 + 2/v) per cyclically adjacent equal pair, 2/v per unequal pair.
double amplitude(const OrbitWord& word, int v);

/// One canonical representative per rotation class realising `cls`, letters
/// 1..j, in lexicographic order.  Empty for infeasible classes.
std::vector<OrbitWord> enumerate_class(const OrbitClass& cls);

/// Orbit count of a class weighted by 1/r, by enumeration.  Throws
/// std::length_error when N exceeds `max_visits`.
Rational q_bruteforce(const OrbitClass& cls, int max_visits = 12);

/// Closed-form weighted count via inclusion-exclusion over block
/// interleavings.  Requires j >= 2.
Rational q_formula(const OrbitClass& cls);

/// Ordered partitions of N into K positive parts, binom(N-1, K-1); zero when
/// K > N.
BigInt partitions(int N, int K);

/// Calls `visit(word, period)` for every necklace of length k over {1..v} in
/// lexicographic order; `period` is the primitive length, so the repetition
/// number is k / period.
void for_each_necklace(int v, int k, const std::function<void(const std::vector<int>&, int)>& visit);

}  // namespace starspec
