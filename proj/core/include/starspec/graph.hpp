#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace starspec {

/// Star graph: a central vertex joined to `v` outer vertices by edges of
/// physical length l_i.  Immutable once built.
///
/// Lengths are drawn i.i.d. uniform on [1 - 1/(2v), 1 + 1/(2v)] from
/// std::mt19937_64 seeded with `seed`; each 64-bit draw x maps to
/// u = (x >> 11) * 2^-53 and l = 1 - 1/(2v) + u / v.  This mapping is part of
/// the file format contract: the same (v, seed) gives bit-identical lengths.
class StarGraph {
 public:
  StarGraph(std::vector<double> lengths, std::uint64_t seed);

  int v() const { return static_cast<int>(lengths_.size()); }
  std::span<const double> lengths() const { return lengths_; }
  double length(int edge) const { return lengths_.at(static_cast<std::size_t>(edge)); }
  std::uint64_t seed() const { return seed_; }

  /// Directed-edge total length L = 2 * sum(l_i).
  double total_length() const { return total_length_; }

 private:
  std::vector<double> lengths_;
  std::uint64_t seed_;
  double total_length_;
};

/// Throws std::invalid_argument for v < 1.
StarGraph build_graph(int v, std::uint64_t seed);

enum class Scattering { trivial, backscatter, transmit };

/// Vertex scattering amplitude with Neumann matching: 1 at outer vertices,
/// -1 + 2/v back into the same edge at the centre, 2/v into another edge.
double s_amplitude(Scattering kind, int v);

}  // namespace starspec
