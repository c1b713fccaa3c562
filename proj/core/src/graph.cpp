#include "starspec/graph.hpp"

#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace starspec {

StarGraph::StarGraph(std::vector<double> lengths, std::uint64_t seed)
    : lengths_(std::move(lengths)), seed_(seed) {
  if (lengths_.empty()) throw std::invalid_argument("star graph needs at least one edge");
  for (double l : lengths_) {
    if (!(l > 0.0)) throw std::invalid_argument("edge lengths must be positive");
  }
  total_length_ = 2.0 * std::accumulate(lengths_.begin(), lengths_.end(), 0.0);
}

StarGraph build_graph(int v, std::uint64_t seed) {
  if (v < 1) throw std::invalid_argument("v must be >= 1, got " + std::to_string(v));
  std::mt19937_64 rng(seed);
  const double width = 1.0 / v;
  const double lo = 1.0 - 0.5 * width;
  std::vector<double> lengths(static_cast<std::size_t>(v));
  for (auto& l : lengths) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    l = lo + u * width;
  }
  return StarGraph(std::move(lengths), seed);
}

double s_amplitude(Scattering kind, int v) {
  if (v < 1) throw std::invalid_argument("v must be >= 1");
  switch (kind) {
    case Scattering::trivial:
      return 1.0;
    case Scattering::backscatter:
      return -1.0 + 2.0 / v;
    case Scattering::transmit:
      return 2.0 / v;
  }
  return 0.0;
}

}  // namespace starspec
