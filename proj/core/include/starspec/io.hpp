#pragma once

#include "starspec/graph.hpp"
#include "starspec/spectrum.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace starspec {

/// Shortest form that round-trips: printf "%.17g".
std::string format_real(double value);

/// {"v": int, "seed": int, "lengths": [real, ...]}.
std::string graph_to_json(const StarGraph& graph);
/// Throws std::invalid_argument on malformed input or when v and the number
/// of lengths disagree.
StarGraph graph_from_json(const std::string& text);

/// CSV with header `index,lambda`, index counting from 1.
void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum);
/// Reads the eigenvalue column back; the provenance fields stay empty.
std::vector<double> read_spectrum_csv(std::istream& in);

/// Minimal CSV writer: header row, then rows of reals formatted with
/// format_real.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

std::string read_file(const std::string& path);

}  // namespace starspec
