#include "starspec/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace starspec {

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string graph_to_json(const StarGraph& graph) {
  nlohmann::ordered_json j;
  j["v"] = graph.v();
  j["seed"] = graph.seed();
  j["lengths"] = std::vector<double>(graph.lengths().begin(), graph.lengths().end());
  return j.dump(2) + "\n";
}

StarGraph graph_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const int v = j.at("v").get<int>();
    auto lengths = j.at("lengths").get<std::vector<double>>();
    if (v < 1 || static_cast<std::size_t>(v) != lengths.size()) {
      throw std::invalid_argument("graph file: v does not match the number of lengths");
    }
    for (double l : lengths) {
      if (!(l > 0.0)) throw std::invalid_argument("graph file: lengths must be positive");
    }
    return StarGraph(std::move(lengths), j.at("seed").get<std::uint64_t>());
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("graph file: ") + e.what());
  }
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum) {
  out << "index,lambda\n";
  for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i) {
    out << i + 1 << ',' << format_real(spectrum.eigenvalues[i]) << '\n';
  }
}

std::vector<double> read_spectrum_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("index,lambda", 0) != 0) {
    throw std::invalid_argument("spectrum file: expected header index,lambda");
  }
  std::vector<double> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("spectrum file: malformed row: " + line);
    try {
      out.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw std::invalid_argument("spectrum file: malformed row: " + line);
    }
  }
  return out;
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw std::logic_error("CSV row width does not match the header");
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_real(values[i]);
  out_ << '\n';
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace starspec
