#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace starspec::cli {

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

/// Sidecar `<output>.manifest.json` describing how `output` was produced.
struct RunManifest {
  std::vector<std::string> command;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  double wall_time_seconds = 0.0;

  /// Writes the sidecar next to `output`, digesting the output file.
  void write_for(const std::string& output) const;
};

std::string manifest_path(const std::string& output);

/// Parsed sidecar of `output`; throws std::runtime_error when it is missing
/// or unreadable.
nlohmann::ordered_json read_manifest(const std::string& output);

}  // namespace starspec::cli
