#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>

#ifndef STARSPEC_VERSION
#define STARSPEC_VERSION "unknown"
#endif

namespace starspec::cli {

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 unavailable");
  }
  std::array<char, 1 << 16> buf;
  while (in.read(buf.data(), buf.size()) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md;
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    char b[3];
    std::snprintf(b, sizeof b, "%02x", md[i]);
    hex += b;
  }
  return hex;
}

std::string manifest_path(const std::string& output) { return output + ".manifest.json"; }

void RunManifest::write_for(const std::string& output) const {
  nlohmann::ordered_json j;
  j["tool"] = "star-spectra";
  j["version"] = STARSPEC_VERSION;
  j["command"] = command;
  j["config"] = config;
  j["wall_time_seconds"] = wall_time_seconds;
  j["outputs"] = nlohmann::ordered_json::array({{{"path", output}, {"sha256", sha256_file(output)}}});
  std::ofstream out(manifest_path(output), std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + manifest_path(output));
  out << j.dump(2) << '\n';
}

nlohmann::ordered_json read_manifest(const std::string& output) {
  std::ifstream in(manifest_path(output), std::ios::binary);
  if (!in) throw std::runtime_error("missing manifest " + manifest_path(output));
  try {
    return nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("unreadable manifest " + manifest_path(output) + ": " + e.what());
  }
}

}  // namespace starspec::cli
