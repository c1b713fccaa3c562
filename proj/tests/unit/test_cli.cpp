#include "cli.hpp"
#include "manifest.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using starspec::cli::dispatch;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "starspec_cli_test";
  fs::create_directories(dir);
  const auto p = dir / name;
  fs::remove(p);
  fs::remove(p.string() + ".manifest.json");
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("grid parsing") {
  using starspec::cli::parse_grid;
  CHECK(parse_grid("0:1:0.25") == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(parse_grid("0.5,2") == std::vector<double>{0.5, 2.0});
  CHECK_THROWS(parse_grid("1:0:0.1"));
  CHECK_THROWS(parse_grid("a,b"));
}

TEST_CASE("orbit class count by both methods") {
  const auto r = run({"orbits", "q", "--n", "2,2", "--m", "2,2", "--method", "both"});
  CHECK(r.code == 0);
  CHECK(r.out.find("1/2") != std::string::npos);
  CHECK(r.out.find("OK") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  auto r = run({"gen", "--v", "0"});
  CHECK(r.code == 2);
  CHECK(!r.err.empty());
  CHECK(run({"gen", "--v", "3", "--no-such-flag"}).code == 2);
  CHECK(run({"analytic", "k", "--tau", "0.7"}).code == 2);
}

TEST_CASE("compare needs manifests") {
  const auto emp = scratch("bare_emp.csv");
  const auto an = scratch("bare_an.csv");
  std::ofstream(emp) << "x,estimate,stderr,pairs\n1,1,0.1,100\n";
  std::ofstream(an) << "x,r2\n1,1\n";
  const auto r = run({"compare", "--empirical", emp.string(), "--analytic", an.string()});
  CHECK(r.code == 1);
}

TEST_CASE("analytic outputs are reproducible and carry manifests") {
  const auto a = scratch("k_a.csv");
  const auto b = scratch("k_b.csv");
  REQUIRE(run({"analytic", "k", "--tau-max", "0.2", "--step", "0.05", "--out", a.string()}).code == 0);
  REQUIRE(run({"analytic", "k", "--tau-max", "0.2", "--step", "0.05", "--out", b.string()}).code == 0);
  CHECK(slurp(a) == slurp(b));
  const auto manifest = starspec::cli::read_manifest(a.string());
  CHECK(manifest.at("outputs").at(0).at("sha256") == starspec::cli::sha256_file(a.string()));
  CHECK(manifest.at("config").at("truncation").at("j_max") == 6);
}

TEST_CASE("sha256 of a known string") {
  const auto p = scratch("abc.txt");
  std::ofstream(p, std::ios::binary) << "abc";
  CHECK(starspec::cli::sha256_file(p.string()) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("compare end to end") {
  const auto emp = scratch("emp.csv");
  const auto an = scratch("an.csv");
  REQUIRE(run({"empirical", "r2", "--v", "10", "--realizations", "4", "--lambda-max", "60", "--x-grid",
               "1,2", "--out", emp.string()})
              .code == 0);
  REQUIRE(run({"analytic", "r2", "--x-grid", "1,2", "--out", an.string()}).code == 0);
  const auto r = run({"compare", "--empirical", emp.string(), "--analytic", an.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("x,estimate,stderr,analytic,z") != std::string::npos);
  const auto clobber = run({"compare", "--empirical", emp.string(), "--analytic", an.string(), "--out", an.string()});
  CHECK(clobber.code == 1);
}
