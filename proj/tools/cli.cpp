#include "cli.hpp"

#include "manifest.hpp"

#include "starspec/analytic.hpp"
#include "starspec/empirical.hpp"
#include "starspec/io.hpp"
#include "starspec/orbits.hpp"
#include "starspec/parallel.hpp"
#include "starspec/spectrum.hpp"
#include "starspec/trace_formula.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace starspec::cli {

namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

// A run that completed but whose result failed a check.
class ValidationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Context {
  std::vector<std::string> args;
  std::ostream& out;
  std::ostream& err;
  Clock::time_point start = Clock::now();

  // Writes `text` to `path` plus its manifest, or to `out` when no path was given.
  void emit(const std::string& path, const std::string& text, Json config) const {
    if (path.empty()) {
      out << text;
      return;
    }
    {
      std::ofstream file(path, std::ios::binary);
      if (!file) throw std::runtime_error("cannot write " + path);
      file << text;
    }
    RunManifest m;
    m.command = args;
    m.config = std::move(config);
    m.wall_time_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    m.write_for(path);
  }
};

struct TruncationFlags {
  Truncation t;
  std::string file;

  void add_to(CLI::App* app) {
    app->add_option("--j-max", t.j_max, "Largest distinct-edge count j in the series")->check(CLI::PositiveNumber);
    app->add_option("--m-max", t.m_max, "Degree excess kept per j-block of the three-point series")
        ->check(CLI::PositiveNumber);
    app->add_option("--k-m-max", t.k_m_max, "M cut of the form-factor series")->check(CLI::PositiveNumber);
    app->add_option("--quad", t.quad_points, "Gauss-Legendre nodes per axis and interval")
        ->check(CLI::Range(2, 1 << 14));
    app->add_option("--tau-cutoff", t.tau_cutoff, "Upper limit of the (tau, tau') transforms")
        ->check(CLI::Range(3.0, 1e6));
    app->add_option("--series-radius", t.series_radius, "Extent of the power-series kernel terms")
        ->check(CLI::PositiveNumber);
    app->add_option("--truncation", file, "JSON truncation file; explicit flags override it")
        ->check(CLI::ExistingFile);
  }

  // File values first, then any flag the user gave explicitly.
  Truncation resolve(const CLI::App* app) const {
    Truncation out = t;
    if (!file.empty()) {
      out = truncation_from_json(read_file(file));
      if (app->count("--j-max")) out.j_max = t.j_max;
      if (app->count("--m-max")) out.m_max = t.m_max;
      if (app->count("--k-m-max")) out.k_m_max = t.k_m_max;
      if (app->count("--quad")) out.quad_points = t.quad_points;
      if (app->count("--tau-cutoff")) out.tau_cutoff = t.tau_cutoff;
      if (app->count("--series-radius")) out.series_radius = t.series_radius;
    }
    out.validate();
    return out;
  }
};

Json truncation_json(const Truncation& t) { return Json::parse(to_json(t)); }

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const int v = std::stoi(item, &used);
    if (used != item.size()) throw std::invalid_argument("not an integer list: " + text);
    out.push_back(v);
  }
  return out;
}

StarGraph load_or_build(const std::string& graph_file, int v, std::uint64_t seed) {
  return graph_file.empty() ? build_graph(v, seed) : graph_from_json(read_file(graph_file));
}

std::string csv_header_of(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::string line;
  std::getline(in, line);
  return line;
}

// Rows of a CSV file keyed by the first `key_columns` fields (as written).
std::map<std::vector<std::string>, std::vector<std::string>> read_keyed_csv(const std::string& path,
                                                                            std::size_t key_columns) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::map<std::vector<std::string>, std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() <= key_columns) throw std::invalid_argument("malformed row in " + path);
    std::vector<std::string> key(fields.begin(), fields.begin() + static_cast<long>(key_columns));
    rows[key] = std::vector<std::string>(fields.begin() + static_cast<long>(key_columns), fields.end());
  }
  return rows;
}

bool same_file(const std::string& a, const std::string& b) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::exists(a, ec) && fs::exists(b, ec)) return fs::equivalent(a, b, ec);
  return fs::weakly_canonical(a, ec) == fs::weakly_canonical(b, ec);
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  try {
    if (text.find(':') != std::string::npos) {
      std::stringstream ss(text);
      std::string a, b, c;
      if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c)) {
        throw std::invalid_argument("bad grid");
      }
      return uniform_grid(std::stod(a), std::stod(b), std::stod(c));
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  } catch (const std::logic_error&) {
    throw std::invalid_argument("grid must be lo:hi:step or a comma list, got '" + text + "'");
  }
  if (out.empty()) throw std::invalid_argument("empty grid '" + text + "'");
  return out;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{args, out, err};
  CLI::App app{"Spectral statistics of quantum star graphs", "star-spectra"};
  app.require_subcommand(1);
  app.set_version_flag("--version", STARSPEC_VERSION);
  int threads = 0;
  app.add_option("--threads", threads, "Worker cap (default: STAR_SPECTRA_THREADS, else all cores)")
      ->check(CLI::NonNegativeNumber);

  // gen
  auto* gen = app.add_subcommand("gen", "Draw a random star graph and write it as JSON");
  int gen_v = 0;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--v", gen_v, "Number of edges")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Random seed");
  gen->add_option("--out", gen_out, "Output JSON file (default: stdout)");

  // spectrum
  auto* spec = app.add_subcommand("spectrum", "Solve the secular equation of one graph");
  std::string spec_graph, spec_out;
  int spec_v = 0;
  std::uint64_t spec_seed = 1;
  double spec_lmax = 0.0;
  auto* spec_graph_opt = spec->add_option("--graph", spec_graph, "Graph JSON file")->check(CLI::ExistingFile);
  spec->add_option("--v", spec_v, "Number of edges, when no --graph is given")
      ->check(CLI::PositiveNumber)
      ->excludes(spec_graph_opt);
  spec->add_option("--seed", spec_seed, "Random seed, when no --graph is given");
  spec->add_option("--lambda-max", spec_lmax, "Largest eigenvalue sought")->required()->check(CLI::PositiveNumber);
  spec->add_option("--out", spec_out, "Output CSV (default: stdout)");

  // orbits
  auto* orbits = app.add_subcommand("orbits", "Periodic-orbit queries");
  orbits->require_subcommand(1);
  auto* q = orbits->add_subcommand("q", "Weighted orbit count of a degeneracy class");
  std::string q_n, q_m, q_method = "both";
  q->add_option("--n", q_n, "Visits per edge, comma separated")->required();
  q->add_option("--m", q_m, "Blocks per edge, comma separated")->required();
  q->add_option("--method", q_method, "formula, brute or both")
      ->check(CLI::IsMember({"formula", "brute", "both"}));
  auto* cls = orbits->add_subcommand("classify", "Class, repetition number and amplitude of a word");
  std::string cls_word;
  int cls_v = 0;
  cls->add_option("word", cls_word, "Edge labels, e.g. abca or 1231")->required();
  cls->add_option("--v", cls_v, "Number of edges for the amplitude (default: largest label)")
      ->check(CLI::PositiveNumber);

  // trace-check
  auto* trace = app.add_subcommand("trace-check", "Compare orbit-sum and exact smoothed densities");
  std::string tr_graph, tr_out;
  int tr_v = 3, tr_kmax = 12;
  std::uint64_t tr_seed = 7;
  double tr_sigma = 0.1, tr_lo = 5.0, tr_hi = 50.0, tr_step = 0.05;
  auto* tr_graph_opt = trace->add_option("--graph", tr_graph, "Graph JSON file")->check(CLI::ExistingFile);
  trace->add_option("--v", tr_v, "Number of edges")->check(CLI::PositiveNumber)->excludes(tr_graph_opt);
  trace->add_option("--seed", tr_seed, "Random seed");
  trace->add_option("--kmax", tr_kmax, "Longest word (orbit period 2 kmax)")->check(CLI::NonNegativeNumber);
  trace->add_option("--sigma", tr_sigma, "Gaussian smoothing width")->check(CLI::PositiveNumber);
  trace->add_option("--lambda-lo", tr_lo, "Grid start")->check(CLI::PositiveNumber);
  trace->add_option("--lambda-hi", tr_hi, "Grid end")->check(CLI::PositiveNumber);
  trace->add_option("--step", tr_step, "Grid step")->check(CLI::PositiveNumber);
  trace->add_option("--out", tr_out, "Output CSV (default: stdout)");

  // analytic
  auto* analytic = app.add_subcommand("analytic", "Series and quadrature evaluations");
  analytic->require_subcommand(1);
  TruncationFlags trunc_flags;
  auto* an_f = analytic->add_subcommand("f", "Three-point kernel F and its components on a grid");
  double f_tau_max = 0.5, f_step = 0.01;
  std::string f_out;
  an_f->add_option("--tau-max", f_tau_max, "Grid extent in tau and tau'")->check(CLI::Range(0.0, 1.0));
  an_f->add_option("--step", f_step, "Grid step")->check(CLI::PositiveNumber);
  an_f->add_option("--out", f_out, "Output CSV (default: stdout)");
  auto* an_r2 = analytic->add_subcommand("r2", "Two-point function from the form-factor series");
  std::string r2_grid = "0:3:0.125", r2_out;
  an_r2->add_option("--x-grid", r2_grid, "lo:hi:step or comma list");
  an_r2->add_option("--out", r2_out, "Output CSV (default: stdout)");
  auto* an_r3 = analytic->add_subcommand("r3", "Three-point function");
  std::optional<double> r3_x, r3_y;
  std::string r3_xgrid, r3_ygrid, r3_out;
  an_r3->add_option("--x", r3_x, "Single point x");
  an_r3->add_option("--y", r3_y, "Single point y");
  an_r3->add_option("--x-grid", r3_xgrid, "lo:hi:step or comma list");
  an_r3->add_option("--y-grid", r3_ygrid, "lo:hi:step or comma list (default: x grid)");
  an_r3->add_option("--out", r3_out, "Output CSV (default: stdout)");
  auto* an_k = analytic->add_subcommand("k", "Two-point form factor K(tau)");
  std::optional<double> k_tau;
  double k_tau_max = 0.5, k_step = 0.01;
  std::string k_out;
  an_k->add_option("--tau", k_tau, "Single tau in [0, 0.5]");
  an_k->add_option("--tau-max", k_tau_max, "Grid extent, when no --tau is given")->check(CLI::Range(0.0, 0.5));
  an_k->add_option("--step", k_step, "Grid step")->check(CLI::PositiveNumber);
  an_k->add_option("--out", k_out, "Output CSV (default: stdout)");
  for (auto* sub : {an_f, an_r2, an_r3, an_k}) trunc_flags.add_to(sub);

  // empirical
  auto* empirical = app.add_subcommand("empirical", "Monte Carlo estimates over star-graph ensembles");
  empirical->require_subcommand(1);
  EnsembleConfig ens;
  std::string em_xgrid, em_ygrid, em_out;
  auto* em_r2 = empirical->add_subcommand("r2", "Two-point function");
  auto* em_r3 = empirical->add_subcommand("r3", "Three-point function");
  for (auto* sub : {em_r2, em_r3}) {
    sub->add_option("--v", ens.v, "Number of edges")->check(CLI::PositiveNumber);
    sub->add_option("--realizations", ens.realizations, "Ensemble size")->check(CLI::PositiveNumber);
    sub->add_option("--lambda-min", ens.lambda_min, "Start of the spectral window per realization")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--lambda-max", ens.lambda_max, "Spectrum cutoff per realization")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", ens.seed, "Ensemble seed");
    sub->add_option("--kernel-width", ens.kernel_width, "Gaussian width in mean spacings")
        ->check(CLI::PositiveNumber);
    sub->add_option("--x-grid", em_xgrid, "lo:hi:step or comma list");
    sub->add_option("--out", em_out, "Output CSV (default: stdout)");
  }
  em_r3->add_option("--y-grid", em_ygrid, "lo:hi:step or comma list (default: x grid)");

  // compare
  auto* compare = app.add_subcommand("compare", "Empirical estimate versus analytic prediction");
  std::string cmp_emp, cmp_an, cmp_out;
  bool cmp_strict = false;
  compare->add_option("--empirical", cmp_emp, "CSV from `empirical r2|r3`")->required()->check(CLI::ExistingFile);
  compare->add_option("--analytic", cmp_an, "CSV from `analytic r2|r3`")->required()->check(CLI::ExistingFile);
  compare->add_option("--out", cmp_out, "Report CSV (default: stdout)");
  compare->add_flag("--strict", cmp_strict, "Exit 1 when any point lies outside 3 standard errors");

  // expansion-table
  auto* expansion = app.add_subcommand("expansion-table", "F against its second-order expansion");
  double ex_tau_max = 0.06, ex_step = 0.02;
  std::string ex_out;
  expansion->add_option("--tau-max", ex_tau_max, "Grid extent")->check(CLI::Range(0.0, 1.0));
  expansion->add_option("--step", ex_step, "Grid step")->check(CLI::PositiveNumber);
  expansion->add_option("--out", ex_out, "Output CSV (default: stdout)");
  trunc_flags.add_to(expansion);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::CallForVersion&) {
    out << STARSPEC_VERSION << '\n';
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help("", CLI::AppFormatMode::All);
    return kUsageError;
  }
  if (threads > 0) set_max_threads(threads);

  try {
    if (gen->parsed()) {
      const auto graph = build_graph(gen_v, gen_seed);
      ctx.emit(gen_out, graph_to_json(graph), Json{{"v", gen_v}, {"seed", gen_seed}});
    } else if (spec->parsed()) {
      if (spec_graph.empty() && spec_v == 0) throw std::invalid_argument("spectrum needs --graph or --v");
      const auto graph = load_or_build(spec_graph, spec_v, spec_seed);
      const auto s = solve_spectrum(graph, spec_lmax);
      std::ostringstream csv;
      write_spectrum_csv(csv, s);
      ctx.emit(spec_out, csv.str(),
               Json{{"graph", Json::parse(graph_to_json(graph))},
                    {"lambda_max", spec_lmax},
                    {"eigenvalues", s.eigenvalues.size()}});
    } else if (q->parsed()) {
      const OrbitClass c{parse_int_list(q_n), parse_int_list(q_m)};
      if (!c.well_formed()) throw std::invalid_argument("--n and --m must have equal length with 1 <= m_i <= n_i");
      std::optional<Rational> by_formula, by_brute;
      if (q_method != "brute") by_formula = q_formula(c);
      if (q_method != "formula") by_brute = q_bruteforce(c);
      if (by_formula && by_brute) {
        const bool ok = *by_formula == *by_brute;
        out << to_string(*by_formula) << "  " << to_string(*by_brute) << "  " << (ok ? "OK" : "MISMATCH") << '\n';
        if (!ok) return kValidationFailure;
      } else {
        out << to_string(by_formula ? *by_formula : *by_brute) << '\n';
      }
    } else if (cls->parsed()) {
      const auto word = OrbitWord::parse(cls_word);
      const auto c = classify(word);
      int v = cls_v;
      if (v == 0) v = *std::max_element(word.letters().begin(), word.letters().end());
      out << "canonical " << canonical_rotation(word).str() << "\nj " << c.j() << "\nn";
      for (int n : c.n) out << ' ' << n;
      out << "\nm";
      for (int m : c.m) out << ' ' << m;
      out << "\nrepetition " << repetition_number(word) << "\namplitude(v=" << v << ") "
          << format_real(amplitude(word, v)) << '\n';
    } else if (trace->parsed()) {
      if (!(tr_hi > tr_lo)) throw std::invalid_argument("--lambda-hi must exceed --lambda-lo");
      const auto graph = load_or_build(tr_graph, tr_v, tr_seed);
      const auto grid = uniform_grid(tr_lo, tr_hi, tr_step);
      const auto spectrum = solve_spectrum(graph, grid.back() + 12.0 * tr_sigma);
      const auto exact = density_from_spectrum(spectrum, grid, tr_sigma);
      const auto orbit = density_from_orbits(graph, grid, tr_sigma, tr_kmax);
      const double dist = relative_l2_distance(orbit, exact);
      std::ostringstream csv;
      CsvWriter w(csv, {"lambda", "orbit_density", "spectral_density"});
      for (std::size_t i = 0; i < grid.size(); ++i) w.row({grid[i], orbit.values[i], exact.values[i]});
      ctx.emit(tr_out, csv.str(),
               Json{{"graph", Json::parse(graph_to_json(graph))},
                    {"kmax", tr_kmax},
                    {"sigma", tr_sigma},
                    {"grid", {{"lo", tr_lo}, {"hi", tr_hi}, {"step", tr_step}}},
                    {"relative_l2_distance", dist}});
      (tr_out.empty() ? err : out) << "relative L2 distance " << format_real(dist) << '\n';
    } else if (an_f->parsed()) {
      const auto t = trunc_flags.resolve(an_f);
      const auto grid = uniform_grid(0.0, f_tau_max, f_step);
      const std::size_t n = grid.size();
      std::vector<KernelValue> vals(n * n);
      parallel_for(n, [&](std::size_t i) {
        for (std::size_t k = 0; k < n; ++k) vals[i * n + k] = f_components(grid[i], grid[k], t);
      });
      std::ostringstream csv;
      CsvWriter w(csv, {"tau", "tau_p", "F1", "F2", "F3", "F4", "F", "expansion"});
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
          const auto& v = vals[i * n + k];
          w.row({grid[i], grid[k], v.f1, v.f2, v.f3, v.f4, v.total(), f_expansion(grid[i], grid[k])});
        }
      }
      ctx.emit(f_out, csv.str(),
               Json{{"truncation", truncation_json(t)}, {"tau_max", f_tau_max}, {"step", f_step}});
    } else if (an_r2->parsed()) {
      const auto t = trunc_flags.resolve(an_r2);
      const auto grid = parse_grid(r2_grid);
      std::ostringstream csv;
      CsvWriter w(csv, {"x", "r2"});
      for (double x : grid) w.row({x, r2_analytic(x, t)});
      ctx.emit(r2_out, csv.str(), Json{{"truncation", truncation_json(t)}, {"x_grid", r2_grid}});
    } else if (an_r3->parsed()) {
      const auto t = trunc_flags.resolve(an_r3);
      std::vector<std::pair<double, double>> points;
      if (r3_x || r3_y) {
        if (!r3_x || !r3_y || !r3_xgrid.empty()) throw std::invalid_argument("give both --x and --y, or --x-grid");
        points.emplace_back(*r3_x, *r3_y);
      } else {
        if (r3_xgrid.empty()) throw std::invalid_argument("analytic r3 needs --x/--y or --x-grid");
        const auto xs = parse_grid(r3_xgrid);
        const auto ys = r3_ygrid.empty() ? xs : parse_grid(r3_ygrid);
        for (double x : xs) {
          for (double y : ys) points.emplace_back(x, y);
        }
      }
      const auto kernel = tabulate_kernel(t);
      std::vector<std::pair<double, double>> vals(points.size());
      parallel_for(points.size(), [&](std::size_t i) {
        const auto [x, y] = points[i];
        const double c = r3_connected(x, y, kernel);
        vals[i] = {c, r2_analytic(x, t) + r2_analytic(y, t) + r2_analytic(x - y, t) - 2.0 + c};
      });
      std::ostringstream csv;
      CsvWriter w(csv, {"x", "y", "r3_connected", "r3_full"});
      for (std::size_t i = 0; i < points.size(); ++i) {
        w.row({points[i].first, points[i].second, vals[i].first, vals[i].second});
      }
      ctx.emit(r3_out, csv.str(),
               Json{{"truncation", truncation_json(t)}, {"x_grid", r3_xgrid}, {"y_grid", r3_ygrid}});
    } else if (an_k->parsed()) {
      const auto t = trunc_flags.resolve(an_k);
      if (k_tau) {
        out << format_real(k_formfactor(*k_tau, t)) << '\n';
      } else {
        std::ostringstream csv;
        CsvWriter w(csv, {"tau", "K"});
        for (double tau : uniform_grid(0.0, k_tau_max, k_step)) w.row({tau, k_formfactor(std::min(tau, 0.5), t)});
        ctx.emit(k_out, csv.str(), Json{{"truncation", truncation_json(t)}, {"tau_max", k_tau_max}, {"step", k_step}});
      }
    } else if (em_r2->parsed() || em_r3->parsed()) {
      const bool three = em_r3->parsed();
      if (em_xgrid.empty()) em_xgrid = three ? "0:3:0.25" : "0:3:0.125";
      ens.x_grid = parse_grid(em_xgrid);
      if (three) {
        const auto ys = em_ygrid.empty() ? ens.x_grid : parse_grid(em_ygrid);
        for (double x : ens.x_grid) {
          for (double y : ys) ens.xy_grid.emplace_back(x, y);
        }
      }
      const auto est = three ? estimate_r3(ens) : estimate_r2(ens);
      for (const auto& w : est.warnings) err << "warning: " << w << '\n';
      std::ostringstream csv;
      if (three) {
        CsvWriter w(csv, {"x", "y", "estimate", "stderr", "pairs"});
        for (std::size_t i = 0; i < est.x.size(); ++i) {
          w.row({est.x[i], est.y[i], est.values[i], est.std_error[i], static_cast<double>(est.pairs[i])});
        }
      } else {
        CsvWriter w(csv, {"x", "estimate", "stderr", "pairs"});
        for (std::size_t i = 0; i < est.x.size(); ++i) {
          w.row({est.x[i], est.values[i], est.std_error[i], static_cast<double>(est.pairs[i])});
        }
      }
      auto meta = Json::parse(est.metadata);
      meta["warnings"] = est.warnings;
      ctx.emit(em_out, csv.str(), meta);
    } else if (compare->parsed()) {
      if (!cmp_out.empty()) {
        for (const auto& input : {cmp_emp, cmp_an, manifest_path(cmp_emp), manifest_path(cmp_an)}) {
          if (same_file(cmp_out, input) || same_file(manifest_path(cmp_out), input)) {
            throw ValidationFailure("refusing to overwrite input " + input);
          }
        }
      }
      Json emp_meta, an_meta;
      try {
        emp_meta = read_manifest(cmp_emp).at("config");
        an_meta = read_manifest(cmp_an).at("config");
      } catch (const std::exception& e) {
        throw ValidationFailure(std::string("compare needs both manifests: ") + e.what());
      }
      if (!emp_meta.contains("ensemble") || !emp_meta.contains("kernel_width")) {
        throw ValidationFailure("empirical manifest lacks ensemble metadata");
      }
      if (!an_meta.contains("truncation")) throw ValidationFailure("analytic manifest lacks truncation metadata");

      const std::string eh = csv_header_of(cmp_emp);
      const std::string ah = csv_header_of(cmp_an);
      std::size_t keys = 0;
      if (eh == "x,estimate,stderr,pairs" && ah == "x,r2") {
        keys = 1;
      } else if (eh == "x,y,estimate,stderr,pairs" && ah == "x,y,r3_connected,r3_full") {
        keys = 2;
      } else {
        throw std::invalid_argument("compare needs `empirical r2` with `analytic r2`, or `empirical r3` with `analytic r3`");
      }
      const auto emp = read_keyed_csv(cmp_emp, keys);
      const auto ana = read_keyed_csv(cmp_an, keys);
      std::ostringstream csv;
      std::vector<std::string> header{"x"};
      if (keys == 2) header.push_back("y");
      for (const char* h : {"estimate", "stderr", "analytic", "z"}) header.emplace_back(h);
      CsvWriter w(csv, header);
      std::size_t matched = 0, within = 0;
      for (const auto& [key, row] : emp) {
        const auto it = ana.find(key);
        if (it == ana.end()) continue;
        const double est = std::stod(row[0]);
        const double se = std::stod(row[1]);
        const double pred = std::stod(it->second.back());
        const double z = se > 0.0 ? (est - pred) / se : (est == pred ? 0.0 : INFINITY);
        std::vector<double> r;
        for (const auto& k : key) r.push_back(std::stod(k));
        r.insert(r.end(), {est, se, pred, z});
        w.row(r);
        ++matched;
        if (std::abs(z) <= 3.0) ++within;
      }
      if (matched == 0) throw ValidationFailure("no grid points in common");
      ctx.emit(cmp_out, csv.str(),
               Json{{"empirical", cmp_emp},
                    {"analytic", cmp_an},
                    {"ensemble", emp_meta},
                    {"truncation", an_meta.at("truncation")},
                    {"points", matched},
                    {"within_3_stderr", within}});
      (cmp_out.empty() ? err : out) << within << " of " << matched << " points within 3 standard errors\n";
      if (cmp_strict && within != matched) return kValidationFailure;
    } else if (expansion->parsed()) {
      const auto t = trunc_flags.resolve(expansion);
      const auto grid = uniform_grid(0.0, ex_tau_max, ex_step);
      std::ostringstream csv;
      CsvWriter w(csv, {"tau", "tau_p", "F", "expansion", "difference"});
      for (double a : grid) {
        for (double b : grid) {
          const double f = f_total(a, b, t);
          const double e = f_expansion(a, b);
          w.row({a, b, f, e, f - e});
        }
      }
      ctx.emit(ex_out, csv.str(),
               Json{{"truncation", truncation_json(t)}, {"tau_max", ex_tau_max}, {"step", ex_step}});
    }
  } catch (const ValidationFailure& e) {
    err << "error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::length_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidationFailure;
  }
  return kSuccess;
}

}  // namespace starspec::cli
