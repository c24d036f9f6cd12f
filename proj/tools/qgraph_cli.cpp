// qgraph: spectra, Robin points and spectral flow of quantum graphs.
//
// Exit codes: 0 ok, 1 verification failure, 2 parse error, 3 solver failure,
// 4 genericity violation, 5 ill-defined level.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qg/conditions.hpp"
#include "qg/errors.hpp"
#include "qg/graph.hpp"
#include "qg/graph_io.hpp"
#include "qg/harness.hpp"
#include "qg/report.hpp"
#include "qg/robin_geometry.hpp"
#include "qg/robin_map.hpp"
#include "qg/solver.hpp"
#include "qg/spectral_flow.hpp"

namespace {

using namespace qg;

constexpr int kExitVerify = 1;
constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;
constexpr int kExitGenericity = 4;
constexpr int kExitIllDefined = 5;

std::string fmt(double x) { return format12(x); }

std::string fmt(const ExtendedReal& t) { return t.is_infinite() ? "inf" : fmt(t.value()); }

double parse_real(const std::string& s) {
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError("invalid number '" + s + "'");
  }
  if (used != s.size()) throw ParseError("invalid number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::pair<double, double> parse_range(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 2) throw ParseError("expected lo:hi, got '" + s + "'");
  const double lo = parse_real(parts[0]);
  const double hi = parse_real(parts[1]);
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) throw ParseError("invalid window '" + s + "'");
  return {lo, hi};
}

ExtendedReal extended(const std::string& s) {
  const double v = parse_real(s);
  return std::isinf(v) ? ExtendedReal::infinity() : ExtendedReal(v);
}

ParameterInterval parse_interval(const std::string& s) {
  if (s == "loop") return ParameterInterval::full_loop();
  const auto parts = split(s, ':');
  if (parts.size() != 2) throw ParseError("expected loop or a:b, got '" + s + "'");
  return ParameterInterval::path(extended(parts[0]), extended(parts[1]));
}

std::vector<double> parse_grid(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 3) throw ParseError("expected a:b:n, got '" + s + "'");
  const double a = parse_real(parts[0]);
  const double b = parse_real(parts[1]);
  const double n = parse_real(parts[2]);
  if (!(std::isfinite(a) && std::isfinite(b) && a < b) || n < 2 || n != std::floor(n) || n > 1e6) {
    throw ParseError("invalid grid '" + s + "'");
  }
  std::vector<double> ts;
  const int count = static_cast<int>(n);
  for (int i = 0; i < count; ++i) ts.push_back(a + (b - a) * i / (count - 1));
  return ts;
}

std::vector<PointOnGraph> parse_set(const MetricGraph& g, const std::string& s) {
  std::vector<PointOnGraph> pts;
  if (s.empty()) return pts;
  for (const std::string& item : split(s, ',')) pts.push_back(parse_point(g, item));
  return pts;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::string point_label(const MetricGraph& g, const PointOnGraph& p) {
  if (p.is_vertex()) return "vertex " + g.vertex_id(p.vertex);
  return "edge " + std::to_string(p.edge) + " x " + fmt(p.x);
}

/// The k-th eigenvalue (1-based, with multiplicity) of the Neumann-Kirchhoff Laplacian.
double kth_eigenvalue(const MetricGraph& g, int k) {
  if (k < 1) throw ParseError("eigenvalue index must be positive");
  return lowest_eigenvalues(nk_problem(g), k).at(k - 1);
}

struct SpectrumArgs {
  std::string graph;
  int count = 10;
  std::string window;
  std::string conditions;
};

int cmd_spectrum(const SpectrumArgs& a) {
  const MetricGraph g = load_graph(a.graph);
  std::vector<VertexCondition> conds(g.num_vertices(), NeumannKirchhoff{});
  if (!a.conditions.empty()) conds = load_conditions(g, a.conditions);
  const BoundaryProblem p(g, conds);
  EigenvalueList list;
  if (!a.window.empty()) {
    const auto [lo, hi] = parse_range(a.window);
    list = eigenvalues_in(p, lo, hi);
  } else {
    if (a.count < 1) throw ParseError("--count must be positive");
    // Close the window halfway to the next distinct eigenvalue.
    double hi = 0.0;
    for (int extra = 1;; extra *= 2) {
      const std::vector<double> vals = lowest_eigenvalues(p, a.count + extra);
      const double last = vals[a.count - 1];
      const auto next = std::find_if(vals.begin() + a.count, vals.end(),
                                     [&](double v) { return v > last + 1e-6 * std::max(1.0, std::abs(last)); });
      if (next != vals.end()) {
        hi = 0.5 * (last + *next);
        break;
      }
      if (extra > 64) throw SolverError("cannot separate eigenvalue " + fmt(last) + " from the next");
    }
    list = eigenvalues_in(p, spectrum_lower_bound(p), hi);
    std::erase_if(list.values, [&](const Eigenvalue& e) { return e.n > a.count; });
  }
  std::printf("%6s %6s %6s  %s\n", "n", "N", "mult", "lambda");
  for (const Eigenvalue& e : list.values) {
    const double lam = std::abs(e.lambda) < 1e-11 ? 0.0 : e.lambda;
    std::printf("%6d %6d %6d  %s%s\n", e.n, e.N, e.mult, fmt(lam).c_str(), e.unresolved ? "  unresolved" : "");
  }
  return 0;
}

struct RobinArgs {
  std::string graph;
  double alpha = 0.0;
  int eig = 1;
  int basis = 0;
};

int cmd_robin(const RobinArgs& a) {
  const MetricGraph g = load_graph(a.graph);
  const EigenTarget target = eigen_target(g, kth_eigenvalue(g, a.eig));
  if (a.basis < 0 || a.basis >= target.mult) throw ParseError("--basis out of range for multiplicity " + std::to_string(target.mult));
  const EigenFunction& f = target.basis[a.basis];
  const GenericityReport& gen = target.generic[a.basis];
  std::printf("lambda %s\n", fmt(target.lambda).c_str());
  std::printf("n %d N %d mult %d\n", target.n, target.N, target.mult);
  std::printf("alpha %s\n", fmt(a.alpha).c_str());
  std::printf("generic %s (above bound %s: %d, vertex values nonzero: %d)\n", gen.generic() ? "yes" : "no",
              fmt(gen.bound).c_str(), gen.above_bound ? 1 : 0, gen.vertex_nonvanishing ? 1 : 0);
  RobinPointSet pts;
  try {
    pts = robin_points(g, f, a.alpha);
  } catch (const GenericityError& ex) {
    std::printf("genericity violation: %s\n", ex.what());
    return kExitGenericity;
  }
  std::printf("points %d\n", pts.size());
  for (const PointOnGraph& p : pts.points) std::printf("  %s\n", point_label(g, p).c_str());
  const RobinDomainPartition dom = robin_domains(g, pts);
  const EulerIdentity euler = euler_identity_check(g, pts, dom);
  std::printf("domains %d\n", dom.nu);
  std::printf("beta %d, |P| - nu + 1 = %d: %s\n", euler.lhs, euler.rhs, euler.holds() ? "ok" : "FAILED");
  return euler.holds() ? 0 : kExitVerify;
}

struct SfArgs {
  std::string graph;
  std::string set;
  double alpha = 0.0;
  double mu = 0.0;
  std::string interval = "loop";
};

/// Nearest level mu + k * step with a well-defined Robin map.
double suggest_level(const MetricGraph& g, const std::vector<int>& B, double alpha, double mu) {
  const double step = 1e-3 * std::max(1.0, std::abs(mu));
  for (int k = 1; k <= 100; ++k) {
    for (double s : {1.0, -1.0}) {
      const double m = mu + s * k * step;
      if (is_well_defined(g, B, alpha, m)) return m;
    }
  }
  return mu + 0.5;
}

int cmd_sf(const SfArgs& a) {
  const MetricGraph g = load_graph(a.graph);
  const std::vector<PointOnGraph> pts = parse_set(g, a.set);
  const ParameterInterval I = parse_interval(a.interval);
  PlacedPoints placed;
  try {
    placed = place_points(g, pts);
  } catch (const std::invalid_argument& ex) {
    throw ParseError(ex.what());
  }
  const MetricGraph& sub = placed.sub.graph;
  SFResult robin;
  try {
    robin = sf_via_robin(sub, placed.B, a.alpha, a.mu, I);
  } catch (const IllDefinedLevel& ex) {
    std::printf("ill-defined level: %s\n", ex.what());
    std::printf("try --mu %s\n", fmt(suggest_level(sub, placed.B, a.alpha, a.mu)).c_str());
    return kExitIllDefined;
  }
  const SFResult track = sf_via_tracking(sub, placed.B, a.alpha, a.mu, I);
  std::printf("mu %s\n", fmt(a.mu).c_str());
  std::printf("alpha %s\n", fmt(a.alpha).c_str());
  std::printf("points %zu\n", pts.size());
  std::printf("interval %s\n", a.interval.c_str());
  std::printf("sf robin-map %d\n", robin.sf);
  std::printf("sf tracking %d (samples %d, wraps %d)\n", track.sf, track.samples, track.wraps);
  std::printf("crossings %zu\n", robin.crossings.size());
  for (const Crossing& c : robin.crossings) {
    std::printf("  t %s theta %s sign %+d\n", fmt(c.t).c_str(), fmt(c.theta).c_str(), c.sign);
  }
  if (robin.sf != track.sf) {
    std::printf("methods disagree\n");
    return kExitVerify;
  }
  return 0;
}

struct CurvesArgs {
  std::string graph;
  std::string set;
  int eig = 0;
  double alpha = 0.0;
  std::string grid = "-10:10:401";
  std::string window = "0:20";
  std::string output;
};

int cmd_curves(const CurvesArgs& a) {
  const MetricGraph g = load_graph(a.graph);
  std::vector<PointOnGraph> pts = parse_set(g, a.set);
  if (a.eig > 0) {
    if (!pts.empty()) throw ParseError("--set and --eig are exclusive");
    const EigenTarget target = eigen_target(g, kth_eigenvalue(g, a.eig));
    pts = robin_points(g, target.basis.front(), a.alpha).points;
  }
  const std::vector<double> ts = parse_grid(a.grid);
  const auto [lo, hi] = parse_range(a.window);
  PlacedPoints placed;
  try {
    placed = place_points(g, pts);
  } catch (const std::invalid_argument& ex) {
    throw ParseError(ex.what());
  }
  const CurveTable table = curve_samples(placed.sub.graph, placed.B, a.alpha, ts, lo, hi);
  write_output(a.output, table.csv());
  if (!table.non_monotone.empty()) {
    std::string ids;
    for (int b : table.non_monotone) ids += " " + std::to_string(b);
    std::fprintf(stderr, "non-monotone branches:%s\n", ids.c_str());
  }
  return 0;
}

struct VerifyArgs {
  std::string theorem = "all";
  int trials = 10;
  std::uint64_t seed = 1;
  int jobs = 1;
  bool no_fixtures = false;
  std::string output;
  std::string format = "table";
};

int cmd_verify(const VerifyArgs& a) {
  const auto& ids = theorem_ids();
  if (a.theorem != "all" && std::find(ids.begin(), ids.end(), a.theorem) == ids.end()) {
    throw ParseError("unknown theorem id '" + a.theorem + "'");
  }
  if (a.trials < 0 || a.jobs < 1) throw ParseError("--trials must be >= 0 and --jobs >= 1");
  HarnessConfig config;
  config.theorem = a.theorem;
  config.trials = a.trials;
  config.seed = a.seed;
  config.jobs = a.jobs;
  config.fixtures = !a.no_fixtures;
  const HarnessReport report = run_harness(config);
  const std::string json = report_json(report);
  if (!a.output.empty()) write_output(a.output, json);
  if (a.format == "json") {
    if (a.output.empty()) std::cout << json;
  } else {
    std::cout << summary_table(report);
  }
  return report.ok() ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra, Robin points and spectral flow of quantum graphs"};
  app.require_subcommand(1);

  SpectrumArgs spec;
  auto* c_spec = app.add_subcommand("spectrum", "Eigenvalues with multiplicities and n/N indices");
  c_spec->add_option("graph", spec.graph, "Graph file (YAML)")->required();
  c_spec->add_option("--count", spec.count, "Number of lowest eigenvalues")->capture_default_str();
  c_spec->add_option("--window", spec.window, "Eigenvalues in lo:hi instead of --count");
  c_spec->add_option("--conditions", spec.conditions, "Vertex condition overlay (YAML)");

  RobinArgs rob;
  auto* c_rob = app.add_subcommand("robin", "Robin points and domains of an eigenfunction");
  c_rob->add_option("graph", rob.graph, "Graph file (YAML)")->required();
  c_rob->add_option("--alpha", rob.alpha, "Prufer angle")->capture_default_str();
  c_rob->add_option("--eig", rob.eig, "Eigenvalue index, 1-based with multiplicity")->capture_default_str();
  c_rob->add_option("--basis", rob.basis, "Eigenspace basis vector")->capture_default_str();

  SfArgs sf;
  auto* c_sf = app.add_subcommand("sf", "Spectral flow of the delta_alpha(t) family by both methods");
  c_sf->add_option("graph", sf.graph, "Graph file (YAML)")->required();
  c_sf->add_option("--set", sf.set, "Comma-separated points: edge:fraction or degree-2 vertex ids")->required();
  c_sf->add_option("--alpha", sf.alpha, "Prufer angle")->capture_default_str();
  c_sf->add_option("--mu", sf.mu, "Level")->required();
  c_sf->add_option("--interval", sf.interval, "loop, a:b, 0:inf or -inf:0")->capture_default_str();

  CurvesArgs cur;
  auto* c_cur = app.add_subcommand("curves", "Spectral curves of the delta_alpha(t) family as CSV");
  c_cur->add_option("graph", cur.graph, "Graph file (YAML)")->required();
  c_cur->add_option("--set", cur.set, "Comma-separated points: edge:fraction or degree-2 vertex ids");
  c_cur->add_option("--eig", cur.eig, "Use the Robin points of this eigenfunction as the set");
  c_cur->add_option("--alpha", cur.alpha, "Prufer angle")->capture_default_str();
  c_cur->add_option("--t-grid", cur.grid, "a:b:n finite grid of couplings")->capture_default_str();
  c_cur->add_option("--window", cur.window, "Eigenvalue window lo:hi")->capture_default_str();
  c_cur->add_option("-o,--output", cur.output, "Output file (default stdout)");

  VerifyArgs ver;
  auto* c_ver = app.add_subcommand("verify", "Run the integer identity checks");
  c_ver->add_option("--theorem", ver.theorem, "Identity id or all")->capture_default_str();
  c_ver->add_option("--trials", ver.trials, "Random graphs")->capture_default_str();
  c_ver->add_option("--seed", ver.seed, "First random seed")->capture_default_str();
  c_ver->add_option("--jobs", ver.jobs, "Worker threads")->capture_default_str();
  c_ver->add_flag("--no-fixtures", ver.no_fixtures, "Skip the curated fixtures");
  c_ver->add_option("-o,--output", ver.output, "JSON report file");
  c_ver->add_option("--format", ver.format, "table or json")
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (*c_spec) return cmd_spectrum(spec);
    if (*c_rob) return cmd_robin(rob);
    if (*c_sf) return cmd_sf(sf);
    if (*c_cur) return cmd_curves(cur);
    if (*c_ver) return cmd_verify(ver);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitParse;
  } catch (const GenericityError& e) {
    std::fprintf(stderr, "genericity violation: %s\n", e.what());
    return kExitGenericity;
  } catch (const IllDefinedLevel& e) {
    std::fprintf(stderr, "ill-defined level: %s\n", e.what());
    return kExitIllDefined;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kExitParse;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  }
  return 0;
}
