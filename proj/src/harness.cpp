#include "qg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include "qg/errors.hpp"
#include "qg/robin_geometry.hpp"
#include "qg/robin_map.hpp"
#include "qg/spectral_flow.hpp"

namespace qg {

namespace {

constexpr double kPi = std::numbers::pi;

std::string suffix(const std::string& id, const std::string& s) { return s.empty() ? id : id + "/" + s; }

}  // namespace

const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass:
      return "pass";
    case CheckStatus::Fail:
      return "fail";
    case CheckStatus::Skip:
      return "skip";
  }
  return "?";
}

TheoremCheck make_check(std::string theorem, std::string case_id, std::optional<double> alpha, long lhs, long rhs) {
  TheoremCheck c;
  c.theorem = std::move(theorem);
  c.case_id = std::move(case_id);
  c.alpha = alpha;
  c.lhs = lhs;
  c.rhs = rhs;
  c.status = lhs == rhs ? CheckStatus::Pass : CheckStatus::Fail;
  return c;
}

TheoremCheck make_skip(std::string theorem, std::string case_id, std::optional<double> alpha, std::string reason) {
  TheoremCheck c;
  c.theorem = std::move(theorem);
  c.case_id = std::move(case_id);
  c.alpha = alpha;
  c.status = CheckStatus::Skip;
  c.reason = std::move(reason);
  return c;
}

const std::vector<std::string>& theorem_ids() {
  static const std::vector<std::string> ids = {"nodal-def", "nodal-def-cor", "robin-def", "mor-robin", "sf-sf",
                                               "sf-hba",    "paths-6",       "beta-beta", "sf-beta",   "sf-wind"};
  return ids;
}

MetricGraph random_graph(std::uint64_t seed, const RandomGraphParams& params) {
  if (params.min_vertices < 1 || params.max_vertices < params.min_vertices ||
      params.max_edges < params.max_vertices - 1 || params.max_edges < 1 || !(params.min_length > 0.0) ||
      params.max_length < params.min_length) {
    throw std::invalid_argument("random graph parameters out of range");
  }
  std::mt19937_64 rng(seed);
  const int nv = std::uniform_int_distribution<int>(params.min_vertices, params.max_vertices)(rng);
  const int ne = std::uniform_int_distribution<int>(std::max(1, nv - 1), params.max_edges)(rng);
  std::uniform_real_distribution<double> length(params.min_length, params.max_length);
  std::vector<Edge> edges;
  // A random tree keeps the graph connected; the remaining edges may be loops or parallel.
  for (int v = 1; v < nv; ++v) {
    const int u = std::uniform_int_distribution<int>(0, v - 1)(rng);
    const bool flip = std::bernoulli_distribution(0.5)(rng);
    edges.push_back({flip ? v : u, flip ? u : v, length(rng)});
  }
  std::uniform_int_distribution<int> pick(0, nv - 1);
  while (static_cast<int>(edges.size()) < ne) {
    const int u = pick(rng);
    const int w = pick(rng);
    edges.push_back({u, w, length(rng)});
  }
  std::vector<std::string> ids;
  for (int v = 0; v < nv; ++v) ids.push_back("v" + std::to_string(v));
  return orient_for_degree_two(MetricGraph(std::move(ids), std::move(edges)));
}

MetricGraph interval_fixture() { return MetricGraph({"a", "b"}, {{0, 1, kPi}}); }

MetricGraph star_fixture() { return MetricGraph({"o", "x", "y", "z"}, {{0, 1, 1.0}, {0, 2, 1.3}, {0, 3, 1.7}}); }

MetricGraph cycle_fixture() { return MetricGraph({"a"}, {{0, 0, 2.0 * kPi}}); }

MetricGraph lasso_fixture() { return MetricGraph({"a", "b"}, {{0, 0, 1.7}, {0, 1, 1.1}}); }

MetricGraph two_cycle_fixture() {
  return MetricGraph({"a", "b", "c"}, {{0, 1, 1.0}, {1, 0, 1.35}, {1, 2, 1.2}, {2, 1, 1.55}});
}

std::vector<PointOnGraph> two_cycle_cut_a(const MetricGraph& g) {
  return {PointOnGraph::at_vertex(g, g.vertex_index("a")), PointOnGraph::at_vertex(g, g.vertex_index("c"))};
}

std::vector<PointOnGraph> two_cycle_cut_b(const MetricGraph& g) {
  return {PointOnGraph::at_vertex(g, g.vertex_index("a")), PointOnGraph::interior(1, 0.5 * g.length(1))};
}

std::vector<GraphCase> fixture_cases() {
  return {{"interval", interval_fixture(), 101, true},
          {"star", star_fixture(), 102, true},
          {"cycle", cycle_fixture(), 103, true},
          {"lasso", lasso_fixture(), 104, true},
          {"two-cycle", two_cycle_fixture(), 105, true}};
}

GraphCase random_case(std::uint64_t seed, const RandomGraphParams& params) {
  return {"seed-" + std::to_string(seed), random_graph(seed, params), seed, false};
}

EigenTarget eigen_target(const MetricGraph& g, double lambda) {
  EigenTarget t;
  t.H = nk_problem(g);
  const SpectralCounts counts = spectral_counts(t.H, lambda);
  t.lambda = counts.lambda;
  t.n = counts.n;
  t.N = counts.N;
  t.mult = counts.mult;
  t.basis = eigenfunction(t.H, t.lambda, t.mult);
  for (const EigenFunction& f : t.basis) t.generic.push_back(check_generic(t.H, f));
  return t;
}

EigenTarget select_target(const MetricGraph& g, int scan) {
  const BoundaryProblem H = nk_problem(g);
  const double bound = std::pow(kPi / g.min_length(), 2);
  std::vector<Eigenvalue> found;
  double lo = bound * (1.0 + 1e-6);
  double width = 4.0 * std::sqrt(bound) + 4.0;
  for (int attempt = 0; attempt < 12 && static_cast<int>(found.size()) < scan; ++attempt) {
    try {
      const EigenvalueList list = eigenvalues_in(H, lo, lo + width);
      for (const Eigenvalue& e : list.values) found.push_back(e);
      lo += width;
    } catch (const WindowGuardError&) {
      lo += 1e-5 * std::max(1.0, lo);
      width *= 1.01;
    }
  }
  if (found.empty()) throw SolverError("no eigenvalue above the genericity bound");
  if (static_cast<int>(found.size()) > scan) found.resize(scan);
  std::optional<EigenTarget> first;
  for (const Eigenvalue& e : found) {
    EigenTarget t = eigen_target(g, e.lambda);
    const bool generic = std::all_of(t.generic.begin(), t.generic.end(), [](const GenericityReport& r) {
      return r.generic();
    });
    if (generic) return t;
    if (!first) first = std::move(t);
  }
  return *first;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> a;
  for (int k = 0; k < 8; ++k) a.push_back(k * kPi / 8.0);
  return a;
}

namespace {

// Robin points of f with their domains, placement and certified epsilon.
struct RobinSetup {
  RobinPointSet points;
  int nu = 0;
  int beta_cut = 0;
  PlacedPoints placed;
  EpsilonChoice eps;
};

RobinSetup robin_setup(const EigenTarget& target, const EigenFunction& f, double alpha) {
  const MetricGraph& g = target.H.graph;
  RobinSetup s;
  s.points = robin_points(g, f, alpha);
  const RobinDomainPartition dom = robin_domains(g, s.points);
  s.nu = dom.nu;
  s.beta_cut = betti(dom.cut.cut.graph);
  s.placed = place_points(g, s.points.points);
  const DecoupledProblem dec = decoupled_problem(s.placed.sub.graph, s.placed.B, alpha);
  s.eps = epsilon_select(target.H, dec.problem, target.lambda);
  if (!s.eps.certified) throw SolverError("epsilon window not certified");
  return s;
}

// Runs the body for each admissible basis vector, turning errors into skips.
template <typename Body>
void for_each_basis(const GraphCase& c, const EigenTarget& target, const std::vector<std::string>& theorems,
                    std::optional<double> alpha, std::vector<TheoremCheck>& out, Body body) {
  const auto skip_all = [&](const std::string& id, const std::string& reason) {
    for (const std::string& th : theorems) out.push_back(make_skip(th, id, alpha, reason));
  };
  if (target.mult > HarnessOptions{}.max_basis) {
    skip_all(c.id, "eigenspace dimension " + std::to_string(target.mult) + " above 3");
    return;
  }
  for (int k = 0; k < static_cast<int>(target.basis.size()); ++k) {
    const std::string id = target.mult > 1 ? suffix(c.id, "f" + std::to_string(k)) : c.id;
    try {
      body(id, target.basis[k], target.generic[k]);
    } catch (const GenericityError& e) {
      skip_all(id, std::string("genericity: ") + e.what());
    } catch (const IllDefinedLevel& e) {
      skip_all(id, std::string("ill-defined level: ") + e.what());
    } catch (const SolverError& e) {
      skip_all(id, std::string("solver: ") + e.what());
    }
  }
}

}  // namespace

std::vector<TheoremCheck> verify_nodal_def(const GraphCase& c, const EigenTarget& target) {
  std::vector<TheoremCheck> out;
  const int beta = betti(target.H.graph);
  for_each_basis(c, target, {"nodal-def", "nodal-def-cor"}, std::nullopt, out,
                 [&](const std::string& id, const EigenFunction& f, const GenericityReport& gen) {
                   if (!gen.vertex_nonvanishing) {
                     throw GenericityError("eigenfunction vanishes at a vertex of degree > 2");
                   }
                   const RobinSetup s = robin_setup(target, f, 0.0);
                   const double lam = target.lambda;
                   const MetricGraph& sub = s.placed.sub.graph;
                   const Inertia up = robin_matrix(sub, s.placed.B, 0.0, lam + s.eps.epsilon).inertia;
                   const Inertia down = robin_matrix(sub, s.placed.B, 0.0, lam - s.eps.epsilon).inertia;
                   out.push_back(make_check("nodal-def", suffix(id, "upper"), std::nullopt, target.N - s.nu, up.mor));
                   out.push_back(make_check("nodal-def", suffix(id, "n-1"), std::nullopt, target.n - 1, down.mor));
                   out.push_back(make_check("nodal-def", suffix(id, "deficiency"), std::nullopt, target.n - s.nu,
                                            beta - s.beta_cut - down.pos));
                   if (gen.generic()) {
                     out.push_back(make_check("nodal-def-cor", id, std::nullopt, target.n - s.nu, beta - down.pos));
                   } else {
                     out.push_back(make_skip("nodal-def-cor", id, std::nullopt, "eigenvalue below (pi / l_min)^2"));
                   }
                 });
  return out;
}

namespace {

// Robin setup at alpha; on a genericity failure alpha is moved by 1e-3 once.
RobinSetup robin_setup_perturbed(const EigenTarget& target, const EigenFunction& f, double* alpha) {
  try {
    return robin_setup(target, f, *alpha);
  } catch (const GenericityError&) {
    *alpha += 1e-3;
    return robin_setup(target, f, *alpha);
  }
}

void require_generic(const GenericityReport& gen) {
  if (!gen.above_bound) throw GenericityError("eigenvalue below (pi / l_min)^2");
  if (!gen.vertex_nonvanishing) throw GenericityError("eigenfunction vanishes at a vertex of degree > 2");
}

}  // namespace

std::vector<TheoremCheck> verify_robin_def(const GraphCase& c, const EigenTarget& target,
                                           const std::vector<double>& alphas) {
  std::vector<TheoremCheck> out;
  for (double alpha0 : alphas) {
    for_each_basis(c, target, {"robin-def"}, alpha0, out,
                   [&](const std::string& id, const EigenFunction& f, const GenericityReport& gen) {
                     require_generic(gen);
                     const RobinSetup s0 = robin_setup(target, f, 0.0);
                     double alpha = alpha0;
                     const RobinSetup s = robin_setup_perturbed(target, f, &alpha);
                     const Inertia up =
                         robin_matrix(s.placed.sub.graph, s.placed.B, alpha, target.lambda + s.eps.epsilon).inertia;
                     out.push_back(make_check("robin-def", id, alpha, target.N - s.nu, s0.points.size() - up.pos));
                   });
  }
  return out;
}

std::vector<TheoremCheck> verify_mor_robin(const GraphCase& c, const EigenTarget& target,
                                           const std::vector<double>& alphas) {
  std::vector<TheoremCheck> out;
  for (double alpha0 : alphas) {
    for_each_basis(
        c, target, {"mor-robin", "sf-sf"}, alpha0, out,
        [&](const std::string& id, const EigenFunction& f, const GenericityReport& gen) {
          require_generic(gen);
          const RobinSetup s0 = robin_setup(target, f, 0.0);
          double alpha = alpha0;
          const RobinSetup s = robin_setup_perturbed(target, f, &alpha);
          const MetricGraph& sub = s.placed.sub.graph;
          const double up = target.lambda + s.eps.epsilon;
          const double down = target.lambda - s.eps.epsilon;
          const int deficiency = target.N - s0.nu;
          const int pos_rhs = s0.points.size() - target.n + 1;
          out.push_back(make_check("mor-robin", suffix(id, "mor"), alpha, robin_matrix(sub, s.placed.B, alpha, up).inertia.mor,
                                   deficiency));
          out.push_back(make_check("mor-robin", suffix(id, "pos"), alpha,
                                   robin_matrix(sub, s.placed.B, alpha, down).inertia.pos, pos_rhs));
          const SFResult a = sf_via_tracking(sub, s.placed.B, alpha, up, ParameterInterval::zero_to_inf());
          const SFResult b = sf_via_tracking(sub, s.placed.B, alpha, down, ParameterInterval::inf_to_zero());
          out.push_back(make_check("sf-sf", suffix(id, "plus"), alpha, a.sf, deficiency));
          out.push_back(make_check("sf-sf", suffix(id, "minus"), alpha, b.sf, pos_rhs));
        });
  }
  return out;
}

namespace {

std::uint64_t case_stream(const GraphCase& c, std::uint64_t salt) {
  return c.seed * 0x9E3779B97F4A7C15ULL + salt;
}

std::vector<PointOnGraph> random_points(const MetricGraph& g, int count, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> edge(0, g.num_edges() - 1);
  std::uniform_real_distribution<double> frac(0.1, 0.9);
  std::vector<PointOnGraph> pts;
  for (int i = 0; i < count; ++i) {
    const int e = edge(rng);
    pts.push_back(PointOnGraph::interior(e, frac(rng) * g.length(e)));
  }
  return pts;
}

// A level off the spectrum of H and of the decoupled problem.
std::optional<double> random_level(const MetricGraph& g, const PlacedPoints& placed, double alpha, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> level(-1.0, 20.0);
  const BoundaryProblem H = nk_problem(g);
  for (int attempt = 0; attempt < 20; ++attempt) {
    const double mu = level(rng);
    const double gap = 1e-3 * std::max(1.0, std::abs(mu));
    if (count_safety(g, mu - gap) < 1e-6 || count_safety(g, mu + gap) < 1e-6) continue;
    if (count_below(H, mu - gap) != count_below(H, mu + gap)) continue;
    if (!is_well_defined(placed.sub.graph, placed.B, alpha, mu)) continue;
    return mu;
  }
  return std::nullopt;
}

}  // namespace

std::vector<TheoremCheck> verify_sf_hba_set(const std::string& case_id, const MetricGraph& g,
                                            const std::vector<PointOnGraph>& pts, double alpha, double mu,
                                            bool half_intervals) {
  std::vector<TheoremCheck> out;
  const PlacedPoints placed = place_points(g, pts);
  const MetricGraph& sub = placed.sub.graph;
  const int size = static_cast<int>(placed.B.size());
  const SFResult robin = sf_via_robin(sub, placed.B, alpha, mu, ParameterInterval::full_loop());
  const SFResult track = sf_via_tracking(sub, placed.B, alpha, mu, ParameterInterval::full_loop());
  out.push_back(make_check("sf-hba", suffix(case_id, "robin"), alpha, robin.sf, size));
  out.push_back(make_check("sf-hba", suffix(case_id, "tracking"), alpha, track.sf, size));
  if (half_intervals) {
    const Inertia in = robin_matrix(sub, placed.B, alpha, mu).inertia;
    if (in.null != 0) {
      out.push_back(make_skip("sf-hba", suffix(case_id, "half"), alpha, "level in the spectrum of H"));
    } else {
      const SFResult a = sf_via_tracking(sub, placed.B, alpha, mu, ParameterInterval::zero_to_inf());
      const SFResult b = sf_via_tracking(sub, placed.B, alpha, mu, ParameterInterval::inf_to_zero());
      out.push_back(make_check("sf-hba", suffix(case_id, "mor"), alpha, a.sf, in.mor));
      out.push_back(make_check("sf-hba", suffix(case_id, "pos"), alpha, b.sf, in.pos));
    }
  }
  return out;
}

std::vector<TheoremCheck> verify_sf_hba(const GraphCase& c, const std::vector<double>& alphas, bool half_intervals) {
  std::vector<TheoremCheck> out;
  std::mt19937_64 rng(case_stream(c, 1));
  for (int size = 1; size <= 3; ++size) {
    const std::vector<PointOnGraph> pts = random_points(c.graph, size, rng);
    const PlacedPoints placed = place_points(c.graph, pts);
    for (double alpha : alphas) {
      const std::string id = suffix(c.id, "B" + std::to_string(size));
      try {
        const std::optional<double> mu = random_level(c.graph, placed, alpha, rng);
        if (!mu) {
          out.push_back(make_skip("sf-hba", id, alpha, "no admissible level after 20 draws"));
          continue;
        }
        const std::vector<TheoremCheck> r = verify_sf_hba_set(id, c.graph, pts, alpha, *mu, half_intervals);
        out.insert(out.end(), r.begin(), r.end());
      } catch (const SolverError& e) {
        out.push_back(make_skip("sf-hba", id, alpha, std::string("solver: ") + e.what()));
      }
    }
  }
  return out;
}

namespace {

// Smallest eigenvalue above 1e-6, capped at `cap`.
double first_positive(const BoundaryProblem& p, double cap) {
  const int zeros = p.graph.num_components();
  const std::vector<double> ev = lowest_eigenvalues(p, zeros + 1);
  for (double x : ev) {
    if (x > 1e-6) return std::min(x, cap);
  }
  return cap;
}

}  // namespace

std::vector<TheoremCheck> verify_beta_beta(const std::string& case_id, const MetricGraph& g,
                                           const std::vector<PointOnGraph>& pts) {
  std::vector<TheoremCheck> out;
  const double alpha = 0.5 * kPi;
  try {
    const PlacedPoints placed = place_points(g, pts);
    const MetricGraph& sub = placed.sub.graph;
    const int rhs = betti(g) - betti(cut_at_vertices(sub, placed.B).graph);
    const DecoupledProblem dec = decoupled_problem(sub, placed.B, alpha);
    const double eps = 0.5 * std::min(first_positive(nk_problem(sub), 0.2), first_positive(dec.problem, 0.2));
    out.push_back(make_check("beta-beta", suffix(case_id, "mor"), alpha,
                             robin_matrix(sub, placed.B, alpha, eps).inertia.mor, rhs));
    out.push_back(make_check("beta-beta", suffix(case_id, "sf"), alpha,
                             sf_via_tracking(sub, placed.B, alpha, eps, ParameterInterval::zero_to_inf()).sf, rhs));
  } catch (const SolverError& e) {
    out.push_back(make_skip("beta-beta", case_id, alpha, std::string("solver: ") + e.what()));
  }
  return out;
}

TheoremCheck verify_sf_beta(const GraphCase& c, const EigenTarget& target, double alpha, int* crossings) {
  if (target.mult != 1) return make_skip("sf-beta", c.id, alpha, "eigenvalue not simple");
  try {
    require_generic(target.generic[0]);
    const EigenFunction& f = target.basis[0];
    const RobinSetup s = robin_setup_perturbed(target, f, &alpha);
    const MetricGraph& sub = s.placed.sub.graph;
    // Finite crossings sit near t = -kappa for the Robin map just off lambda;
    // eigenvalues that blow up as the offset shrinks belong to t = infinity.
    double tmax = 0.0;
    for (double sign : {-1.0, 1.0}) {
      const double e1 = 0.25 * s.eps.epsilon;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> k1(
          robin_matrix(sub, s.placed.B, alpha, target.lambda + sign * e1).matrix, Eigen::EigenvaluesOnly);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> k2(
          robin_matrix(sub, s.placed.B, alpha, target.lambda + sign * 0.1 * e1).matrix, Eigen::EigenvaluesOnly);
      for (int i = 0; i < k1.eigenvalues().size(); ++i) {
        const double a = std::abs(k1.eigenvalues()(i));
        const double b = std::abs(k2.eigenvalues()(i));
        if (b <= 2.0 * a + 1.0) tmax = std::max({tmax, a, b});
      }
    }
    const double T = 2.0 * tmax + 1.0;
    const double theta = 2.0 * std::atan(T);
    TrackingOptions opts;
    opts.singular = wrap_angles(-theta, theta, std::abs(std::sin(alpha)) > 1e-12);
    const SFResult r = sf_via_tracking(delta_family(sub, s.placed.B, alpha), -theta, theta, target.lambda, opts);
    if (crossings) *crossings = static_cast<int>(r.crossings.size());
    return make_check("sf-beta", c.id, alpha, r.sf, betti(c.graph));
  } catch (const GenericityError& e) {
    return make_skip("sf-beta", c.id, alpha, std::string("genericity: ") + e.what());
  } catch (const SolverError& e) {
    return make_skip("sf-beta", c.id, alpha, std::string("solver: ") + e.what());
  }
}

std::vector<TheoremCheck> verify_beta_theorems(const GraphCase& c, const EigenTarget& target) {
  std::vector<TheoremCheck> out;
  const auto add = [&](const std::vector<TheoremCheck>& r) { out.insert(out.end(), r.begin(), r.end()); };
  if (c.fixture && c.id == "two-cycle") {
    add(verify_beta_beta(suffix(c.id, "cut-a"), c.graph, two_cycle_cut_a(c.graph)));
    add(verify_beta_beta(suffix(c.id, "cut-b"), c.graph, two_cycle_cut_b(c.graph)));
  } else {
    std::mt19937_64 rng(case_stream(c, 2));
    for (int size = 1; size <= 3; ++size) {
      add(verify_beta_beta(suffix(c.id, "B" + std::to_string(size)), c.graph, random_points(c.graph, size, rng)));
    }
  }
  for (double alpha : {0.0, 0.25 * kPi}) {
    int crossings = 0;
    TheoremCheck sf = verify_sf_beta(c, target, alpha, &crossings);
    const bool ran = sf.status != CheckStatus::Skip;
    out.push_back(sf);
    if (ran) {
      out.push_back(make_check("sf-beta", suffix(c.id, "finite-crossings"), sf.alpha, crossings, betti(c.graph)));
    }
  }
  return out;
}

std::vector<TheoremCheck> verify_paths6(const GraphCase& c, const EigenTarget& target, double alpha0) {
  std::vector<TheoremCheck> out;
  for_each_basis(c, target, {"paths-6"}, alpha0, out,
                 [&](const std::string& id, const EigenFunction& f, const GenericityReport& gen) {
                   require_generic(gen);
                   const RobinSetup s0 = robin_setup(target, f, 0.0);
                   double alpha = alpha0;
                   const RobinSetup sa = robin_setup_perturbed(target, f, &alpha);
                   const double eps = std::min(s0.eps.epsilon, sa.eps.epsilon);
                   const int p0 = s0.points.size();
                   const int pa = sa.points.size();
                   const MetricGraph& g = target.H.graph;
                   // Expected values indexed by (I = +inf, I' = +inf).
                   const std::map<std::pair<bool, bool>, int> plus = {
                       {{true, true}, 0}, {{false, true}, p0}, {{true, false}, -pa}, {{false, false}, p0 - pa}};
                   const std::map<std::pair<bool, bool>, int> minus = {
                       {{false, false}, 0}, {{false, true}, pa}, {{true, false}, -p0}, {{true, true}, pa - p0}};
                   std::map<std::pair<bool, bool>, int> got_plus;
                   std::map<std::pair<bool, bool>, int> got_minus;
                   const auto name = [](bool i, bool ip) {
                     return std::string(i ? "+" : "-") + (ip ? "+" : "-");
                   };
                   for (const auto& [key, expected] : plus) {
                     const int v = sf_composite(g, s0.points, sa.points, alpha, target.lambda + eps, key.first,
                                                key.second)
                                       .sf;
                     got_plus[key] = v;
                     out.push_back(make_check("paths-6", suffix(id, "up" + name(key.first, key.second)), alpha, v,
                                              expected));
                   }
                   for (const auto& [key, expected] : minus) {
                     const int v = sf_composite(g, s0.points, sa.points, alpha, target.lambda - eps, key.first,
                                                key.second)
                                       .sf;
                     got_minus[key] = v;
                     out.push_back(make_check("paths-6", suffix(id, "down" + name(key.first, key.second)), alpha, v,
                                              expected));
                   }
                   for (const auto& [key, v] : got_plus) {
                     const int w = got_minus.at({!key.first, !key.second});
                     out.push_back(make_check("paths-6", suffix(id, "antisym" + name(key.first, key.second)), alpha,
                                              v, -w));
                   }
                 });
  return out;
}

std::vector<TheoremCheck> verify_sf_wind(const GraphCase& c) {
  std::vector<TheoremCheck> out;
  std::mt19937_64 rng(case_stream(c, 3));
  const std::vector<double> grid = default_alpha_grid();
  for (int size = 1; size <= 2; ++size) {
    const double alpha = grid[std::uniform_int_distribution<std::size_t>(0, grid.size() - 1)(rng)];
    const std::vector<PointOnGraph> pts = random_points(c.graph, size, rng);
    const PlacedPoints placed = place_points(c.graph, pts);
    const std::string id = suffix(c.id, "B" + std::to_string(size));
    try {
      const std::optional<double> mu = random_level(c.graph, placed, alpha, rng);
      if (!mu) {
        out.push_back(make_skip("sf-wind", id, alpha, "no admissible level after 20 draws"));
        continue;
      }
      const ProblemFamily fam = delta_family(placed.sub.graph, placed.B, alpha);
      for (int m = 1; m <= 3; ++m) {
        TrackingOptions opts;
        opts.singular = wrap_angles(-kPi, -kPi + 2.0 * kPi * m, std::abs(std::sin(alpha)) > 1e-12);
        const SfWindResult r = sf_wind_check(fam, -kPi, -kPi + 2.0 * kPi * m, *mu, opts);
        out.push_back(make_check("sf-wind", suffix(id, "m" + std::to_string(m)), alpha, r.sf.sf, r.wind));
      }
    } catch (const SolverError& e) {
      out.push_back(make_skip("sf-wind", id, alpha, std::string("solver: ") + e.what()));
    }
  }
  if (c.fixture && c.id == "interval") {
    const ProblemFamily fam = single_edge_loop(kPi);
    for (int m = 1; m <= 3; ++m) {
      TrackingOptions opts;
      opts.singular = wrap_angles(0.0, 2.0 * kPi * m, false);
      const SfWindResult r = sf_wind_check(fam, 0.0, 2.0 * kPi * m, 0.7, opts);
      out.push_back(make_check("sf-wind", "single-edge/m" + std::to_string(m), std::nullopt, r.sf.sf, r.wind));
    }
  }
  return out;
}

int HarnessReport::count(CheckStatus s) const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [&](const TheoremCheck& c) {
    return c.status == s;
  }));
}

double HarnessReport::random_skip_fraction() const {
  int total = 0;
  int skipped = 0;
  for (const TheoremCheck& c : checks) {
    if (c.case_id.rfind("seed-", 0) != 0) continue;
    ++total;
    if (c.status == CheckStatus::Skip) ++skipped;
  }
  return total == 0 ? 0.0 : static_cast<double>(skipped) / total;
}

bool HarnessReport::ok() const { return count(CheckStatus::Fail) == 0 && random_skip_fraction() <= skip_ceiling; }

namespace {

enum class Group { Nodal, RobinDef, MorRobin, SfHba, Paths6, Beta, SfWind };

Group group_of(const std::string& theorem) {
  if (theorem == "nodal-def" || theorem == "nodal-def-cor") return Group::Nodal;
  if (theorem == "robin-def") return Group::RobinDef;
  if (theorem == "mor-robin" || theorem == "sf-sf") return Group::MorRobin;
  if (theorem == "sf-hba") return Group::SfHba;
  if (theorem == "paths-6") return Group::Paths6;
  if (theorem == "beta-beta" || theorem == "sf-beta") return Group::Beta;
  if (theorem == "sf-wind") return Group::SfWind;
  throw std::invalid_argument("unknown theorem id '" + theorem + "'");
}

std::vector<TheoremCheck> run_case(const GraphCase& c, const std::vector<Group>& groups, const HarnessOptions& opts) {
  std::vector<TheoremCheck> out;
  const auto add = [&](const std::vector<TheoremCheck>& r) { out.insert(out.end(), r.begin(), r.end()); };
  const std::vector<double> alphas = opts.alphas.empty() ? default_alpha_grid() : opts.alphas;
  const bool needs_target = std::any_of(groups.begin(), groups.end(), [](Group g) {
    return g != Group::SfHba && g != Group::SfWind;
  });
  std::optional<EigenTarget> target;
  std::string target_error;
  if (needs_target) {
    try {
      target = select_target(c.graph);
    } catch (const SolverError& e) {
      target_error = std::string("solver: ") + e.what();
    }
  }
  for (Group g : groups) {
    if (g != Group::SfHba && g != Group::SfWind && !target) {
      for (const std::string& th : theorem_ids()) {
        if (group_of(th) == g) out.push_back(make_skip(th, c.id, std::nullopt, target_error));
      }
      continue;
    }
    switch (g) {
      case Group::Nodal:
        add(verify_nodal_def(c, *target));
        break;
      case Group::RobinDef:
        add(verify_robin_def(c, *target, alphas));
        break;
      case Group::MorRobin:
        add(verify_mor_robin(c, *target, alphas));
        break;
      case Group::SfHba:
        add(verify_sf_hba(c, alphas, opts.half_intervals));
        break;
      case Group::Paths6:
        for (double a : {0.25 * kPi, 0.5 * kPi}) add(verify_paths6(c, *target, a));
        break;
      case Group::Beta:
        add(verify_beta_theorems(c, *target));
        break;
      case Group::SfWind:
        add(verify_sf_wind(c));
        break;
    }
  }
  return out;
}

}  // namespace

HarnessReport run_harness(const HarnessConfig& config) {
  std::vector<Group> groups;
  if (config.theorem == "all") {
    groups = {Group::Nodal, Group::RobinDef, Group::MorRobin, Group::SfHba, Group::Paths6, Group::Beta, Group::SfWind};
  } else {
    groups = {group_of(config.theorem)};
  }
  std::vector<GraphCase> cases;
  if (config.fixtures) cases = fixture_cases();
  for (int i = 0; i < config.trials; ++i) cases.push_back(random_case(config.seed + static_cast<std::uint64_t>(i)));

  std::vector<std::vector<TheoremCheck>> results(cases.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < cases.size(); i = next++) {
      try {
        results[i] = run_case(cases[i], groups, config.options);
      } catch (const std::exception& e) {
        results[i] = {make_skip(config.theorem, cases[i].id, std::nullopt, std::string("error: ") + e.what())};
      }
    }
  };
  const int jobs = std::max(1, config.jobs);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  HarnessReport report;
  report.random_cases = config.trials;
  const std::vector<std::string>& ids = theorem_ids();
  std::vector<std::pair<std::size_t, TheoremCheck>> tagged;
  for (std::size_t i = 0; i < results.size(); ++i) {
    for (TheoremCheck& c : results[i]) {
      c.seed = cases[i].seed;
      if (config.theorem != "all" && c.theorem != config.theorem) continue;
      tagged.emplace_back(i, std::move(c));
    }
  }
  const auto rank = [&](const std::string& th) {
    return std::find(ids.begin(), ids.end(), th) - ids.begin();
  };
  std::stable_sort(tagged.begin(), tagged.end(), [&](const auto& a, const auto& b) {
    const auto ra = rank(a.second.theorem);
    const auto rb = rank(b.second.theorem);
    if (ra != rb) return ra < rb;
    return a.first < b.first;
  });
  for (auto& [i, c] : tagged) report.checks.push_back(std::move(c));
  return report;
}

}  // namespace qg
