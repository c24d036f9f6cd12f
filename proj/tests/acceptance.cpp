// One pass/fail line per acceptance criterion; exit status 1 when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qg/conditions.hpp"
#include "qg/edge_basis.hpp"
#include "qg/errors.hpp"
#include "qg/harness.hpp"
#include "qg/robin_map.hpp"
#include "qg/solver.hpp"
#include "qg/spectral_flow.hpp"

namespace {

using namespace qg;

constexpr double kPi = std::numbers::pi;

// Pinned tolerances and budgets.
constexpr double kSpectrumTol = 1e-9;
constexpr double kSpectrumBudget = 1.0;
constexpr double kLoopBudget = 120.0;
constexpr double kNodalBudget = 300.0;
constexpr double kRobinBudget = 600.0;
constexpr double kNodalCleanFraction = 0.9;
constexpr double kDetTol = 1e-10;
constexpr double kSymmetryTol = 1e-8;
constexpr double kPlantDip = 1e-7;
constexpr double kWronskianTol = 1e-12;
constexpr double kSubdivisionTol = 1e-8;
constexpr double kInterlaceTol = 1e-8;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool genericity_skip(const TheoremCheck& c) {
  return c.reason.rfind("genericity", 0) == 0 || c.reason.find("(pi / l_min)^2") != std::string::npos;
}

struct Tally {
  int pass = 0;
  int fail = 0;
  int generic_skip = 0;
  int other_skip = 0;
  std::string first_problem;

  void add(const TheoremCheck& c) {
    if (c.status == CheckStatus::Pass) {
      ++pass;
    } else if (c.status == CheckStatus::Fail) {
      ++fail;
      note(c, "fail lhs " + std::to_string(c.lhs) + " rhs " + std::to_string(c.rhs));
    } else if (genericity_skip(c)) {
      ++generic_skip;
    } else {
      ++other_skip;
      note(c, "skip: " + c.reason);
    }
  }
  void note(const TheoremCheck& c, const std::string& what) {
    if (first_problem.empty()) first_problem = c.theorem + " " + c.case_id + " " + what;
  }
  bool clean() const { return fail == 0 && other_skip == 0; }
  std::string summary() const {
    std::string s = std::to_string(pass) + " pass, " + std::to_string(fail) + " fail, " +
                    std::to_string(generic_skip) + " genericity skips, " + std::to_string(other_skip) + " other skips";
    if (!first_problem.empty()) s += "; first problem: " + first_problem;
    return s;
  }
};

HarnessReport harness(const std::string& theorem, int trials, bool fixtures) {
  HarnessConfig config;
  config.theorem = theorem;
  config.trials = trials;
  config.seed = 1;
  config.fixtures = fixtures;
  return run_harness(config);
}

// 1. Interval spectra.
Outcome criterion1() {
  Outcome o;
  const MetricGraph g = interval_fixture();
  const std::vector<double> nk = lowest_eigenvalues(nk_problem(g), 5);
  const std::vector<double> dir = lowest_eigenvalues(BoundaryProblem(g, {RobinFixed{0.0}, RobinFixed{0.0}}), 5);
  double err = 0.0;
  for (int k = 0; k < 5; ++k) {
    err = std::max(err, std::abs(nk[k] - k * k));
    err = std::max(err, std::abs(dir[k] - (k + 1) * (k + 1)));
  }
  o.pass = err <= kSpectrumTol;
  o.detail = "max error " + std::to_string(err);
  return o;
}

// 2. Loop identity on 50 random graphs, 8 angles, |B| in {1, 2, 3}, both methods.
Outcome criterion2() {
  Outcome o;
  Tally t;
  std::map<std::string, std::pair<long, long>> methods;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    for (const TheoremCheck& c : verify_sf_hba(random_case(seed), default_alpha_grid(), false)) {
      t.add(c);
      const std::string key = c.case_id.substr(0, c.case_id.rfind('/')) + "@" + std::to_string(*c.alpha);
      if (c.case_id.ends_with("/robin")) methods[key].first = c.lhs;
      if (c.case_id.ends_with("/tracking")) methods[key].second = c.lhs;
    }
  }
  int disagree = 0;
  for (const auto& [key, v] : methods) disagree += v.first != v.second;
  const int expected = 50 * 8 * 3;
  o.pass = t.clean() && t.generic_skip == 0 && static_cast<int>(methods.size()) == expected && disagree == 0;
  o.detail = std::to_string(methods.size()) + "/" + std::to_string(expected) + " sets, " + std::to_string(disagree) +
             " disagreements; " + t.summary();
  return o;
}

// 3. Nodal identities on the fixtures and 100 random graphs.
Outcome criterion3() {
  Outcome o;
  Tally fixtures;
  Tally random;
  std::map<std::string, bool> case_clean;
  for (const std::string th : {"nodal-def", "nodal-def-cor"}) {
    for (const TheoremCheck& c : harness(th, 100, true).checks) {
      const bool fixture = c.case_id.rfind("seed-", 0) != 0;
      (fixture ? fixtures : random).add(c);
      if (!fixture) {
        const std::string key = "seed-" + std::to_string(c.seed);
        auto [it, inserted] = case_clean.emplace(key, true);
        if (c.status != CheckStatus::Pass) it->second = false;
      }
    }
  }
  const int clean = static_cast<int>(std::count_if(case_clean.begin(), case_clean.end(), [](const auto& kv) { return kv.second; }));
  const double fraction = case_clean.empty() ? 0.0 : static_cast<double>(clean) / 100.0;
  o.pass = fixtures.clean() && fixtures.generic_skip == 0 && random.clean() && fraction >= kNodalCleanFraction;
  o.detail = "fixtures: " + fixtures.summary() + " | random: " + random.summary() + ", skip-free graphs " +
             std::to_string(clean) + "/100";
  return o;
}

// 4. Robin identities per angle and their angle independence.
Outcome criterion4() {
  Outcome o;
  Tally t;
  // (identity, case) -> values over the angle grid; robin-def depends on alpha through nu_alpha.
  std::map<std::string, std::set<long>> invariant;
  for (const std::string th : {"robin-def", "mor-robin", "sf-sf"}) {
    for (const TheoremCheck& c : harness(th, 100, true).checks) {
      t.add(c);
      if (c.status != CheckStatus::Pass || th == "robin-def") continue;
      const std::string key = th + " " + c.case_id;
      invariant[key].insert(c.lhs);
      invariant[key].insert(c.rhs);
    }
  }
  int varying = 0;
  std::string first;
  for (const auto& [key, values] : invariant) {
    if (values.size() != 1) {
      ++varying;
      if (first.empty()) first = key;
    }
  }
  o.pass = t.clean() && varying == 0 && t.pass > 0;
  o.detail = t.summary() + "; " + std::to_string(invariant.size()) + " (case, identity) groups, " +
             std::to_string(varying) + " vary with alpha" + (first.empty() ? "" : " (first " + first + ")");
  return o;
}

// 5. Eight path values and antisymmetry.
Outcome criterion5() {
  Outcome o;
  Tally fixtures;
  Tally random;
  std::set<std::string> fixture_names;
  for (const TheoremCheck& c : harness("paths-6", 25, true).checks) {
    const bool fixture = c.case_id.rfind("seed-", 0) != 0;
    (fixture ? fixtures : random).add(c);
    if (fixture && c.status == CheckStatus::Pass) fixture_names.insert(c.case_id.substr(0, c.case_id.find('/')));
  }
  const bool covered = fixture_names.count("interval") && fixture_names.count("star") && fixture_names.count("cycle") &&
                       fixture_names.count("lasso");
  o.pass = fixtures.clean() && fixtures.generic_skip == 0 && covered && random.clean();
  o.detail = "fixtures: " + fixtures.summary() + " | random: " + random.summary();
  return o;
}

// 6. Two-cycle cut sets and the lasso.
Outcome criterion6() {
  Outcome o;
  const MetricGraph g = two_cycle_fixture();
  std::string detail;
  const auto sf_of = [](const std::vector<TheoremCheck>& r) {
    for (const TheoremCheck& c : r) {
      if (c.case_id.ends_with("/sf") && c.status != CheckStatus::Skip) return c.lhs;
    }
    return -999L;
  };
  const long a = sf_of(verify_beta_beta("two-cycle-cut-a", g, two_cycle_cut_a(g)));
  const long b = sf_of(verify_beta_beta("two-cycle-cut-b", g, two_cycle_cut_b(g)));
  o.pass = a == 2 && b == 1;
  detail = "cut A sf " + std::to_string(a) + ", cut B sf " + std::to_string(b);

  const GraphCase lasso{"lasso", lasso_fixture(), 104, true};
  const EigenTarget target = select_target(lasso.graph);
  for (double alpha : {0.0, 0.25 * kPi}) {
    int crossings = -1;
    const TheoremCheck c = verify_sf_beta(lasso, target, alpha, &crossings);
    const bool ok = c.status != CheckStatus::Skip && c.lhs == 1 && crossings == 1;
    o.pass = o.pass && ok;
    char buf[128];
    std::snprintf(buf, sizeof buf, "; lasso alpha %.4f sf %ld, finite crossings %d", alpha, c.lhs, crossings);
    detail += buf;
  }
  o.detail = detail;
  return o;
}

// 7. Spectral flow equals winding.
Outcome criterion7() {
  Outcome o;
  Tally t;
  for (const TheoremCheck& c : harness("sf-wind", 25, true).checks) t.add(c);

  // delta_alpha loops on a split interval for every grid angle, traversed m times.
  const MetricGraph g({"a", "m", "b"}, {{0, 1, 1.2}, {1, 2, 0.8}});
  int mismatches = 0;
  int loops = 0;
  std::vector<double> alphas = default_alpha_grid();
  alphas.push_back(2.0);
  for (double alpha : alphas) {
    const double mu = 1.7;
    const ProblemFamily fam = delta_family(g, {1}, alpha);
    for (int m = 1; m <= 3; ++m) {
      TrackingOptions opts;
      opts.singular = wrap_angles(-kPi, -kPi + 2.0 * kPi * m, std::abs(std::sin(alpha)) > 1e-12);
      const SfWindResult r = sf_wind_check(fam, -kPi, -kPi + 2.0 * kPi * m, mu, opts);
      ++loops;
      if (r.sf.sf != r.wind || r.wind != m) ++mismatches;
    }
  }

  // det U of delta_0(t) against (t - 2i) / (t + 2i).
  const std::complex<double> i(0.0, 1.0);
  double det_err = 0.0;
  for (int k = -200; k <= 200; ++k) {
    const double t = std::sinh(k / 20.0);
    const std::complex<double> d = vertex_unitary(g, 1, DeltaAlpha{0.0, t}).determinant();
    det_err = std::max(det_err, std::abs(d - (t - 2.0 * i) / (t + 2.0 * i)));
  }
  o.pass = t.clean() && t.pass > 0 && mismatches == 0 && det_err <= kDetTol;
  o.detail = "harness: " + t.summary() + "; explicit loops " + std::to_string(loops - mismatches) + "/" +
             std::to_string(loops) + "; det U max error " + std::to_string(det_err);
  return o;
}

struct RandomCase {
  MetricGraph g;
  PlacedPoints placed;
  double alpha = 0.0;
  double mu = 0.0;
};

std::vector<RandomCase> random_cases(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<RandomCase> out;
  std::uint64_t graph_seed = 1000;
  while (static_cast<int>(out.size()) < count) {
    RandomCase c;
    c.g = random_graph(graph_seed++);
    const int size = 1 + static_cast<int>(unit(rng) * 3);
    std::vector<PointOnGraph> pts;
    for (int k = 0; k < size; ++k) {
      const int e = static_cast<int>(unit(rng) * c.g.num_edges());
      pts.push_back(PointOnGraph::interior(e, (0.1 + 0.8 * unit(rng)) * c.g.length(e)));
    }
    c.placed = place_points(c.g, pts);
    c.alpha = unit(rng) * kPi;
    c.mu = -1.0 + 21.0 * unit(rng);
    if (!is_well_defined(c.placed.sub.graph, c.placed.B, c.alpha, c.mu)) continue;
    out.push_back(std::move(c));
  }
  return out;
}

// 8. Property suites.
Outcome criterion8() {
  Outcome o;
  std::vector<std::string> parts;
  const auto record = [&](const std::string& name, bool ok, const std::string& what) {
    o.pass = o.pass && ok;
    parts.push_back(name + (ok ? " ok" : " FAILED") + " (" + what + ")");
  };

  // Symmetry of the Robin map.
  double worst = 0.0;
  for (const RandomCase& c : random_cases(200, 21)) {
    worst = std::max(worst, robin_matrix(c.placed.sub.graph, c.placed.B, c.alpha, c.mu).asymmetry);
  }
  record("symmetry", worst < kSymmetryTol, "200 cases, worst " + std::to_string(worst));

  // Planting t = -kappa makes mu an eigenvalue; midway between crossings it is not.
  int planted = 0;
  int dips = 0;
  int controls = 0;
  for (const RandomCase& c : random_cases(50, 22)) {
    const MetricGraph& g = c.placed.sub.graph;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(robin_matrix(g, c.placed.B, c.alpha, c.mu).matrix);
    std::vector<double> angles;
    for (int k = 0; k < es.eigenvalues().size(); ++k) {
      const double kappa = es.eigenvalues()(k);
      ++planted;
      if (secular_indicator(delta_family_member(g, c.placed.B, c.alpha, -kappa), c.mu).sigma_min < kPlantDip) ++dips;
      angles.push_back(2.0 * std::atan(-kappa));
    }
    std::sort(angles.begin(), angles.end());
    angles.push_back(angles.front() + 2.0 * kPi);
    double mid = 0.0;
    double gap = -1.0;
    for (std::size_t k = 1; k < angles.size(); ++k) {
      if (angles[k] - angles[k - 1] > gap) {
        gap = angles[k] - angles[k - 1];
        mid = 0.5 * (angles[k] + angles[k - 1]);
      }
    }
    const ExtendedReal t = ExtendedReal::from_angle(std::remainder(mid, 2.0 * kPi));
    if (secular_indicator(delta_family_member(g, c.placed.B, c.alpha, t), c.mu).sigma_min > kPlantDip) ++controls;
  }
  record("kernel", dips == planted && controls == 50,
         std::to_string(dips) + "/" + std::to_string(planted) + " dips, " + std::to_string(controls) + "/50 controls");

  // Wronskian of the fundamental pair.
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> lam(-50.0, 400.0);
  std::uniform_real_distribution<double> xs(0.0, 2.0);
  double wr = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const FundamentalValues p = fundamental_pair(lam(rng), xs(rng));
    const double scale = std::max(1.0, std::abs(p.c * p.ds) + std::abs(p.dc * p.s));
    wr = std::max(wr, std::abs(p.c * p.ds - p.dc * p.s - 1.0) / scale);
  }
  record("wronskian", wr <= kWronskianTol, "worst " + std::to_string(wr));

  // Subdivision invariance and interlacing with the Dirichlet decoupling.
  double sub_err = 0.0;
  int interlace_bad = 0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const MetricGraph g = random_graph(seed);
    std::vector<PointOnGraph> pts;
    const int r = 1 + static_cast<int>(seed % 3);
    for (int k = 0; k < r; ++k) {
      const int e = static_cast<int>(unit(rng) * g.num_edges());
      pts.push_back(PointOnGraph::interior(e, (0.1 + 0.8 * unit(rng)) * g.length(e)));
    }
    const PlacedPoints placed = place_points(g, pts);
    const int K = 8;
    const std::vector<double> a = lowest_eigenvalues(nk_problem(g), K + r);
    const std::vector<double> b = lowest_eigenvalues(nk_problem(placed.sub.graph), K + r);
    for (int k = 0; k < K + r; ++k) sub_err = std::max(sub_err, std::abs(a[k] - b[k]) / std::max(1.0, std::abs(a[k])));
    const std::vector<double> d =
        lowest_eigenvalues(decoupled_problem(placed.sub.graph, placed.B, 0.0).problem, K);
    for (int k = 0; k < K; ++k) {
      const double tol = kInterlaceTol * std::max(1.0, std::abs(d[k]));
      if (a[k] > d[k] + tol || d[k] > a[k + r] + tol) ++interlace_bad;
    }
  }
  record("subdivision", sub_err <= kSubdivisionTol, "worst relative " + std::to_string(sub_err));
  record("interlacing", interlace_bad == 0, std::to_string(interlace_bad) + " violations");

  // Eigenvalue branches are non-decreasing in t away from the singular angles.
  int branch_bad = 0;
  int families = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const MetricGraph g = random_graph(seed);
    const PlacedPoints placed = place_points(g, {PointOnGraph::interior(0, 0.37 * g.length(0))});
    for (double alpha : {0.0, 0.25 * kPi}) {
      std::vector<double> ts;
      const double lo = alpha == 0.0 ? -10.0 : 0.1;
      for (int k = 0; k <= 80; ++k) ts.push_back(lo + (10.0 - lo) * k / 80.0);
      const CurveTable table = curve_samples(placed.sub.graph, placed.B, alpha, ts, 0.0, 20.0);
      ++families;
      if (!table.non_monotone.empty()) ++branch_bad;
    }
  }
  record("monotone", branch_bad == 0, std::to_string(families - branch_bad) + "/" + std::to_string(families) + " families");

  for (std::size_t k = 0; k < parts.size(); ++k) o.detail += (k ? "; " : "") + parts[k];
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::function<Outcome()> run;
    double budget;
  };
  const std::vector<Criterion> criteria = {
      {1, criterion1, kSpectrumBudget}, {2, criterion2, kLoopBudget}, {3, criterion3, kNodalBudget},
      {4, criterion4, kRobinBudget},    {5, criterion5, 0.0},         {6, criterion6, 0.0},
      {7, criterion7, 0.0},             {8, criterion8, 0.0},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const Clock::time_point t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double dt = seconds_since(t0);
    if (c.budget > 0.0 && dt >= c.budget) {
      o.pass = false;
      o.detail += "; over the time budget";
    }
    char timing[64];
    if (c.budget > 0.0) {
      std::snprintf(timing, sizeof timing, "%.2fs of %.0fs", dt, c.budget);
    } else {
      std::snprintf(timing, sizeof timing, "%.2fs", dt);
    }
    std::printf("criterion %d: %s [%s] %s\n", c.id, o.pass ? "PASS" : "FAIL", timing, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
