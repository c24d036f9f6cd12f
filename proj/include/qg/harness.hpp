#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qg/conditions.hpp"
#include "qg/graph.hpp"
#include "qg/solver.hpp"

namespace qg {

enum class CheckStatus { Pass, Fail, Skip };

const char* status_name(CheckStatus s);

/// One exact integer identity evaluated on one case.
struct TheoremCheck {
  std::string theorem;  ///< nodal-def, nodal-def-cor, robin-def, mor-robin, sf-sf, sf-hba, paths-6, beta-beta, sf-beta, sf-wind
  std::string case_id;  ///< fixture name or seed-<n>, with a suffix naming the variant
  std::uint64_t seed = 0;
  std::optional<double> alpha;
  long lhs = 0;
  long rhs = 0;
  CheckStatus status = CheckStatus::Skip;
  std::string reason;
};

TheoremCheck make_check(std::string theorem, std::string case_id, std::optional<double> alpha, long lhs, long rhs);
TheoremCheck make_skip(std::string theorem, std::string case_id, std::optional<double> alpha, std::string reason);

const std::vector<std::string>& theorem_ids();

struct RandomGraphParams {
  int min_vertices = 2;
  int max_vertices = 6;
  int max_edges = 9;
  double min_length = 0.5;
  double max_length = 2.0;
};

/// Connected multigraph (loops allowed) with uniform lengths, oriented so that
/// degree-2 vertices have one incoming and one outgoing end. Deterministic per seed.
MetricGraph random_graph(std::uint64_t seed, const RandomGraphParams& params = {});

struct GraphCase {
  std::string id;
  MetricGraph graph;
  std::uint64_t seed = 0;
  bool fixture = false;
};

MetricGraph interval_fixture();   ///< [0, pi]
MetricGraph star_fixture();       ///< three edges of lengths 1, 1.3, 1.7
MetricGraph cycle_fixture();      ///< one vertex with a loop of length 2 pi
MetricGraph lasso_fixture();      ///< loop of length 1.7 with a stem of length 1.1
MetricGraph two_cycle_fixture();  ///< a <-> b <-> c with a double edge on each side

/// Cut set (A) of the two-cycle fixture: both degree-2 vertices.
std::vector<PointOnGraph> two_cycle_cut_a(const MetricGraph& g);
/// Cut set (B): vertex a and an interior point of the second a-b edge.
std::vector<PointOnGraph> two_cycle_cut_b(const MetricGraph& g);

std::vector<GraphCase> fixture_cases();
GraphCase random_case(std::uint64_t seed, const RandomGraphParams& params = {});

/// An eigenvalue of the Neumann-Kirchhoff Laplacian with its eigenspace.
struct EigenTarget {
  BoundaryProblem H;
  double lambda = 0.0;
  int n = 0;
  int N = 0;
  int mult = 0;
  std::vector<EigenFunction> basis;
  std::vector<GenericityReport> generic;  ///< per basis vector
};

EigenTarget eigen_target(const MetricGraph& g, double lambda);

/// Scans upward from (pi / l_min)^2 for the first eigenvalue whose basis
/// vectors all satisfy the genericity assumption, over at most `scan`
/// eigenvalues. Falls back to the first eigenvalue above the bound.
EigenTarget select_target(const MetricGraph& g, int scan = 8);

struct HarnessOptions {
  std::vector<double> alphas;       ///< empty: the default grid
  bool half_intervals = true;       ///< sf-hba also checks [0, inf] and [-inf, 0]
  int max_basis = 3;                ///< eigenspaces of larger dimension are skipped
};

/// {0, pi/8, ..., 7pi/8} plus pi/2 (already in the grid).
std::vector<double> default_alpha_grid();

std::vector<TheoremCheck> verify_nodal_def(const GraphCase& c, const EigenTarget& target);
std::vector<TheoremCheck> verify_robin_def(const GraphCase& c, const EigenTarget& target,
                                           const std::vector<double>& alphas);
/// mor-robin records and their sf-sf restatements.
std::vector<TheoremCheck> verify_mor_robin(const GraphCase& c, const EigenTarget& target,
                                           const std::vector<double>& alphas);
/// Loop identity by both methods for |B| in {1, 2, 3} random interior points
/// and each alpha; with half_intervals also sf over [0, inf] = Mor and over
/// [-inf, 0] = Pos of the Robin map.
std::vector<TheoremCheck> verify_sf_hba(const GraphCase& c, const std::vector<double>& alphas, bool half_intervals);
/// Spectral flow through mu over the full loop for explicit B; records for both methods.
std::vector<TheoremCheck> verify_sf_hba_set(const std::string& case_id, const MetricGraph& g,
                                            const std::vector<PointOnGraph>& B, double alpha, double mu,
                                            bool half_intervals);
/// beta-beta for an explicit degree-2 point set.
std::vector<TheoremCheck> verify_beta_beta(const std::string& case_id, const MetricGraph& g,
                                           const std::vector<PointOnGraph>& B);
/// beta-beta for random point sets (or the fixture cut sets) and sf-beta for the target.
std::vector<TheoremCheck> verify_beta_theorems(const GraphCase& c, const EigenTarget& target);
/// sf-beta alone; `crossings` receives the number of finite-t crossings.
TheoremCheck verify_sf_beta(const GraphCase& c, const EigenTarget& target, double alpha, int* crossings = nullptr);
std::vector<TheoremCheck> verify_paths6(const GraphCase& c, const EigenTarget& target, double alpha);
/// sf = winding number for delta_alpha loops traversed m in {1, 2, 3} times.
std::vector<TheoremCheck> verify_sf_wind(const GraphCase& c);

struct HarnessConfig {
  std::string theorem = "all";
  int trials = 10;
  std::uint64_t seed = 1;
  int jobs = 1;
  bool fixtures = true;
  HarnessOptions options;
};

struct HarnessReport {
  std::vector<TheoremCheck> checks;  ///< canonical order: theorem, case, alpha
  int random_cases = 0;
  /// Skip ceiling for random cases (fraction of checks).
  double skip_ceiling = 0.1;

  int count(CheckStatus s) const;
  /// Skipped fraction of random-case checks.
  double random_skip_fraction() const;
  bool ok() const;
};

/// Runs the selected theorem (or all) on the fixtures and `trials` random
/// graphs seeded seed, seed + 1, ...; cases are processed by `jobs` workers.
HarnessReport run_harness(const HarnessConfig& config);

}  // namespace qg
