#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "qg/errors.hpp"
#include "qg/harness.hpp"
#include "qg/robin_map.hpp"
#include "qg/solver.hpp"

namespace qg {
namespace {

constexpr double kPi = std::numbers::pi;

MetricGraph split_interval(double half) {
  return MetricGraph({"a", "m", "b"}, {{0, 1, half}, {1, 2, half}});
}

TEST(RobinMap, SplitIntervalClosedForm) {
  // Neumann ends, data at the midpoint: 2 kappa tanh(kappa l) below zero, -2 k tan(k l) above.
  const double l = 1.0;
  const MetricGraph g = split_interval(l);
  for (double kappa : {0.5, 1.0, 2.0}) {
    const RobinMap m = robin_matrix(g, {1}, 0.0, -kappa * kappa);
    EXPECT_NEAR(m.matrix(0, 0), 2.0 * kappa * std::tanh(kappa * l), 1e-10);
  }
  for (double k : {0.3, 1.0, 1.4}) {
    const RobinMap m = robin_matrix(g, {1}, 0.0, k * k);
    EXPECT_NEAR(m.matrix(0, 0), -2.0 * k * std::tan(k * l), 1e-9 * std::max(1.0, std::abs(m.matrix(0, 0))));
  }
  EXPECT_NEAR(robin_matrix(g, {1}, 0.0, -1.0).matrix(0, 0), 2.0 * std::tanh(1.0), 1e-10);
}

TEST(RobinMap, IllDefinedAtDecoupledEigenvalue) {
  // The decoupled problem is two Neumann-Dirichlet intervals of length pi / 2: eigenvalues (2j + 1)^2.
  const MetricGraph g = split_interval(kPi / 2);
  EXPECT_FALSE(is_well_defined(g, {1}, 0.0, 1.0));
  EXPECT_THROW(robin_matrix(g, {1}, 0.0, 9.0), IllDefinedLevel);
  EXPECT_TRUE(is_well_defined(g, {1}, 0.0, 2.0));
}

TEST(RobinMap, InertiaCounts) {
  Eigen::MatrixXd L(3, 3);
  L << 2, 0, 0, 0, -1, 0, 0, 0, 0;
  const Inertia in = inertia(L);
  EXPECT_EQ(in.mor, 1);
  EXPECT_EQ(in.pos, 1);
  EXPECT_EQ(in.null, 1);
}

struct RandomCase {
  MetricGraph g;
  PlacedPoints placed;
  double alpha = 0.0;
  double mu = 0.0;
};

// Random (graph, B, alpha, mu) with a well-defined Robin map.
std::vector<RandomCase> random_cases(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<RandomCase> out;
  std::uint64_t graph_seed = 1;
  while (static_cast<int>(out.size()) < count) {
    RandomCase c;
    c.g = random_graph(graph_seed++);
    const int size = 1 + static_cast<int>(unit(rng) * 3);
    std::vector<PointOnGraph> pts;
    for (int i = 0; i < size; ++i) {
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

TEST(RobinMap, SymmetricOnRandomCases) {
  for (const RandomCase& c : random_cases(60, 11)) {
    const RobinMap m = robin_matrix(c.placed.sub.graph, c.placed.B, c.alpha, c.mu);
    EXPECT_LT(m.asymmetry, 1e-8) << "alpha " << c.alpha << " mu " << c.mu;
  }
}

TEST(RobinMap, KernelCorrespondence) {
  // For each eigenvalue kappa, mu is an eigenvalue of the delta_alpha(-kappa) operator.
  for (const RandomCase& c : random_cases(25, 12)) {
    const MetricGraph& g = c.placed.sub.graph;
    const RobinMap m = robin_matrix(g, c.placed.B, c.alpha, c.mu);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.matrix);
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      const double kappa = es.eigenvalues()(i);
      const BoundaryProblem p = delta_family_member(g, c.placed.B, c.alpha, -kappa);
      EXPECT_LT(secular_indicator(p, c.mu).sigma_min, 1e-7) << "kappa " << kappa;
    }
    // Midway (in angle) between crossings the operator is invertible at mu.
    std::vector<double> angles;
    for (int i = 0; i < es.eigenvalues().size(); ++i) angles.push_back(2.0 * std::atan(-es.eigenvalues()(i)));
    std::sort(angles.begin(), angles.end());
    angles.push_back(angles.front() + 2.0 * kPi);
    double mid = 0.0;
    double gap = -1.0;
    for (std::size_t i = 1; i < angles.size(); ++i) {
      if (angles[i] - angles[i - 1] > gap) {
        gap = angles[i] - angles[i - 1];
        mid = 0.5 * (angles[i] + angles[i - 1]);
      }
    }
    const BoundaryProblem off = delta_family_member(g, c.placed.B, c.alpha, ExtendedReal::from_angle(std::remainder(mid, 2.0 * kPi)));
    EXPECT_GT(secular_indicator(off, c.mu).sigma_min, 1e-7);
  }
}

TEST(RobinMap, SolveMatchesData) {
  const RandomCase c = random_cases(1, 13).front();
  const MetricGraph& g = c.placed.sub.graph;
  const int n = static_cast<int>(c.placed.B.size());
  const Eigen::VectorXd xi = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0);
  const EigenFunction f = solve_bvp(g, c.placed.B, c.alpha, c.mu, xi);
  for (int i = 0; i < n; ++i) {
    const int v = c.placed.B[i];
    const TracePair in = eval_end(g, f, g.incoming_end(v));
    const TracePair out = eval_end(g, f, g.outgoing_end(v));
    // Outgoing derivative at the head end is minus the derivative along the edge.
    const double tau_minus = std::cos(c.alpha) * in.f + std::sin(c.alpha) * in.df;
    const double tau_plus = std::cos(c.alpha) * out.f - std::sin(c.alpha) * out.df;
    EXPECT_NEAR(tau_minus, xi(i), 1e-9);
    EXPECT_NEAR(tau_plus, xi(i), 1e-9);
  }
}

TEST(Epsilon, CertifiedWindow) {
  const MetricGraph g = star_fixture();
  const EigenTarget t = select_target(g);
  const PlacedPoints placed = place_points(g, {PointOnGraph::interior(0, 0.4)});
  const DecoupledProblem dec = decoupled_problem(placed.sub.graph, placed.B, 0.0);
  const EpsilonChoice e = epsilon_select(t.H, dec.problem, t.lambda);
  EXPECT_TRUE(e.certified);
  EXPECT_GT(e.epsilon, 0.0);
  EXPECT_LE(e.epsilon, 0.1);
  EXPECT_EQ(count_below(t.H, t.lambda - e.epsilon), t.n - 1);
  EXPECT_EQ(count_below(t.H, t.lambda + e.epsilon), t.N);
}

TEST(PlacePoints, SortedDegreeTwoVertices) {
  const MetricGraph g = two_cycle_fixture();
  const PlacedPoints p = place_points(g, {PointOnGraph::interior(2, 0.5), PointOnGraph::interior(0, 0.3)});
  ASSERT_EQ(p.B.size(), 2u);
  EXPECT_LT(p.B[0], p.B[1]);
  for (int v : p.B) EXPECT_EQ(p.sub.graph.degree(v), 2);
}

}  // namespace
}  // namespace qg
