#pragma once

#include <vector>

#include <Eigen/Dense>

#include "qg/conditions.hpp"
#include "qg/graph.hpp"
#include "qg/solver.hpp"

namespace qg {

struct Inertia {
  int mor = 0;   ///< negative eigenvalues
  int pos = 0;   ///< positive eigenvalues
  int null = 0;  ///< eigenvalues within 1e-8 * max |eig| of zero
};

Inertia inertia(const Eigen::MatrixXd& L);

/// H_alpha^B(infinity) on the cut graph: fixed Robin conditions at both daughters
/// of every v in B, Neumann-Kirchhoff elsewhere.
struct DecoupledProblem {
  BoundaryProblem problem;
  CutResult cut;
};

DecoupledProblem decoupled_problem(const MetricGraph& g, const std::vector<int>& B, double alpha);

/// True when the Robin boundary value problem at mu has only the trivial
/// solution for zero data (sigma_min / sigma_max above the solver nullity threshold).
bool is_well_defined(const MetricGraph& g, const std::vector<int>& B, double alpha, double mu);

/// The solution of -f'' = mu f with tau_alpha f(v+) = tau_alpha f(v-) = xi(v) on B
/// and Neumann-Kirchhoff elsewhere. Throws IllDefinedLevel when mu is in the
/// spectrum of the decoupled problem.
EigenFunction solve_bvp(const MetricGraph& g, const std::vector<int>& B, double alpha, double mu,
                        const Eigen::VectorXd& xi);

struct RobinMap {
  Eigen::MatrixXd matrix;  ///< symmetrized
  double asymmetry = 0.0;  ///< ||L - L^T|| / ||L|| before symmetrization
  Inertia inertia;
  std::vector<int> B;
  double alpha = 0.0;
  double mu = 0.0;
};

/// (L xi)(v) = tau'_alpha f(v-) - tau'_alpha f(v+), one solve per column.
/// Throws IllDefinedLevel when mu is in the spectrum of the decoupled problem.
RobinMap robin_matrix(const MetricGraph& g, const std::vector<int>& B, double alpha, double mu);

/// Experimental: the two-sided Dirichlet-to-Neumann map (L xi)(v) = -sum of
/// outgoing derivatives at v, for vertices of any degree.
RobinMap dtn_matrix(const MetricGraph& g, const std::vector<int>& B, double mu);

/// A point set moved onto degree-2 vertices of a subdivision.
struct PlacedPoints {
  Subdivision sub;
  std::vector<int> B;  ///< sorted vertex ids of the points in sub.graph
};

PlacedPoints place_points(const MetricGraph& g, const std::vector<PointOnGraph>& pts);

struct EpsilonChoice {
  double lambda = 0.0;
  double epsilon = 0.0;
  double gap_operator = 0.0;   ///< distance to the nearest other eigenvalue of H
  double gap_decoupled = 0.0;  ///< same for the decoupled problem
  /// [lambda - eps, lambda) and (lambda, lambda + eps] contain no eigenvalue of either problem.
  bool certified = false;
};

/// eps = min(gaps, 0.2) / 2. Throws SolverError when a gap is below 1e-7.
EpsilonChoice epsilon_select(const BoundaryProblem& H, const BoundaryProblem& decoupled, double lambda);

}  // namespace qg
