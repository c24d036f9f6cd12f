#pragma once

#include <vector>

#include <Eigen/Dense>

#include "qg/conditions.hpp"
#include "qg/edge_basis.hpp"
#include "qg/errors.hpp"

namespace qg {

/// A window endpoint lies too close to an eigenvalue.
class WindowGuardError : public SolverError {
 public:
  using SolverError::SolverError;
};

struct SolverOptions {
  /// Step of the initial isolation grid.
  double resolution = 0.5;
  /// Eigenvalues are located to within root_tol * max(1, |lambda|).
  double root_tol = 1e-10;
  /// Singular values below null_tol * max(1, sigma_max) count towards the nullity.
  /// Equilibrated rows are of unit size, so sigma_max is O(1) unless every row vanishes.
  double null_tol = 1e-8;
  /// Window endpoints closer than this (times max(1, |lambda|)) to an eigenvalue are rejected.
  double window_guard = 1e-8;
};

/// Rows from the vertex conditions, columns (a_e, b_e) per edge.
Eigen::MatrixXd assemble_secular(const BoundaryProblem& p, double lambda);

/// Scale applied to the b_e columns by equilibrated_secular: sqrt(max(1, |lambda|)).
double column_scale(double lambda);

/// Row multipliers used by equilibrated_secular.
Eigen::VectorXd secular_row_scales(const BoundaryProblem& p, double lambda);

/// Unknowns (a_e, b_e / k) with k = column_scale(lambda); each condition row
/// divided by max(|A_i|, k |B_i|). The scaling is positive and continuous in
/// lambda, so zeros and signs of the determinant are those of the raw matrix.
Eigen::MatrixXd equilibrated_secular(const BoundaryProblem& p, double lambda);

struct SecularIndicator {
  double det = 0.0;  ///< determinant of the equilibrated matrix
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  int nullity = 0;   ///< singular values below null_tol * max(1, sigma_max)
};

SecularIndicator secular_indicator(const BoundaryProblem& p, double lambda, double null_tol = 1e-8);
/// Determinant only; cheaper than secular_indicator.
double secular_det(const BoundaryProblem& p, double lambda);

/// min over edges of |sin(sqrt(mu) l_e)|, or 1 for mu <= 0. Counting is
/// accurate when this is not tiny.
double count_safety(const MetricGraph& g, double mu);

/// Edge Dirichlet-to-Neumann entries at mu: diag = -c/s, off = 1/s, evaluated without overflow.
struct EdgeDtN {
  double diag = 0.0;
  double off = 0.0;
};
EdgeDtN edge_dtn(double mu, double length);

/// Number of eigenvalues strictly below mu, with multiplicity.
///
/// Splits the form into the edgewise Dirichlet part and the vertex part:
/// the result is the number of edge Dirichlet eigenvalues below mu plus the
/// number of negative eigenvalues of L - Q^T D(mu) Q, where D is the edge
/// Dirichlet-to-Neumann map and (Q, L) describe the vertex conditions.
/// Exact for mu off the spectrum of the problem; requires count_safety > 0.
int count_below(const BoundaryProblem& p, double mu);

/// Negative eigenvalue count of a symmetric matrix. Dominant diagonal pivots
/// are eliminated first so that very large entries do not swamp small ones.
int count_negative(Eigen::MatrixXd M);

struct Eigenvalue {
  double lambda = 0.0;
  int mult = 0;
  int n = 0;  ///< first position in the ordered spectrum (1-based)
  int N = 0;  ///< last position, n + mult - 1
  /// Located by secular refinement inside a cluster that counting could not split.
  bool unresolved = false;
};

struct EigenvalueList {
  double lo = 0.0;
  double hi = 0.0;
  int below = 0;  ///< eigenvalues below lo
  std::vector<Eigenvalue> values;

  /// Eigenvalues repeated by multiplicity.
  std::vector<double> expanded() const;
};

/// All eigenvalues in [a, b]. Throws SolverError when an endpoint lies within
/// the window guard of an eigenvalue.
EigenvalueList eigenvalues_in(const BoundaryProblem& p, double a, double b, const SolverOptions& opts = {});

/// A value below the ground state.
double spectrum_lower_bound(const BoundaryProblem& p);

/// The first `count` eigenvalues with multiplicity, extending the window as needed.
std::vector<double> lowest_eigenvalues(const BoundaryProblem& p, int count, const SolverOptions& opts = {});

/// Eigenvalues near lambda (within radius), retrying with a widened window
/// when an endpoint is too close to an eigenvalue.
EigenvalueList eigenvalues_near(const BoundaryProblem& p, double lambda, double radius,
                                const SolverOptions& opts = {});

struct EigenFunction {
  double lambda = 0.0;
  /// a_e = coeffs[2e], b_e = coeffs[2e + 1].
  Eigen::VectorXd coeffs;
  /// Largest absolute residual of the unscaled condition rows.
  double residual = 0.0;
};

/// L2-orthonormal real basis of the eigenspace. With mult = 0 the nullity is
/// read off the singular values. Throws SolverError when the nullity is 0.
std::vector<EigenFunction> eigenfunction(const BoundaryProblem& p, double lambda, int mult = 0,
                                         const SolverOptions& opts = {});

TracePair eval(const MetricGraph& g, const EigenFunction& f, int edge, double x);
/// Value at an edge-end and the outgoing derivative there.
TracePair eval_end(const MetricGraph& g, const EigenFunction& f, int end);
double l2_norm(const MetricGraph& g, const EigenFunction& f);
double max_abs(const MetricGraph& g, const EigenFunction& f);

struct SpectralCounts {
  double lambda = 0.0;
  int n = 0;
  int N = 0;
  int mult = 0;
};

/// Throws SolverError when lambda is not an eigenvalue.
SpectralCounts spectral_counts(const BoundaryProblem& p, double lambda, const SolverOptions& opts = {});

struct GenericityReport {
  double bound = 0.0;             ///< (pi / l_min)^2
  bool above_bound = false;
  bool vertex_nonvanishing = true;  ///< at vertices of degree > 2
  double min_vertex_value = 0.0;  ///< relative to max |f|
  double min_trace_norm = 0.0;    ///< min over edge-ends of |(f, f')| relative to max |f|

  bool generic() const { return above_bound && vertex_nonvanishing; }
};

GenericityReport check_generic(const BoundaryProblem& p, const EigenFunction& f);

}  // namespace qg
