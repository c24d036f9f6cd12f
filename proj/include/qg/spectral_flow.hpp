#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qg/conditions.hpp"
#include "qg/graph.hpp"
#include "qg/robin_geometry.hpp"

namespace qg {

/// A path on the circle of extended reals, charted by theta = 2 atan(t).
/// Forward paths run with increasing theta from a to b (wrapping through
/// infinity when needed); a loop starts and ends at infinity.
struct ParameterInterval {
  ExtendedReal a;
  ExtendedReal b;
  bool loop = false;
  bool reversed = false;  ///< traverse from b back to a

  static ParameterInterval full_loop();
  static ParameterInterval path(const ExtendedReal& a, const ExtendedReal& b, bool reversed = false);
  /// [0, inf], the family from H to the decoupled operator through positive t.
  static ParameterInterval zero_to_inf();
  /// [-inf, 0].
  static ParameterInterval inf_to_zero();

  /// Start and end angle of the forward traversal; the end exceeds the start.
  std::pair<double, double> angles() const;
};

struct Crossing {
  double theta = 0.0;
  ExtendedReal t;
  int sign = 1;
};

struct SFResult {
  int sf = 0;
  double mu = 0.0;
  std::vector<Crossing> crossings;
  std::string method;
  int wraps = 0;    ///< tracking: branches that passed through infinity
  int samples = 0;  ///< tracking: operator evaluations
};

/// Counts t* = -kappa over the eigenvalues kappa of the Robin map at mu, on
/// (a, b] of the forward path; reversed paths negate. Throws IllDefinedLevel.
SFResult sf_via_robin(const MetricGraph& g, const std::vector<int>& B, double alpha, double mu,
                      const ParameterInterval& I);

using ProblemFamily = std::function<BoundaryProblem(double theta)>;

/// theta -> H_alpha^B(tan(theta / 2)).
ProblemFamily delta_family(const MetricGraph& g, std::vector<int> B, double alpha);

struct TrackingOptions {
  int initial_cells = 64;
  double window = 1.0;    ///< eigenvalues are followed in [mu - window, mu + window]
  double min_cell = 1e-10;
  double locate = 1e-4;   ///< crossing cells are refined to this width in theta
  double root_tol = 1e-9;
  int max_samples = 200000;
  int max_shift = 64;     ///< largest number of branches passing through infinity in one cell
  /// Angles where branches may pass through infinity. When set, other cells
  /// carry no index shift and their flow is the drop of the count below mu;
  /// when empty, any cell may carry a shift.
  std::vector<double> singular;
};

/// Angles in [theta0, theta1] congruent to pi modulo 2 pi, and to 0 as well
/// when `with_zero`. For delta_alpha(t) families these are t = infinity and,
/// for alpha != 0, t = 0.
std::vector<double> wrap_angles(double theta0, double theta1, bool with_zero);

/// Spectral flow through mu over theta in [theta0, theta1] from sampled
/// eigenvalues with absolute indices. Ordered eigenvalues are continuous
/// except where branches pass through infinity; such cells are refined to
/// min_cell and the index shift with the smallest displacement is taken. Throws SolverError
/// when a cell cannot be resolved. The graph overload sets opts.singular from wrap_angles.
SFResult sf_via_tracking(const ProblemFamily& family, double theta0, double theta1, double mu,
                         const TrackingOptions& opts = {});
SFResult sf_via_tracking(const MetricGraph& g, const std::vector<int>& B, double alpha, double mu,
                         const ParameterInterval& I, const TrackingOptions& opts = {});

struct CurvePoint {
  double t = 0.0;
  int branch = 0;
  double lambda = 0.0;
};

struct CurveTable {
  std::vector<CurvePoint> rows;
  /// Branch ids with a decrease of more than 1e-6 between consecutive samples.
  std::vector<int> non_monotone;
  std::string csv() const;
};

/// Eigenvalues of H_alpha^B(t) in [lo, hi] on a grid of finite t values.
CurveTable curve_samples(const MetricGraph& g, const std::vector<int>& B, double alpha, const std::vector<double>& ts,
                         double lo, double hi);

struct UnitaryLoop {
  std::function<Eigen::MatrixXcd(double theta)> U;
  double theta0 = 0.0;
  double theta1 = 0.0;
};

/// Block-diagonal unitary of all vertex conditions, rows ordered by vertex.
Eigen::MatrixXcd global_unitary(const BoundaryProblem& p);

struct WindingResult {
  int wind = 0;
  double residue = 0.0;
  int samples = 0;
};

/// Unwrapped phase of det U over the loop divided by 2 pi. Samples start at
/// 64 and are refined until every phase step is below pi / 2. Throws
/// SolverError when the refinement cap is hit or the residue exceeds 1e-6.
WindingResult winding_number(const UnitaryLoop& loop);

struct SfWindResult {
  SFResult sf;
  int wind = 0;
};

SfWindResult sf_wind_check(const ProblemFamily& family, double theta0, double theta1, double mu,
                           const TrackingOptions& opts = {});

/// theta -> interval [0, length] with i(U - 1) f + (U + 1) grad f = 0, U = e^{i theta},
/// at the tail and Neumann at the head.
ProblemFamily single_edge_loop(double length);

/// sf at `level` along H_0^f(I) => H => H_alpha^f(I'), summed over the two legs
/// with the Robin-map method. i_plus / iprime_plus select +infinity.
SFResult sf_composite(const MetricGraph& g, const RobinPointSet& nodal, const RobinPointSet& robin, double alpha,
                      double level, bool i_plus, bool iprime_plus);

}  // namespace qg
