#pragma once

#include <complex>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qg/graph.hpp"

namespace qg {

/// Half-angle sine or cosine below which from_angle snaps to 0 or infinity.
inline constexpr double kAngleSnap = 1e-12;

/// A point of the extended real line; +inf and -inf are the same point.
class ExtendedReal {
 public:
  ExtendedReal() = default;
  ExtendedReal(double v) : value_(v) {}  // NOLINT: implicit from finite reals
  static ExtendedReal infinity() {
    ExtendedReal r;
    r.infinite_ = true;
    return r;
  }
  bool is_infinite() const { return infinite_; }
  /// Throws std::logic_error when infinite.
  double value() const;
  /// Angle on the circle, theta = 2 atan(t) in (-pi, pi], infinity at pi.
  double angle() const;
  /// t = tan(theta / 2); angles within kAngleSnap of 0 or infinity map exactly there.
  static ExtendedReal from_angle(double theta);

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

bool operator==(const ExtendedReal& a, const ExtendedReal& b);

struct NeumannKirchhoff {};

/// delta_alpha(t) coupling at an oriented degree-2 vertex.
struct DeltaAlpha {
  double alpha = 0.0;
  ExtendedReal t;
};

/// tau_alpha f = 0 at a degree-1 vertex.
struct RobinFixed {
  double alpha = 0.0;
};

/// i(U - 1) F + (U + 1) grad F = 0, rows ordered like MetricGraph::ends_at(v).
/// Only symmetric U (real-valued problems) are accepted.
struct UnitaryGeneral {
  Eigen::MatrixXcd U;
};

using VertexCondition = std::variant<NeumannKirchhoff, DeltaAlpha, RobinFixed, UnitaryGeneral>;

/// Real linear form of a vertex condition over the edge-ends at v.
///
/// Rows: A F + B grad F = 0 with F the boundary values and grad F the outgoing
/// derivatives. Equivalently, F ranges over the column span of Q and the
/// projection of grad F onto that span equals Q L Q^T F.
struct LocalCondition {
  std::vector<int> ends;
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd L;
};

/// Throws std::invalid_argument when the condition does not fit the vertex
/// (wrong degree, unoriented degree-2 vertex, non-unitary or non-symmetric U).
LocalCondition local_condition(const MetricGraph& g, int v, const VertexCondition& c);

/// U = -(A - iB)^{-1} (A + iB) for the rows of a local condition.
/// Throws std::invalid_argument when A - iB is singular.
Eigen::MatrixXcd vertex_unitary(const LocalCondition& lc);
/// As above with rows ordered like MetricGraph::ends_at(v).
Eigen::MatrixXcd vertex_unitary(const MetricGraph& g, int v, const VertexCondition& c);

/// (A, B) of delta_alpha(t) over (plus, minus) ends.
void delta_rows(double alpha, const ExtendedReal& t, Eigen::Matrix2d* A, Eigen::Matrix2d* B);

/// A graph with one condition per vertex.
struct BoundaryProblem {
  MetricGraph graph;
  std::vector<VertexCondition> conditions;
  std::vector<LocalCondition> local;

  BoundaryProblem() = default;
  BoundaryProblem(MetricGraph g, std::vector<VertexCondition> c);

  int size() const { return 2 * graph.num_edges(); }
};

/// Neumann-Kirchhoff at every vertex.
BoundaryProblem nk_problem(const MetricGraph& g);

/// delta_alpha(t) at the vertices in `set`, Neumann-Kirchhoff elsewhere.
BoundaryProblem delta_family_member(const MetricGraph& g, const std::vector<int>& set, double alpha,
                                    const ExtendedReal& t);

}  // namespace qg
