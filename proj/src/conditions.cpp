#include "qg/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qg/edge_basis.hpp"

namespace qg {

double ExtendedReal::value() const {
  if (infinite_) throw std::logic_error("value() of the infinite point");
  return value_;
}

double ExtendedReal::angle() const {
  if (infinite_) return std::numbers::pi;
  return 2.0 * std::atan(value_);
}

ExtendedReal ExtendedReal::from_angle(double theta) {
  const double half = 0.5 * theta;
  const double c = std::cos(half);
  const double s = std::sin(half);
  // Couplings within rounding of 0 or infinity are snapped: the secular
  // matrix carries 1 / t and t and loses all accuracy there.
  if (std::abs(c) < kAngleSnap) return infinity();
  if (std::abs(s) < kAngleSnap) return ExtendedReal(0.0);
  return ExtendedReal(s / c);
}

bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
  if (a.is_infinite() || b.is_infinite()) return a.is_infinite() && b.is_infinite();
  return a.value() == b.value();
}

void delta_rows(double alpha, const ExtendedReal& t, Eigen::Matrix2d* A, Eigen::Matrix2d* B) {
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  if (t.is_infinite()) {
    *A << c, 0.0, 0.0, c;
    *B << -s, 0.0, 0.0, s;
    return;
  }
  const double tv = t.value();
  *A << c, -c, s, -s - tv * c;
  *B << -s, -s, c, c - tv * s;
}

namespace {

LocalCondition nk_local(const std::vector<int>& ends) {
  const int d = static_cast<int>(ends.size());
  LocalCondition lc;
  lc.ends = ends;
  lc.A = Eigen::MatrixXd::Zero(d, d);
  lc.B = Eigen::MatrixXd::Zero(d, d);
  for (int j = 1; j < d; ++j) {
    lc.A(j - 1, 0) = 1.0;
    lc.A(j - 1, j) = -1.0;
  }
  lc.B.row(d - 1).setOnes();
  lc.Q = Eigen::MatrixXd::Constant(d, 1, 1.0 / std::sqrt(static_cast<double>(d)));
  lc.L = Eigen::MatrixXd::Zero(1, 1);
  return lc;
}

LocalCondition delta_local(const MetricGraph& g, int v, const DeltaAlpha& c) {
  if (g.degree(v) != 2) {
    throw std::invalid_argument("delta condition at vertex '" + g.vertex_id(v) + "' of degree " +
                                std::to_string(g.degree(v)));
  }
  const std::vector<int> ends = {g.outgoing_end(v), g.incoming_end(v)};
  if (!c.t.is_infinite() && c.t.value() == 0.0) return nk_local(ends);

  LocalCondition lc;
  lc.ends = ends;
  Eigen::Matrix2d A, B;
  delta_rows(c.alpha, c.t, &A, &B);
  lc.A = A;
  lc.B = B;
  const double alpha = reduce_angle(c.alpha);
  const double r = 1.0 / std::sqrt(2.0);
  if (alpha == 0.0) {
    if (c.t.is_infinite()) {
      lc.Q = Eigen::MatrixXd::Zero(2, 0);
      lc.L = Eigen::MatrixXd::Zero(0, 0);
    } else {
      lc.Q = Eigen::MatrixXd::Constant(2, 1, r);
      lc.L = Eigen::MatrixXd::Constant(1, 1, 0.5 * c.t.value());
    }
    return lc;
  }
  // Basis (1,1)/sqrt2, (1,-1)/sqrt2 of (plus, minus) values; the jump penalty is diagonal there.
  const double cot = std::cos(alpha) / std::sin(alpha);
  const double s2 = std::sin(alpha) * std::sin(alpha);
  const double w = c.t.is_infinite() ? 0.0 : 1.0 / (c.t.value() * s2);
  lc.Q.resize(2, 2);
  lc.Q << r, r, r, -r;
  lc.L.resize(2, 2);
  lc.L << 0.0, cot, cot, -2.0 * w;
  return lc;
}

LocalCondition robin_local(const MetricGraph& g, int v, const RobinFixed& c) {
  if (g.degree(v) != 1) {
    throw std::invalid_argument("fixed Robin condition at vertex '" + g.vertex_id(v) + "' of degree " +
                                std::to_string(g.degree(v)));
  }
  LocalCondition lc;
  const int end = g.ends_at(v)[0];
  lc.ends = {end};
  const double ca = std::cos(c.alpha);
  const double sa = std::sin(c.alpha);
  // Outgoing derivative is +f' at a tail and -f' at a head.
  const double sign = is_head_end(end) ? -1.0 : 1.0;
  lc.A = Eigen::MatrixXd::Constant(1, 1, ca);
  lc.B = Eigen::MatrixXd::Constant(1, 1, -sign * sa);
  const double alpha = reduce_angle(c.alpha);
  if (alpha == 0.0) {
    lc.Q = Eigen::MatrixXd::Zero(1, 0);
    lc.L = Eigen::MatrixXd::Zero(0, 0);
  } else {
    lc.Q = Eigen::MatrixXd::Ones(1, 1);
    lc.L = Eigen::MatrixXd::Constant(1, 1, sign * std::cos(alpha) / std::sin(alpha));
  }
  return lc;
}

LocalCondition unitary_local(const MetricGraph& g, int v, const UnitaryGeneral& c) {
  const int d = g.degree(v);
  const Eigen::MatrixXcd& U = c.U;
  if (U.rows() != d || U.cols() != d) {
    throw std::invalid_argument("unitary condition at vertex '" + g.vertex_id(v) + "' has wrong size");
  }
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(d, d);
  if ((U.adjoint() * U - I).norm() > 1e-10) throw std::invalid_argument("condition matrix is not unitary");
  if ((U - U.transpose()).norm() > 1e-10) {
    throw std::invalid_argument("condition matrix is not symmetric (complex-valued problem)");
  }
  const Eigen::MatrixXd S = U.real();
  const Eigen::MatrixXd T = U.imag();
  const Eigen::MatrixXd Id = Eigen::MatrixXd::Identity(d, d);

  LocalCondition lc;
  lc.ends = g.ends_at(v);
  Eigen::MatrixXd K(2 * d, 2 * d);
  K << -T, S + Id, S - Id, T;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(K, Eigen::ComputeFullV);
  const Eigen::MatrixXd rows = svd.matrixV().leftCols(d).transpose();
  lc.A = rows.leftCols(d);
  lc.B = rows.rightCols(d);

  // Re U and Im U commute; a generic combination gives a common real eigenbasis.
  const double gamma = 0.5772156649015329;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S + gamma * T);
  const Eigen::MatrixXd O = es.eigenvectors();
  const Eigen::MatrixXcd D = O.transpose() * U * O;
  Eigen::MatrixXcd off = D;
  off.diagonal().setZero();
  if (off.norm() > 1e-8) throw std::invalid_argument("could not diagonalize condition matrix");
  std::vector<int> keep;
  std::vector<double> tangents;
  for (int j = 0; j < d; ++j) {
    const std::complex<double> z = D(j, j);
    if (std::abs(z + 1.0) < 1e-12) continue;
    keep.push_back(j);
    tangents.push_back(z.imag() / (1.0 + z.real()));
  }
  lc.Q.resize(d, static_cast<int>(keep.size()));
  lc.L = Eigen::MatrixXd::Zero(static_cast<int>(keep.size()), static_cast<int>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    lc.Q.col(static_cast<int>(k)) = O.col(keep[k]);
    lc.L(static_cast<int>(k), static_cast<int>(k)) = tangents[k];
  }
  return lc;
}

}  // namespace

LocalCondition local_condition(const MetricGraph& g, int v, const VertexCondition& c) {
  return std::visit(
      [&](const auto& cond) -> LocalCondition {
        using T = std::decay_t<decltype(cond)>;
        if constexpr (std::is_same_v<T, NeumannKirchhoff>) {
          return nk_local(g.ends_at(v));
        } else if constexpr (std::is_same_v<T, DeltaAlpha>) {
          return delta_local(g, v, cond);
        } else if constexpr (std::is_same_v<T, RobinFixed>) {
          return robin_local(g, v, cond);
        } else {
          return unitary_local(g, v, cond);
        }
      },
      c);
}

Eigen::MatrixXcd vertex_unitary(const LocalCondition& lc) {
  const std::complex<double> i(0.0, 1.0);
  const Eigen::MatrixXcd Ac = lc.A.cast<std::complex<double>>();
  const Eigen::MatrixXcd Bc = lc.B.cast<std::complex<double>>();
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(Ac - i * Bc);
  if (!lu.isInvertible()) throw std::invalid_argument("A - iB is singular: condition is not self-adjoint");
  return -lu.solve(Ac + i * Bc);
}

Eigen::MatrixXcd vertex_unitary(const MetricGraph& g, int v, const VertexCondition& c) {
  const LocalCondition lc = local_condition(g, v, c);
  const Eigen::MatrixXcd U = vertex_unitary(lc);
  // Reorder from the condition's ends to ends_at(v).
  const std::vector<int>& ends = g.ends_at(v);
  const int d = static_cast<int>(ends.size());
  std::vector<int> pos(d);
  for (int i = 0; i < d; ++i) {
    pos[i] = static_cast<int>(std::find(lc.ends.begin(), lc.ends.end(), ends[i]) - lc.ends.begin());
  }
  Eigen::MatrixXcd out(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) out(i, j) = U(pos[i], pos[j]);
  }
  return out;
}

BoundaryProblem::BoundaryProblem(MetricGraph g, std::vector<VertexCondition> c)
    : graph(std::move(g)), conditions(std::move(c)) {
  if (static_cast<int>(conditions.size()) != graph.num_vertices()) {
    throw std::invalid_argument("one vertex condition per vertex required");
  }
  local.reserve(conditions.size());
  for (int v = 0; v < graph.num_vertices(); ++v) local.push_back(local_condition(graph, v, conditions[v]));
}

BoundaryProblem nk_problem(const MetricGraph& g) {
  return BoundaryProblem(g, std::vector<VertexCondition>(g.num_vertices(), NeumannKirchhoff{}));
}

BoundaryProblem delta_family_member(const MetricGraph& g, const std::vector<int>& set, double alpha,
                                    const ExtendedReal& t) {
  std::vector<VertexCondition> c(g.num_vertices(), NeumannKirchhoff{});
  for (int v : set) c.at(v) = DeltaAlpha{alpha, t};
  return BoundaryProblem(g, std::move(c));
}

}  // namespace qg
