#include "qg/robin_map.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qg/errors.hpp"

namespace qg {

Inertia inertia(const Eigen::MatrixXd& L) {
  Inertia r;
  if (L.rows() == 0) return r;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (L + L.transpose()), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double tau = 1e-8 * ev.cwiseAbs().maxCoeff();
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i) < -tau) {
      ++r.mor;
    } else if (ev(i) > tau) {
      ++r.pos;
    } else {
      ++r.null;
    }
  }
  return r;
}

DecoupledProblem decoupled_problem(const MetricGraph& g, const std::vector<int>& B, double alpha) {
  CutResult cut = cut_at_vertices(g, B);
  std::vector<VertexCondition> c(cut.graph.num_vertices(), NeumannKirchhoff{});
  for (const auto& [minus, plus] : cut.daughters) {
    c[minus] = RobinFixed{alpha};
    c[plus] = RobinFixed{alpha};
  }
  return {BoundaryProblem(cut.graph, std::move(c)), std::move(cut)};
}

namespace {

enum class MapKind { Robin, DtN };

// Dirichlet-type data problem on the uncut graph: rows of v in B prescribe the
// data xi(v), all other rows are Neumann-Kirchhoff.
class DataProblem {
 public:
  DataProblem(const MetricGraph& g, std::vector<int> B, double alpha, double mu, MapKind kind)
      : B_(std::move(B)), alpha_(alpha), mu_(mu), kind_(kind) {
    BoundaryProblem p = nk_problem(g);
    for (int v : B_) {
      LocalCondition& lc = p.local.at(v);
      const int d = g.degree(v);
      if (kind == MapKind::Robin) {
        if (d != 2) throw std::invalid_argument("Robin map at vertex '" + g.vertex_id(v) + "' of degree != 2");
        Eigen::Matrix2d A, Bm;
        delta_rows(alpha, ExtendedReal::infinity(), &A, &Bm);
        lc.ends = {g.outgoing_end(v), g.incoming_end(v)};
        lc.A = A;
        lc.B = Bm;
      } else {
        lc.A = Eigen::MatrixXd::Identity(d, d);
        lc.B = Eigen::MatrixXd::Zero(d, d);
      }
      lc.Q = Eigen::MatrixXd::Zero(d, 0);
      lc.L = Eigen::MatrixXd::Zero(0, 0);
    }
    problem_ = std::move(p);
    int row = 0;
    row_of_.assign(g.num_vertices(), -1);
    for (int v = 0; v < g.num_vertices(); ++v) {
      row_of_[v] = row;
      row += static_cast<int>(problem_.local[v].A.rows());
    }
    scales_ = secular_row_scales(problem_, mu);
    const Eigen::MatrixXd M = equilibrated_secular(problem_, mu);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const Eigen::VectorXd& sv = svd.singularValues();
    ratio_ = sv.size() == 0 ? 1.0 : sv(sv.size() - 1) / std::max(1.0, sv(0));
    lu_.compute(M);
  }

  bool well_defined() const { return ratio_ > SolverOptions{}.null_tol; }

  EigenFunction solve(const Eigen::VectorXd& xi) const {
    if (!well_defined()) {
      throw IllDefinedLevel("level " + std::to_string(mu_) + " lies in the spectrum of the decoupled problem");
    }
    if (xi.size() != static_cast<Eigen::Index>(B_.size())) throw std::invalid_argument("data size differs from |B|");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(problem_.size());
    for (std::size_t i = 0; i < B_.size(); ++i) {
      const int v = B_[i];
      for (int r = 0; r < problem_.local[v].A.rows(); ++r) {
        rhs(row_of_[v] + r) = xi(static_cast<int>(i)) * scales_(row_of_[v] + r);
      }
    }
    EigenFunction f;
    f.lambda = mu_;
    f.coeffs = lu_.solve(rhs);
    const double k = column_scale(mu_);
    for (int e = 0; e < problem_.graph.num_edges(); ++e) f.coeffs(2 * e + 1) *= k;
    Eigen::VectorXd raw_rhs = Eigen::VectorXd::Zero(problem_.size());
    for (int r = 0; r < problem_.size(); ++r) raw_rhs(r) = rhs(r) / scales_(r);
    f.residual = (assemble_secular(problem_, mu_) * f.coeffs - raw_rhs).lpNorm<Eigen::Infinity>();
    return f;
  }

  double apply_row(const EigenFunction& f, int v) const {
    const MetricGraph& g = problem_.graph;
    if (kind_ == MapKind::Robin) {
      const double plus = mixed_trace(alpha_, along(g, f, g.outgoing_end(v))).tau_prime;
      const double minus = mixed_trace(alpha_, along(g, f, g.incoming_end(v))).tau_prime;
      return minus - plus;
    }
    double sum = 0.0;
    for (int end : g.ends_at(v)) sum += eval_end(g, f, end).df;
    return -sum;
  }

  Eigen::MatrixXd matrix() const {
    const int n = static_cast<int>(B_.size());
    Eigen::MatrixXd L(n, n);
    for (int j = 0; j < n; ++j) {
      const EigenFunction f = solve(Eigen::VectorXd::Unit(n, j));
      for (int i = 0; i < n; ++i) L(i, j) = apply_row(f, B_[i]);
    }
    return L;
  }

 private:
  static TracePair along(const MetricGraph& g, const EigenFunction& f, int end) {
    const int e = end_edge(end);
    return eval(g, f, e, is_head_end(end) ? g.length(e) : 0.0);
  }

  std::vector<int> B_;
  double alpha_;
  double mu_;
  MapKind kind_;
  BoundaryProblem problem_;
  std::vector<int> row_of_;
  Eigen::VectorXd scales_;
  double ratio_ = 0.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

RobinMap finish(Eigen::MatrixXd L, const std::vector<int>& B, double alpha, double mu) {
  RobinMap r;
  const double norm = L.norm();
  r.asymmetry = norm > 0.0 ? (L - L.transpose()).norm() / norm : 0.0;
  r.matrix = 0.5 * (L + L.transpose());
  r.inertia = inertia(r.matrix);
  r.B = B;
  r.alpha = alpha;
  r.mu = mu;
  return r;
}

}  // namespace

bool is_well_defined(const MetricGraph& g, const std::vector<int>& B, double alpha, double mu) {
  return DataProblem(g, B, alpha, mu, MapKind::Robin).well_defined();
}

EigenFunction solve_bvp(const MetricGraph& g, const std::vector<int>& B, double alpha, double mu,
                        const Eigen::VectorXd& xi) {
  return DataProblem(g, B, alpha, mu, MapKind::Robin).solve(xi);
}

RobinMap robin_matrix(const MetricGraph& g, const std::vector<int>& B, double alpha, double mu) {
  const DataProblem dp(g, B, alpha, mu, MapKind::Robin);
  return finish(dp.matrix(), B, reduce_angle(alpha), mu);
}

RobinMap dtn_matrix(const MetricGraph& g, const std::vector<int>& B, double mu) {
  const DataProblem dp(g, B, 0.0, mu, MapKind::DtN);
  return finish(dp.matrix(), B, 0.0, mu);
}

PlacedPoints place_points(const MetricGraph& g, const std::vector<PointOnGraph>& pts) {
  PlacedPoints out;
  out.sub = insert_degree_two(g, pts);
  out.B = out.sub.point_vertices;
  std::sort(out.B.begin(), out.B.end());
  out.B.erase(std::unique(out.B.begin(), out.B.end()), out.B.end());
  return out;
}

namespace {

double nearest_other(const BoundaryProblem& p, double lambda, double radius) {
  const double same = 1e-6 * std::max(1.0, std::abs(lambda));
  const EigenvalueList list = eigenvalues_near(p, lambda, radius);
  double gap = radius;
  for (const Eigenvalue& e : list.values) {
    const double d = std::abs(e.lambda - lambda);
    if (d > same) gap = std::min(gap, d);
  }
  return gap;
}

bool window_clean(const BoundaryProblem& p, double lambda, double eps) {
  const double same = 1e-6 * std::max(1.0, std::abs(lambda));
  try {
    const EigenvalueList list = eigenvalues_in(p, lambda - eps, lambda + eps);
    return std::all_of(list.values.begin(), list.values.end(),
                       [&](const Eigenvalue& e) { return std::abs(e.lambda - lambda) <= same; });
  } catch (const SolverError&) {
    return false;
  }
}

}  // namespace

EpsilonChoice epsilon_select(const BoundaryProblem& H, const BoundaryProblem& decoupled, double lambda) {
  constexpr double kRadius = 0.25;
  constexpr double kCap = 0.2;
  EpsilonChoice c;
  c.lambda = lambda;
  c.gap_operator = nearest_other(H, lambda, kRadius);
  c.gap_decoupled = nearest_other(decoupled, lambda, kRadius);
  const double gap = std::min({c.gap_operator, c.gap_decoupled, kCap});
  if (gap < 1e-7) throw SolverError("spectral gap below 1e-7 at " + std::to_string(lambda));
  c.epsilon = 0.5 * gap;
  c.certified = window_clean(H, lambda, c.epsilon) && window_clean(decoupled, lambda, c.epsilon);
  return c;
}

}  // namespace qg
