#include "qg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

namespace qg {

namespace {

double scale_of(double x) { return std::max(1.0, std::abs(x)); }

// Column coefficients of (F, grad F) at an edge-end in terms of (a_e, b_e).
struct EndCoeffs {
  double fa, fb, ga, gb;
};

EndCoeffs end_coeffs(const MetricGraph& g, int end, double lambda) {
  if (!is_head_end(end)) return {1.0, 0.0, 0.0, 1.0};
  const FundamentalValues v = fundamental_pair(lambda, g.length(end_edge(end)));
  return {v.c, v.s, -v.dc, -v.ds};
}

}  // namespace

std::vector<double> EigenvalueList::expanded() const {
  std::vector<double> out;
  for (const Eigenvalue& e : values) out.insert(out.end(), e.mult, e.lambda);
  return out;
}

Eigen::MatrixXd assemble_secular(const BoundaryProblem& p, double lambda) {
  const MetricGraph& g = p.graph;
  const int n = p.size();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  int row = 0;
  for (const LocalCondition& lc : p.local) {
    std::vector<EndCoeffs> ec;
    ec.reserve(lc.ends.size());
    for (int end : lc.ends) ec.push_back(end_coeffs(g, end, lambda));
    for (int i = 0; i < lc.A.rows(); ++i, ++row) {
      for (std::size_t j = 0; j < lc.ends.size(); ++j) {
        const int e = end_edge(lc.ends[j]);
        const double a = lc.A(i, static_cast<int>(j));
        const double b = lc.B(i, static_cast<int>(j));
        M(row, 2 * e) += a * ec[j].fa + b * ec[j].ga;
        M(row, 2 * e + 1) += a * ec[j].fb + b * ec[j].gb;
      }
    }
  }
  return M;
}

double column_scale(double lambda) { return std::sqrt(scale_of(lambda)); }

Eigen::VectorXd secular_row_scales(const BoundaryProblem& p, double lambda) {
  const double k = column_scale(lambda);
  Eigen::VectorXd scales(p.size());
  int row = 0;
  for (const LocalCondition& lc : p.local) {
    for (int i = 0; i < lc.A.rows(); ++i, ++row) {
      const double m = std::max(lc.A.row(i).lpNorm<Eigen::Infinity>(), k * lc.B.row(i).lpNorm<Eigen::Infinity>());
      scales(row) = m > 0.0 ? 1.0 / m : 1.0;
    }
  }
  return scales;
}

Eigen::MatrixXd equilibrated_secular(const BoundaryProblem& p, double lambda) {
  Eigen::MatrixXd M = secular_row_scales(p, lambda).asDiagonal() * assemble_secular(p, lambda);
  const double k = column_scale(lambda);
  for (int e = 0; e < p.graph.num_edges(); ++e) M.col(2 * e + 1) *= k;
  return M;
}

SecularIndicator secular_indicator(const BoundaryProblem& p, double lambda, double null_tol) {
  const Eigen::MatrixXd M = equilibrated_secular(p, lambda);
  SecularIndicator r;
  r.det = M.partialPivLu().determinant();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const Eigen::VectorXd& sv = svd.singularValues();
  r.sigma_max = sv(0);
  r.sigma_min = sv(sv.size() - 1);
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) < null_tol * std::max(1.0, r.sigma_max)) ++r.nullity;
  }
  return r;
}

double secular_det(const BoundaryProblem& p, double lambda) {
  return equilibrated_secular(p, lambda).partialPivLu().determinant();
}

namespace {

double sigma_min(const BoundaryProblem& p, double lambda) {
  const Eigen::MatrixXd M = equilibrated_secular(p, lambda);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

}  // namespace

double count_safety(const MetricGraph& g, double mu) {
  if (mu <= 0.0) return 1.0;
  const double k = std::sqrt(mu);
  double s = 1.0;
  for (const Edge& e : g.edges()) s = std::min(s, std::abs(std::sin(k * e.length)));
  return s;
}

EdgeDtN edge_dtn(double mu, double length) {
  if (mu > 1e-9) {
    const double k = std::sqrt(mu);
    const double sn = std::sin(k * length);
    return {-k * std::cos(k * length) / sn, k / sn};
  }
  if (mu < -1e-9) {
    const double k = std::sqrt(-mu);
    return {-k / std::tanh(k * length), k / std::sinh(k * length)};
  }
  const FundamentalValues v = fundamental_pair(mu, length);
  return {-v.c / v.s, 1.0 / v.s};
}

int count_negative(Eigen::MatrixXd M) {
  int neg = 0;
  while (M.rows() > 1) {
    int j = 0;
    M.diagonal().cwiseAbs().maxCoeff(&j);
    const double pivot = M(j, j);
    Eigen::MatrixXd rest = M.cwiseAbs();
    rest(j, j) = 0.0;
    if (std::abs(pivot) < 1e3 * rest.maxCoeff()) break;
    if (pivot < 0.0) ++neg;
    const int n = static_cast<int>(M.rows());
    std::vector<int> keep;
    for (int i = 0; i < n; ++i) {
      if (i != j) keep.push_back(i);
    }
    Eigen::MatrixXd S(n - 1, n - 1);
    for (int a = 0; a < n - 1; ++a) {
      for (int b = 0; b < n - 1; ++b) {
        S(a, b) = M(keep[a], keep[b]) - M(keep[a], j) * M(j, keep[b]) / pivot;
      }
    }
    M = std::move(S);
  }
  if (M.rows() == 0) return neg;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) < 0.0) ++neg;
  }
  return neg;
}

int count_below(const BoundaryProblem& p, double mu) {
  const MetricGraph& g = p.graph;
  int dirichlet = 0;
  if (mu > 0.0) {
    const double k = std::sqrt(mu);
    for (const Edge& e : g.edges()) {
      // Dirichlet eigenvalues (m pi / l)^2 strictly below mu.
      const double r = k * e.length / std::numbers::pi;
      int m = static_cast<int>(std::floor(r));
      if (static_cast<double>(m) == r) --m;
      dirichlet += std::max(0, m);
    }
  }

  int r = 0;
  std::vector<int> offset;
  for (const LocalCondition& lc : p.local) {
    offset.push_back(r);
    r += static_cast<int>(lc.Q.cols());
  }
  if (r == 0) return dirichlet;

  // Qg maps vertex coordinates to edge-end values.
  const int n = p.size();
  Eigen::MatrixXd Qg = Eigen::MatrixXd::Zero(n, r);
  Eigen::MatrixXd Lg = Eigen::MatrixXd::Zero(r, r);
  for (std::size_t v = 0; v < p.local.size(); ++v) {
    const LocalCondition& lc = p.local[v];
    const int q = static_cast<int>(lc.Q.cols());
    for (std::size_t j = 0; j < lc.ends.size(); ++j) {
      Qg.block(lc.ends[j], offset[v], 1, q) = lc.Q.row(static_cast<int>(j));
    }
    Lg.block(offset[v], offset[v], q, q) = lc.L;
  }
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < g.num_edges(); ++e) {
    const EdgeDtN d = edge_dtn(mu, g.length(e));
    D(2 * e, 2 * e) = d.diag;
    D(2 * e + 1, 2 * e + 1) = d.diag;
    D(2 * e, 2 * e + 1) = d.off;
    D(2 * e + 1, 2 * e) = d.off;
  }
  Eigen::MatrixXd M = Lg - Qg.transpose() * D * Qg;
  M = 0.5 * (M + M.transpose()).eval();
  return dirichlet + count_negative(std::move(M));
}

namespace {

constexpr double kFractions[] = {0.481966, 0.381966, 0.618034, 0.3, 0.7, 0.2, 0.8, 0.1, 0.9, 0.05, 0.95};
constexpr double kMargins[] = {1e-2, 1e-4, 1e-6};

class Isolator {
 public:
  Isolator(const BoundaryProblem& p, const SolverOptions& o) : p_(p), o_(o) {}

  double tol(double x) const { return o_.root_tol * scale_of(x); }

  // Count at a window endpoint, nudged off Dirichlet poles in the given direction.
  std::pair<double, int> endpoint(double x, double dir) const {
    // Counts are unreliable within about 1e-6 of an edge Dirichlet eigenvalue.
    double y = x;
    double step = 1e-9 * scale_of(x);
    for (int i = 0; i < 40 && count_safety(p_.graph, y) < 1e-6; ++i) {
      y = x + dir * step;
      step *= 2.0;
    }
    return {y, count_below(p_, y)};
  }

  void isolate(double lo, int clo, double hi, int chi) {
    const int m = chi - clo;
    if (m <= 0) return;
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= tol(mid)) {
      emit(mid, m, clo, false);
      return;
    }
    if (m == 1 && refine_simple(lo, hi, clo)) return;
    double x = 0.0;
    if (!safe_point(lo, hi, &x)) {
      secular_refine(lo, hi, m, clo);
      return;
    }
    const int cx = std::clamp(count_below(p_, x), clo, chi);
    isolate(lo, clo, x, cx);
    isolate(x, cx, hi, chi);
  }

  std::vector<Eigenvalue> take() {
    std::sort(out_.begin(), out_.end(), [](const Eigenvalue& a, const Eigenvalue& b) { return a.lambda < b.lambda; });
    std::vector<Eigenvalue> merged;
    for (const Eigenvalue& e : out_) {
      if (!merged.empty() && e.lambda - merged.back().lambda <= 10.0 * tol(e.lambda)) {
        Eigenvalue& b = merged.back();
        b.lambda = (b.lambda * b.mult + e.lambda * e.mult) / (b.mult + e.mult);
        b.mult += e.mult;
        b.N = b.n + b.mult - 1;
        b.unresolved = b.unresolved || e.unresolved;
      } else {
        merged.push_back(e);
      }
    }
    return merged;
  }

 private:
  void emit(double lambda, int m, int clo, bool unresolved) {
    out_.push_back({lambda, m, clo + 1, clo + m, unresolved});
  }

  bool safe_point(double lo, double hi, double* x) const {
    for (double margin : kMargins) {
      for (double f : kFractions) {
        const double y = lo + f * (hi - lo);
        if (y <= lo || y >= hi) continue;
        if (count_safety(p_.graph, y) >= margin) {
          *x = y;
          return true;
        }
      }
    }
    return false;
  }

  bool root_on(double lo, double hi, double* root) const {
    const auto f = [&](double x) { return secular_det(p_, x); };
    const double flo = f(lo);
    const double fhi = f(hi);
    if (!std::isfinite(flo) || !std::isfinite(fhi)) return false;
    if (flo == 0.0) {
      *root = lo;
      return true;
    }
    if (fhi == 0.0) {
      *root = hi;
      return true;
    }
    if ((flo < 0.0) == (fhi < 0.0)) return false;
    std::uintmax_t iters = 200;
    const auto done = [&](double a, double b) { return std::abs(b - a) <= tol(a); };
    const auto br = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, done, iters);
    *root = 0.5 * (br.first + br.second);
    return true;
  }

  bool refine_simple(double lo, double hi, int clo) {
    double root = 0.0;
    if (!root_on(lo, hi, &root)) return false;
    emit(root, 1, clo, false);
    return true;
  }

  void secular_refine(double lo, double hi, int m, int clo) {
    double root = 0.0;
    if (m % 2 == 1 && root_on(lo, hi, &root)) {
      emit(root, m, clo, m > 1);
      return;
    }
    // sigma_min has a corner at the root, so a comparison-only golden-section search is used.
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo;
    double b = hi;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = sigma_min(p_, x1);
    double f2 = sigma_min(p_, x2);
    for (int i = 0; i < 200 && b - a > tol(a); ++i) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - kInvPhi * (b - a);
        f1 = sigma_min(p_, x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kInvPhi * (b - a);
        f2 = sigma_min(p_, x2);
      }
    }
    emit(0.5 * (a + b), m, clo, true);
  }

  const BoundaryProblem& p_;
  const SolverOptions& o_;
  std::vector<Eigenvalue> out_;
};

}  // namespace

EigenvalueList eigenvalues_in(const BoundaryProblem& p, double a, double b, const SolverOptions& opts) {
  if (!(a < b)) throw std::invalid_argument("eigenvalues_in: empty window");
  Isolator iso(p, opts);
  const auto [lo, clo] = iso.endpoint(a, -1.0);
  const auto [hi, chi] = iso.endpoint(b, 1.0);
  if (chi < clo) throw SolverError("eigenvalue count decreased across the window");
  // A coarse grid keeps neighbouring clusters apart before bisection.
  const int cells = std::max(1, static_cast<int>(std::ceil((hi - lo) / opts.resolution)));
  double x0 = lo;
  int c0 = clo;
  for (int i = 1; i <= cells; ++i) {
    double x1 = hi;
    int c1 = chi;
    if (i < cells) {
      x1 = lo + (i - 1 + 0.381966) * (hi - lo) / cells;
      if (count_safety(p.graph, x1) < 1e-6) continue;
      c1 = std::clamp(count_below(p, x1), c0, chi);
    }
    iso.isolate(x0, c0, x1, c1);
    x0 = x1;
    c0 = c1;
  }
  EigenvalueList list;
  list.lo = a;
  list.hi = b;
  list.below = clo;
  list.values = iso.take();
  for (const Eigenvalue& e : list.values) {
    const double guard = opts.window_guard * scale_of(e.lambda);
    if (e.lambda < a + guard || e.lambda > b - guard) {
      throw WindowGuardError("window endpoint within the guard of eigenvalue " + std::to_string(e.lambda));
    }
  }
  return list;
}

double spectrum_lower_bound(const BoundaryProblem& p) {
  double mu = -1.0;
  for (int i = 0; i < 80; ++i) {
    if (count_below(p, mu) == 0) return mu;
    mu *= 4.0;
  }
  throw SolverError("no lower bound for the spectrum found");
}

std::vector<double> lowest_eigenvalues(const BoundaryProblem& p, int count, const SolverOptions& opts) {
  if (count <= 0) return {};
  const double lo = spectrum_lower_bound(p);
  double hi = 1.0;
  for (int i = 0; i < 80 && count_below(p, hi) < count; ++i) hi = 2.0 * std::abs(hi) + 1.0;
  for (int attempt = 0; attempt < 16; ++attempt) {
    try {
      std::vector<double> all = eigenvalues_in(p, lo, hi, opts).expanded();
      if (static_cast<int>(all.size()) < count) throw SolverError("missing eigenvalues in window");
      all.resize(count);
      return all;
    } catch (const WindowGuardError&) {
      hi = hi * 1.0137 + 0.0731;
    }
  }
  throw SolverError("could not place a window around the lowest eigenvalues");
}

EigenvalueList eigenvalues_near(const BoundaryProblem& p, double lambda, double radius, const SolverOptions& opts) {
  for (int attempt = 0; attempt < 12; ++attempt) {
    const double r = radius * (1.0 + 0.137 * attempt);
    try {
      return eigenvalues_in(p, lambda - r, lambda + 1.071 * r, opts);
    } catch (const WindowGuardError&) {
    }
  }
  throw SolverError("could not place a window near " + std::to_string(lambda));
}

std::vector<EigenFunction> eigenfunction(const BoundaryProblem& p, double lambda, int mult,
                                         const SolverOptions& opts) {
  const MetricGraph& g = p.graph;
  const Eigen::MatrixXd M = equilibrated_secular(p, lambda);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const int n = static_cast<int>(M.cols());
  int m = mult;
  if (m <= 0) {
    m = 0;
    for (int i = 0; i < n; ++i) {
      if (sv(i) < opts.null_tol * std::max(1.0, sv(0))) ++m;
    }
  }
  if (m == 0 || m > n) throw SolverError("no null space at lambda = " + std::to_string(lambda));
  if (sv(n - m) > 1e-5 * std::max(1.0, sv(0))) throw SolverError("lambda = " + std::to_string(lambda) + " is not an eigenvalue");
  Eigen::MatrixXd V = svd.matrixV().rightCols(m);
  V(Eigen::seq(1, n - 1, 2), Eigen::all) *= column_scale(lambda);

  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < g.num_edges(); ++e) {
    const EdgeGram eg = edge_gram(lambda, g.length(e));
    G(2 * e, 2 * e) = eg.cc;
    G(2 * e, 2 * e + 1) = eg.cs;
    G(2 * e + 1, 2 * e) = eg.cs;
    G(2 * e + 1, 2 * e + 1) = eg.ss;
  }
  const Eigen::MatrixXd Gv = V.transpose() * G * V;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Gv + Gv.transpose()));
  if (es.eigenvalues().minCoeff() <= 0.0) throw SolverError("degenerate Gram matrix");
  const Eigen::MatrixXd basis = V * es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal();

  const Eigen::MatrixXd raw = assemble_secular(p, lambda);
  std::vector<EigenFunction> out;
  for (int k = 0; k < m; ++k) {
    EigenFunction f;
    f.lambda = lambda;
    f.coeffs = basis.col(k);
    int big = 0;
    f.coeffs.cwiseAbs().maxCoeff(&big);
    if (f.coeffs(big) < 0.0) f.coeffs = -f.coeffs;
    f.residual = (raw * f.coeffs).lpNorm<Eigen::Infinity>();
    out.push_back(std::move(f));
  }
  return out;
}

TracePair eval(const MetricGraph& g, const EigenFunction& f, int edge, double x) {
  return edge_eval(f.coeffs(2 * edge), f.coeffs(2 * edge + 1), f.lambda, x, g.length(edge));
}

TracePair eval_end(const MetricGraph& g, const EigenFunction& f, int end) {
  const int e = end_edge(end);
  const double x = is_head_end(end) ? g.length(e) : 0.0;
  TracePair t = edge_eval(f.coeffs(2 * e), f.coeffs(2 * e + 1), f.lambda, x, g.length(e));
  if (is_head_end(end)) t.df = -t.df;
  return t;
}

double l2_norm(const MetricGraph& g, const EigenFunction& f) {
  double sum = 0.0;
  for (int e = 0; e < g.num_edges(); ++e) {
    const EdgeGram eg = edge_gram(f.lambda, g.length(e));
    const double a = f.coeffs(2 * e);
    const double b = f.coeffs(2 * e + 1);
    sum += a * a * eg.cc + 2.0 * a * b * eg.cs + b * b * eg.ss;
  }
  return std::sqrt(std::max(0.0, sum));
}

double max_abs(const MetricGraph& g, const EigenFunction& f) {
  double m = 0.0;
  for (int e = 0; e < g.num_edges(); ++e) {
    const double a = f.coeffs(2 * e);
    const double b = f.coeffs(2 * e + 1);
    const double l = g.length(e);
    if (f.lambda > 0.0) {
      // a cos kx + (b/k) sin kx reaches its amplitude when a full half period fits.
      const double k = std::sqrt(f.lambda);
      if (k * l >= std::numbers::pi) {
        m = std::max(m, std::hypot(a, b / k));
        continue;
      }
    }
    constexpr int kSamples = 256;
    for (int i = 0; i <= kSamples; ++i) {
      const double x = l * i / kSamples;
      m = std::max(m, std::abs(edge_eval(a, b, f.lambda, x, l).f));
    }
  }
  return m;
}

SpectralCounts spectral_counts(const BoundaryProblem& p, double lambda, const SolverOptions& opts) {
  const double radius = 1e-3 * scale_of(lambda);
  const EigenvalueList list = eigenvalues_near(p, lambda, radius, opts);
  for (const Eigenvalue& e : list.values) {
    if (std::abs(e.lambda - lambda) <= 1e-6 * scale_of(lambda)) return {e.lambda, e.n, e.N, e.mult};
  }
  throw SolverError(std::to_string(lambda) + " is not an eigenvalue");
}

GenericityReport check_generic(const BoundaryProblem& p, const EigenFunction& f) {
  const MetricGraph& g = p.graph;
  GenericityReport r;
  r.bound = std::pow(std::numbers::pi / g.min_length(), 2);
  r.above_bound = f.lambda > r.bound;
  const double top = max_abs(g, f);
  const double k = std::sqrt(std::max(1.0, f.lambda));
  r.min_vertex_value = 1.0;
  r.min_trace_norm = 1.0;
  for (int v = 0; v < g.num_vertices(); ++v) {
    for (int end : g.ends_at(v)) {
      const TracePair t = eval_end(g, f, end);
      r.min_trace_norm = std::min(r.min_trace_norm, std::hypot(t.f, t.df / k) / top);
    }
    if (g.degree(v) > 2) {
      const double val = std::abs(eval_end(g, f, g.ends_at(v)[0]).f) / top;
      r.min_vertex_value = std::min(r.min_vertex_value, val);
    }
  }
  r.vertex_nonvanishing = r.min_vertex_value >= 1e-8;
  return r;
}

}  // namespace qg
