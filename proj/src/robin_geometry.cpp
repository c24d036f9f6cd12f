#include "qg/robin_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "qg/errors.hpp"

namespace qg {

namespace {

constexpr double kSnap = 1e-9;

double tau_on_edge(const EigenFunction& f, double alpha, int e, double x, double l) {
  const TracePair t = edge_eval(f.coeffs(2 * e), f.coeffs(2 * e + 1), f.lambda, std::clamp(x, 0.0, l), l);
  return mixed_trace(alpha, t).tau;
}

// Zeros of P cos kx + Q sin kx in [-snap, l + snap].
std::vector<double> closed_form_zeros(double P, double Q, double k, double l, double snap) {
  double y0 = std::atan2(P, -Q);
  y0 = std::fmod(y0, std::numbers::pi);
  if (y0 < 0.0) y0 += std::numbers::pi;
  std::vector<double> xs;
  // A root just below 0 may sit at y0 close to pi.
  for (double y = y0 - std::numbers::pi;; y += std::numbers::pi) {
    const double x = y / k;
    if (x > l + snap) break;
    if (x >= -snap) xs.push_back(x);
  }
  return xs;
}

std::vector<double> sampled_zeros(const EigenFunction& f, double alpha, int e, double l) {
  constexpr int kSamples = 64;
  std::vector<double> xs;
  const auto tau = [&](double x) { return tau_on_edge(f, alpha, e, x, l); };
  double x0 = 0.0;
  double f0 = tau(0.0);
  if (f0 == 0.0) xs.push_back(0.0);
  for (int i = 1; i <= kSamples; ++i) {
    const double x1 = l * i / kSamples;
    const double f1 = tau(x1);
    if (f1 == 0.0) {
      xs.push_back(x1);
    } else if (f0 != 0.0 && (f0 < 0.0) != (f1 < 0.0)) {
      std::uintmax_t iters = 200;
      const auto done = [&](double a, double b) { return std::abs(b - a) <= 1e-15 * l; };
      const auto br = boost::math::tools::toms748_solve(tau, x0, x1, f0, f1, done, iters);
      xs.push_back(0.5 * (br.first + br.second));
    }
    x0 = x1;
    f0 = f1;
  }
  return xs;
}

}  // namespace

double mixed_trace_at(const MetricGraph& g, const EigenFunction& f, double alpha, const PointOnGraph& p) {
  return tau_on_edge(f, alpha, p.edge, p.x, g.length(p.edge));
}

RobinPointSet robin_points(const MetricGraph& g, const EigenFunction& f, double alpha) {
  RobinPointSet out;
  out.alpha = reduce_angle(alpha);
  out.lambda = f.lambda;
  std::vector<int> vertex_hits;
  for (int e = 0; e < g.num_edges(); ++e) {
    const double l = g.length(e);
    const double snap = kSnap * l;
    const double a = f.coeffs(2 * e);
    const double b = f.coeffs(2 * e + 1);
    std::vector<double> xs;
    if (f.lambda > 1e-8) {
      const double k = std::sqrt(f.lambda);
      const double A = a;
      const double B = b / k;
      const double P = A * std::cos(alpha) - k * B * std::sin(alpha);
      const double Q = B * std::cos(alpha) + k * A * std::sin(alpha);
      if (std::hypot(P, Q) <= 1e-14 * std::max(1.0, k) * std::hypot(A, B)) {
        throw GenericityError("mixed trace vanishes identically on edge " + std::to_string(e));
      }
      xs = closed_form_zeros(P, Q, k, l, snap);
    } else {
      xs = sampled_zeros(f, alpha, e, l);
    }
    for (double x : xs) {
      int v = -1;
      if (x <= snap) v = g.edge(e).tail;
      if (x >= l - snap) v = g.edge(e).head;
      if (v < 0) {
        out.points.push_back(PointOnGraph::interior(e, x));
        continue;
      }
      const int d = g.degree(v);
      if (d == 1) continue;
      if (d > 2) {
        throw GenericityError("Robin point at vertex '" + g.vertex_id(v) + "' of degree " + std::to_string(d));
      }
      if (std::find(vertex_hits.begin(), vertex_hits.end(), v) == vertex_hits.end()) {
        vertex_hits.push_back(v);
        out.points.push_back(PointOnGraph::at_vertex(g, v));
      }
    }
  }
  std::sort(out.points.begin(), out.points.end(), point_less);
  return out;
}

RobinDomainPartition robin_domains(const MetricGraph& g, const RobinPointSet& pts) {
  RobinDomainPartition r;
  r.cut = cut_at_points(g, pts.points);
  r.nu = r.cut.cut.num_components;
  return r;
}

EulerIdentity euler_identity_check(const MetricGraph& g, const RobinPointSet& pts,
                                   const RobinDomainPartition& partition) {
  return {betti(g), pts.size() - partition.nu + 1};
}

}  // namespace qg
