#pragma once

#include <vector>

#include "qg/graph.hpp"
#include "qg/solver.hpp"

namespace qg {

/// Zeros of tau_alpha f: interior edge points and degree-2 vertices, in
/// canonical order (edge id, then coordinate).
struct RobinPointSet {
  std::vector<PointOnGraph> points;
  double alpha = 0.0;
  double lambda = 0.0;

  int size() const { return static_cast<int>(points.size()); }
};

/// Throws GenericityError when a zero lands on a vertex of degree > 2 or when
/// tau_alpha f vanishes identically on an edge. Zeros at degree-1 vertices are
/// not interior points and are not reported.
RobinPointSet robin_points(const MetricGraph& g, const EigenFunction& f, double alpha);

struct RobinDomainPartition {
  PointCut cut;
  int nu = 0;  ///< number of Robin domains
};

RobinDomainPartition robin_domains(const MetricGraph& g, const RobinPointSet& pts);

struct EulerIdentity {
  int lhs = 0;  ///< beta of the graph
  int rhs = 0;  ///< |P| - nu + 1
  bool holds() const { return lhs == rhs; }
};

EulerIdentity euler_identity_check(const MetricGraph& g, const RobinPointSet& pts,
                                   const RobinDomainPartition& partition);

/// tau_alpha f at a point, derivative along the edge orientation.
double mixed_trace_at(const MetricGraph& g, const EigenFunction& f, double alpha, const PointOnGraph& p);

}  // namespace qg
