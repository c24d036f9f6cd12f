#pragma once

#include <string>
#include <utility>
#include <vector>

namespace qg {

/// Directed edge; the arclength coordinate runs from tail (x = 0) to head (x = length).
struct Edge {
  int tail = 0;
  int head = 0;
  double length = 0.0;
};

/// Edge-ends are numbered 2e (tail of edge e) and 2e + 1 (head of edge e).
inline int tail_end(int e) { return 2 * e; }
inline int head_end(int e) { return 2 * e + 1; }
inline int end_edge(int end) { return end / 2; }
inline bool is_head_end(int end) { return (end & 1) != 0; }

/// Finite metric multigraph with loops. Immutable after construction.
class MetricGraph {
 public:
  MetricGraph() = default;
  /// Throws std::invalid_argument on non-positive lengths, dangling endpoints,
  /// duplicate vertex ids or an empty edge set.
  MetricGraph(std::vector<std::string> vertex_ids, std::vector<Edge> edges);

  int num_vertices() const { return static_cast<int>(ids_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<std::string>& vertex_ids() const { return ids_; }
  const std::string& vertex_id(int v) const { return ids_.at(v); }
  /// -1 when absent.
  int vertex_index(const std::string& id) const;

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_.at(e); }
  double length(int e) const { return edges_.at(e).length; }

  /// Incident edge-ends; a loop appears twice.
  const std::vector<int>& ends_at(int v) const { return ends_.at(v); }
  int degree(int v) const { return static_cast<int>(ends_.at(v).size()); }
  int end_vertex(int end) const;

  double min_length() const { return min_length_; }
  double total_length() const;

  int num_components() const { return num_components_; }
  const std::vector<int>& component_labels() const { return component_; }

  /// True when every degree-2 vertex has one incoming and one outgoing edge-end.
  bool oriented() const { return oriented_; }
  bool degree_two_oriented(int v) const;
  /// Head end of the incoming edge at a correctly oriented degree-2 vertex (the v- side).
  int incoming_end(int v) const;
  /// Tail end of the outgoing edge at a correctly oriented degree-2 vertex (the v+ side).
  int outgoing_end(int v) const;

 private:
  std::vector<std::string> ids_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> ends_;
  std::vector<int> component_;
  int num_components_ = 0;
  double min_length_ = 0.0;
  bool oriented_ = false;
};

/// |E| - |V| + number of connected components.
int betti(const MetricGraph& g);

/// Re-orients maximal chains and cycles of degree-2 vertices head-to-tail.
/// Chains that already satisfy the constraint are left untouched.
MetricGraph orient_for_degree_two(const MetricGraph& g);

/// Same graph with every edge reversed.
MetricGraph reverse_all(const MetricGraph& g);

/// A point of the graph: an interior point of an edge, or a degree-2 vertex.
/// Vertex points are stored on the outgoing edge at x = 0.
struct PointOnGraph {
  int edge = 0;
  double x = 0.0;
  int vertex = -1;

  bool is_vertex() const { return vertex >= 0; }
  static PointOnGraph interior(int edge, double x) { return {edge, x, -1}; }
  static PointOnGraph at_vertex(const MetricGraph& g, int v);
};

/// Coordinates within this fraction of the edge length are treated as equal.
inline constexpr double kPointTolerance = 1e-12;

/// Maps endpoint coordinates on a degree-2 vertex to the vertex form.
PointOnGraph normalize_point(const MetricGraph& g, const PointOnGraph& p);
bool same_point(const MetricGraph& g, const PointOnGraph& a, const PointOnGraph& b);
/// Canonical order: edge id, then coordinate; vertex points use their stored edge.
bool point_less(const PointOnGraph& a, const PointOnGraph& b);

struct EdgePiece {
  int edge = 0;         // edge of the parent graph
  double offset = 0.0;  // start coordinate inside the parent edge
};

struct Subdivision {
  MetricGraph graph;
  /// Vertex of the new graph for each input point, in input order.
  std::vector<int> point_vertices;
  /// Origin of each edge of the new graph.
  std::vector<EdgePiece> pieces;
};

/// Splits edges at interior points. Degree-2 vertex points map to themselves.
/// Throws std::invalid_argument for coordinates at or beyond the edge ends.
Subdivision insert_degree_two(const MetricGraph& g, const std::vector<PointOnGraph>& pts);

struct CutResult {
  MetricGraph graph;
  /// Cut vertices of the input graph, in input order.
  std::vector<int> cut_vertices;
  /// (v-, v+) daughters in the cut graph for each cut vertex.
  std::vector<std::pair<int, int>> daughters;
  /// Parent vertex of every vertex of the cut graph.
  std::vector<int> vertex_origin;
  std::vector<int> component;
  int num_components = 0;
};

/// Cuts at degree-2 vertices. Throws std::invalid_argument for other degrees,
/// repeated vertices or an orientation that does not distinguish v- from v+.
CutResult cut_at_vertices(const MetricGraph& g, const std::vector<int>& vertices);

struct PointCut {
  Subdivision subdivision;
  CutResult cut;
};

/// Subdivides at interior points, then cuts at all given points.
PointCut cut_at_points(const MetricGraph& g, const std::vector<PointOnGraph>& pts);

}  // namespace qg
