#include "qg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include <boost/pending/disjoint_sets.hpp>

namespace qg {

namespace {

std::vector<int> label_components(int n, const std::vector<Edge>& edges, int* count) {
  boost::disjoint_sets_with_storage<> sets(n);
  for (int v = 0; v < n; ++v) sets.make_set(v);
  for (const Edge& e : edges) sets.union_set(e.tail, e.head);
  std::vector<int> label(n, -1);
  std::vector<int> root_label(n, -1);
  int next = 0;
  for (int v = 0; v < n; ++v) {
    const int r = static_cast<int>(sets.find_set(v));
    if (root_label[r] < 0) root_label[r] = next++;
    label[v] = root_label[r];
  }
  *count = next;
  return label;
}

std::string fresh_id(const std::unordered_set<std::string>& used, const std::string& base) {
  std::string id = base;
  while (used.count(id)) id += "'";
  return id;
}

}  // namespace

MetricGraph::MetricGraph(std::vector<std::string> vertex_ids, std::vector<Edge> edges)
    : ids_(std::move(vertex_ids)), edges_(std::move(edges)) {
  if (edges_.empty()) throw std::invalid_argument("graph has no edges");
  std::unordered_set<std::string> seen;
  for (const auto& id : ids_) {
    if (!seen.insert(id).second) throw std::invalid_argument("duplicate vertex id '" + id + "'");
  }
  const int n = num_vertices();
  ends_.assign(n, {});
  min_length_ = std::numeric_limits<double>::infinity();
  for (int e = 0; e < num_edges(); ++e) {
    const Edge& ed = edges_[e];
    if (ed.tail < 0 || ed.tail >= n || ed.head < 0 || ed.head >= n) {
      throw std::invalid_argument("edge " + std::to_string(e) + " has a dangling endpoint");
    }
    if (!(ed.length > 0.0) || !std::isfinite(ed.length)) {
      throw std::invalid_argument("edge " + std::to_string(e) + " has non-positive length");
    }
    ends_[ed.tail].push_back(tail_end(e));
    ends_[ed.head].push_back(head_end(e));
    min_length_ = std::min(min_length_, ed.length);
  }
  component_ = label_components(n, edges_, &num_components_);
  oriented_ = true;
  for (int v = 0; v < n; ++v) {
    if (degree(v) == 2 && !degree_two_oriented(v)) oriented_ = false;
  }
}

int MetricGraph::vertex_index(const std::string& id) const {
  auto it = std::find(ids_.begin(), ids_.end(), id);
  return it == ids_.end() ? -1 : static_cast<int>(it - ids_.begin());
}

int MetricGraph::end_vertex(int end) const {
  const Edge& e = edges_.at(end_edge(end));
  return is_head_end(end) ? e.head : e.tail;
}

double MetricGraph::total_length() const {
  double s = 0.0;
  for (const Edge& e : edges_) s += e.length;
  return s;
}

bool MetricGraph::degree_two_oriented(int v) const {
  const auto& en = ends_.at(v);
  if (en.size() != 2) return false;
  return is_head_end(en[0]) != is_head_end(en[1]);
}

int MetricGraph::incoming_end(int v) const {
  if (!degree_two_oriented(v)) {
    throw std::invalid_argument("vertex '" + ids_.at(v) + "' is not an oriented degree-2 vertex");
  }
  const auto& en = ends_[v];
  return is_head_end(en[0]) ? en[0] : en[1];
}

int MetricGraph::outgoing_end(int v) const {
  if (!degree_two_oriented(v)) {
    throw std::invalid_argument("vertex '" + ids_.at(v) + "' is not an oriented degree-2 vertex");
  }
  const auto& en = ends_[v];
  return is_head_end(en[0]) ? en[1] : en[0];
}

int betti(const MetricGraph& g) {
  return g.num_edges() - g.num_vertices() + g.num_components();
}

MetricGraph orient_for_degree_two(const MetricGraph& g) {
  std::vector<Edge> edges = g.edges();
  const int n = g.num_vertices();
  std::vector<char> visited(edges.size(), 0);

  auto other_end = [](int end) { return end ^ 1; };
  // Walks a maximal chain starting with edge-end `start` leaving vertex `from`.
  // Returns the list of (edge, leaves-from-tail) along the walk.
  auto walk = [&](int start) {
    std::vector<std::pair<int, bool>> chain;
    int end = start;
    while (true) {
      const int e = end_edge(end);
      if (visited[e]) break;
      visited[e] = 1;
      chain.emplace_back(e, !is_head_end(end));
      const int far = other_end(end);
      const int w = g.end_vertex(far);
      if (g.degree(w) != 2) break;
      const auto& ew = g.ends_at(w);
      const int next = (ew[0] == far) ? ew[1] : ew[0];
      end = next;
    }
    return chain;
  };
  auto apply = [&](const std::vector<std::pair<int, bool>>& chain) {
    // Consistent in either direction already?
    bool all_fwd = true, all_bwd = true;
    for (const auto& [e, fwd] : chain) {
      all_fwd = all_fwd && fwd;
      all_bwd = all_bwd && !fwd;
    }
    if (all_fwd || all_bwd) return;
    for (const auto& [e, fwd] : chain) {
      if (!fwd) std::swap(edges[e].tail, edges[e].head);
    }
  };

  for (int v = 0; v < n; ++v) {
    if (g.degree(v) == 2) continue;
    for (int end : g.ends_at(v)) {
      const int w = g.end_vertex(end ^ 1);
      if (g.degree(w) != 2 || visited[end_edge(end)]) continue;
      apply(walk(end));
    }
  }
  // Remaining unvisited edges touching degree-2 vertices form pure cycles.
  for (int v = 0; v < n; ++v) {
    if (g.degree(v) != 2) continue;
    const int end = g.ends_at(v)[0];
    if (visited[end_edge(end)]) continue;
    apply(walk(end));
  }
  return MetricGraph(g.vertex_ids(), std::move(edges));
}

MetricGraph reverse_all(const MetricGraph& g) {
  std::vector<Edge> edges = g.edges();
  for (Edge& e : edges) std::swap(e.tail, e.head);
  return MetricGraph(g.vertex_ids(), std::move(edges));
}

PointOnGraph PointOnGraph::at_vertex(const MetricGraph& g, int v) {
  if (g.degree(v) != 2) {
    throw std::invalid_argument("vertex point requires degree 2 at '" + g.vertex_id(v) + "'");
  }
  int end = g.ends_at(v)[0];
  if (g.degree_two_oriented(v)) end = g.outgoing_end(v);
  PointOnGraph p;
  p.edge = end_edge(end);
  p.x = is_head_end(end) ? g.length(p.edge) : 0.0;
  p.vertex = v;
  return p;
}

PointOnGraph normalize_point(const MetricGraph& g, const PointOnGraph& p) {
  if (p.is_vertex()) return PointOnGraph::at_vertex(g, p.vertex);
  const double len = g.length(p.edge);
  const double tol = kPointTolerance * len;
  const Edge& e = g.edge(p.edge);
  if (std::abs(p.x) <= tol && g.degree(e.tail) == 2) return PointOnGraph::at_vertex(g, e.tail);
  if (std::abs(p.x - len) <= tol && g.degree(e.head) == 2) return PointOnGraph::at_vertex(g, e.head);
  return p;
}

bool same_point(const MetricGraph& g, const PointOnGraph& a, const PointOnGraph& b) {
  const PointOnGraph na = normalize_point(g, a);
  const PointOnGraph nb = normalize_point(g, b);
  if (na.is_vertex() || nb.is_vertex()) return na.vertex == nb.vertex;
  return na.edge == nb.edge && std::abs(na.x - nb.x) <= kPointTolerance * g.length(na.edge);
}

bool point_less(const PointOnGraph& a, const PointOnGraph& b) {
  if (a.edge != b.edge) return a.edge < b.edge;
  return a.x < b.x;
}

Subdivision insert_degree_two(const MetricGraph& g, const std::vector<PointOnGraph>& pts) {
  std::vector<std::vector<std::pair<double, int>>> cuts(g.num_edges());
  Subdivision out;
  out.point_vertices.assign(pts.size(), -1);
  std::vector<std::string> ids = g.vertex_ids();
  std::unordered_set<std::string> used(ids.begin(), ids.end());

  for (std::size_t i = 0; i < pts.size(); ++i) {
    const PointOnGraph p = normalize_point(g, pts[i]);
    if (p.is_vertex()) {
      out.point_vertices[i] = p.vertex;
      continue;
    }
    if (p.edge < 0 || p.edge >= g.num_edges()) throw std::invalid_argument("point on unknown edge");
    const double len = g.length(p.edge);
    if (!(p.x > 0.0) || !(p.x < len)) {
      throw std::invalid_argument("subdivision point is not interior to edge " + std::to_string(p.edge));
    }
    auto& list = cuts[p.edge];
    int existing = -1;
    for (const auto& [x, idx] : list) {
      if (std::abs(x - p.x) <= kPointTolerance * len) existing = idx;
    }
    if (existing >= 0) {
      out.point_vertices[i] = existing;
      continue;
    }
    const int v = static_cast<int>(ids.size());
    ids.push_back(fresh_id(used, g.vertex_id(g.edge(p.edge).tail) + ">" + g.vertex_id(g.edge(p.edge).head) +
                                     "#" + std::to_string(p.edge) + "." + std::to_string(list.size())));
    used.insert(ids.back());
    list.emplace_back(p.x, v);
    out.point_vertices[i] = v;
  }

  std::vector<Edge> edges;
  for (int e = 0; e < g.num_edges(); ++e) {
    auto list = cuts[e];
    std::sort(list.begin(), list.end());
    const Edge& ed = g.edge(e);
    int from = ed.tail;
    double x0 = 0.0;
    for (const auto& [x, v] : list) {
      edges.push_back({from, v, x - x0});
      out.pieces.push_back({e, x0});
      from = v;
      x0 = x;
    }
    edges.push_back({from, ed.head, ed.length - x0});
    out.pieces.push_back({e, x0});
  }
  out.graph = MetricGraph(std::move(ids), std::move(edges));
  return out;
}

CutResult cut_at_vertices(const MetricGraph& g, const std::vector<int>& vertices) {
  std::vector<char> is_cut(g.num_vertices(), 0);
  for (int v : vertices) {
    if (v < 0 || v >= g.num_vertices()) throw std::invalid_argument("cut vertex out of range");
    if (g.degree(v) != 2) {
      throw std::invalid_argument("cut point at vertex '" + g.vertex_id(v) + "' of degree " +
                                  std::to_string(g.degree(v)));
    }
    if (is_cut[v]) throw std::invalid_argument("cut vertex '" + g.vertex_id(v) + "' repeated");
    if (!g.degree_two_oriented(v)) {
      throw std::invalid_argument("cut vertex '" + g.vertex_id(v) + "' is not oriented head-to-tail");
    }
    is_cut[v] = 1;
  }

  CutResult out;
  out.cut_vertices = vertices;
  std::vector<std::string> ids;
  std::vector<int> new_index(g.num_vertices(), -1);
  std::unordered_set<std::string> used(g.vertex_ids().begin(), g.vertex_ids().end());
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (is_cut[v]) continue;
    new_index[v] = static_cast<int>(ids.size());
    ids.push_back(g.vertex_id(v));
    out.vertex_origin.push_back(v);
  }
  std::vector<int> end_target(2 * g.num_edges(), -1);
  for (int v : vertices) {
    const int minus = static_cast<int>(ids.size());
    ids.push_back(fresh_id(used, g.vertex_id(v) + "-"));
    used.insert(ids.back());
    out.vertex_origin.push_back(v);
    const int plus = static_cast<int>(ids.size());
    ids.push_back(fresh_id(used, g.vertex_id(v) + "+"));
    used.insert(ids.back());
    out.vertex_origin.push_back(v);
    end_target[g.incoming_end(v)] = minus;
    end_target[g.outgoing_end(v)] = plus;
    out.daughters.emplace_back(minus, plus);
  }
  std::vector<Edge> edges;
  edges.reserve(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    const int t = end_target[tail_end(e)] >= 0 ? end_target[tail_end(e)] : new_index[ed.tail];
    const int h = end_target[head_end(e)] >= 0 ? end_target[head_end(e)] : new_index[ed.head];
    edges.push_back({t, h, ed.length});
  }
  out.graph = MetricGraph(std::move(ids), std::move(edges));
  out.component = out.graph.component_labels();
  out.num_components = out.graph.num_components();
  return out;
}

PointCut cut_at_points(const MetricGraph& g, const std::vector<PointOnGraph>& pts) {
  PointCut out;
  out.subdivision = insert_degree_two(g, pts);
  std::vector<int> verts = out.subdivision.point_vertices;
  std::vector<int> uniq;
  for (int v : verts) {
    if (std::find(uniq.begin(), uniq.end(), v) != uniq.end()) {
      throw std::invalid_argument("cut points are not distinct");
    }
    uniq.push_back(v);
  }
  out.cut = cut_at_vertices(out.subdivision.graph, uniq);
  return out;
}

}  // namespace qg
