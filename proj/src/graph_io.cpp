#include "qg/graph_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <yaml-cpp/yaml.h>

#include "qg/errors.hpp"

namespace qg {

namespace {

double parse_length(const YAML::Node& node) {
  if (!node || !node.IsScalar()) throw ParseError("edge length must be a scalar");
  const std::string s = node.Scalar();
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw ParseError("invalid edge length '" + s + "'");
  return value;
}

double parse_number(const std::string& s, const std::string& what) {
  double value = 0.0;
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), last, value);
  if (ec != std::errc() || ptr != last) throw ParseError("invalid " + what + " '" + s + "'");
  return value;
}

std::string read_file(const std::string& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + what + " '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string scalar_id(const YAML::Node& node, const char* what) {
  if (!node || !node.IsScalar()) throw ParseError(std::string(what) + " must be a scalar id");
  return node.Scalar();
}

}  // namespace

MetricGraph parse_graph(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& ex) {
    throw ParseError(std::string("graph file: ") + ex.what());
  }
  if (!root.IsMap()) throw ParseError("graph file: top level must be a mapping");
  const YAML::Node vs = root["vertices"];
  const YAML::Node es = root["edges"];
  if (!vs || !vs.IsSequence()) throw ParseError("graph file: 'vertices' must be a list");
  if (!es || !es.IsSequence()) throw ParseError("graph file: 'edges' must be a list");

  std::vector<std::string> ids;
  for (const auto& v : vs) ids.push_back(scalar_id(v, "vertex"));
  auto index_of = [&](const std::string& id) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] == id) return static_cast<int>(i);
    }
    throw ParseError("graph file: edge endpoint '" + id + "' is not a declared vertex");
  };

  std::vector<Edge> edges;
  for (const auto& e : es) {
    if (!e.IsMap()) throw ParseError("graph file: each edge must be a mapping");
    Edge ed;
    ed.tail = index_of(scalar_id(e["from"], "edge 'from'"));
    ed.head = index_of(scalar_id(e["to"], "edge 'to'"));
    ed.length = parse_length(e["length"]);
    edges.push_back(ed);
  }

  std::string orient = "auto";
  if (root["orient"]) orient = scalar_id(root["orient"], "orient");
  if (orient != "auto" && orient != "declared") {
    throw ParseError("graph file: orient must be 'auto' or 'declared'");
  }

  MetricGraph g;
  try {
    g = MetricGraph(std::move(ids), std::move(edges));
  } catch (const std::invalid_argument& ex) {
    throw ParseError(std::string("graph file: ") + ex.what());
  }
  return orient == "auto" ? orient_for_degree_two(g) : g;
}

MetricGraph load_graph(const std::string& path) { return parse_graph(read_file(path, "graph file")); }

std::vector<VertexCondition> parse_conditions(const MetricGraph& g, const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& ex) {
    throw ParseError(std::string("conditions file: ") + ex.what());
  }
  if (!root.IsMap() || !root["conditions"] || !root["conditions"].IsSequence()) {
    throw ParseError("conditions file: expected a 'conditions' list");
  }
  std::vector<VertexCondition> out(g.num_vertices(), NeumannKirchhoff{});
  for (const auto& item : root["conditions"]) {
    if (!item.IsMap()) throw ParseError("conditions file: each entry must be a mapping");
    const std::string id = scalar_id(item["vertex"], "condition 'vertex'");
    const int v = g.vertex_index(id);
    if (v < 0) throw ParseError("conditions file: unknown vertex '" + id + "'");
    const std::string type = scalar_id(item["type"], "condition 'type'");
    const double alpha = item["alpha"] ? parse_number(scalar_id(item["alpha"], "alpha"), "alpha") : 0.0;
    VertexCondition c;
    if (type == "nk") {
      c = NeumannKirchhoff{};
    } else if (type == "delta") {
      const std::string t = scalar_id(item["t"], "condition 't'");
      c = DeltaAlpha{alpha, t == "inf" ? ExtendedReal::infinity() : ExtendedReal(parse_number(t, "coupling"))};
    } else if (type == "robin") {
      c = RobinFixed{alpha};
    } else {
      throw ParseError("conditions file: unknown type '" + type + "'");
    }
    try {
      local_condition(g, v, c);
    } catch (const std::invalid_argument& ex) {
      throw ParseError("conditions file: vertex '" + id + "': " + ex.what());
    }
    out[v] = c;
  }
  return out;
}

std::vector<VertexCondition> load_conditions(const MetricGraph& g, const std::string& path) {
  return parse_conditions(g, read_file(path, "conditions file"));
}

PointOnGraph parse_point(const MetricGraph& g, const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    const int v = g.vertex_index(text);
    if (v < 0) throw ParseError("unknown vertex '" + text + "'");
    if (g.degree(v) != 2 || !g.degree_two_oriented(v)) {
      throw ParseError("vertex '" + text + "' is not an oriented degree-2 vertex");
    }
    return PointOnGraph::at_vertex(g, v);
  }
  const double e = parse_number(text.substr(0, colon), "edge index");
  const double frac = parse_number(text.substr(colon + 1), "edge fraction");
  if (e != std::floor(e) || e < 0 || e >= g.num_edges()) throw ParseError("edge index out of range in '" + text + "'");
  if (!(frac > 0.0 && frac < 1.0)) throw ParseError("edge fraction must lie in (0, 1) in '" + text + "'");
  const int edge = static_cast<int>(e);
  return PointOnGraph::interior(edge, frac * g.length(edge));
}

std::string format_exact(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw std::runtime_error("format_exact failed");
  return std::string(buf, ptr);
}

std::string dump_graph(const MetricGraph& g) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "vertices" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const auto& id : g.vertex_ids()) out << YAML::DoubleQuoted << id;
  out << YAML::EndSeq;
  out << YAML::Key << "edges" << YAML::Value << YAML::BeginSeq;
  for (const Edge& e : g.edges()) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "from" << YAML::Value << YAML::DoubleQuoted << g.vertex_id(e.tail);
    out << YAML::Key << "to" << YAML::Value << YAML::DoubleQuoted << g.vertex_id(e.head);
    out << YAML::Key << "length" << YAML::Value << format_exact(e.length);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "orient" << YAML::Value << "declared";
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace qg
