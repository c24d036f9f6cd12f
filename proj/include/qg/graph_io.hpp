#pragma once

#include <string>
#include <vector>

#include "qg/conditions.hpp"
#include "qg/graph.hpp"

namespace qg {

/// Graph description document:
///
///     vertices: [a, b, c]
///     edges:
///       - {from: a, to: b, length: 3.141592653589793}
///     orient: auto        # or: declared
///
/// JSON is accepted as well. With `orient: auto` (the default) degree-2
/// chains are re-oriented head-to-tail after loading.
/// Throws ParseError on malformed input.
MetricGraph parse_graph(const std::string& text);
MetricGraph load_graph(const std::string& path);

/// Vertex condition overlay:
///
///     conditions:
///       - {vertex: m, type: delta, alpha: 0, t: inf}
///       - {vertex: b, type: robin, alpha: 1.5707963267948966}
///
/// Types: nk, delta (degree 2; t a number or inf) and robin (degree 1).
/// Unlisted vertices keep Neumann-Kirchhoff. Throws ParseError.
std::vector<VertexCondition> parse_conditions(const MetricGraph& g, const std::string& text);
std::vector<VertexCondition> load_conditions(const MetricGraph& g, const std::string& path);

/// `edge:fraction` with an edge index and a fraction in (0, 1), or the id of a
/// degree-2 vertex. Throws ParseError.
PointOnGraph parse_point(const MetricGraph& g, const std::string& text);

/// Shortest decimal string that reads back to the same double.
std::string format_exact(double x);

/// Emits `orient: declared`, so reading back reproduces the graph exactly.
std::string dump_graph(const MetricGraph& g);

}  // namespace qg
