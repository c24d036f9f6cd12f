#include <cmath>
#include <numbers>
#include <stdexcept>
#include <variant>

#include <gtest/gtest.h>

#include "qg/errors.hpp"
#include "qg/graph.hpp"
#include "qg/graph_io.hpp"
#include "qg/harness.hpp"

namespace qg {
namespace {

constexpr double kPi = std::numbers::pi;

MetricGraph path3() {
  // a -> m -> b, both edges of length 1.
  return MetricGraph({"a", "m", "b"}, {{0, 1, 1.0}, {1, 2, 1.0}});
}

TEST(MetricGraph, RejectsBadInput) {
  EXPECT_THROW(MetricGraph({"a", "b"}, {{0, 1, 0.0}}), std::invalid_argument);
  EXPECT_THROW(MetricGraph({"a", "b"}, {{0, 2, 1.0}}), std::invalid_argument);
  EXPECT_THROW(MetricGraph({"a", "a"}, {{0, 1, 1.0}}), std::invalid_argument);
  EXPECT_THROW(MetricGraph({"a"}, {}), std::invalid_argument);
}

TEST(MetricGraph, EndsAndDegrees) {
  const MetricGraph g({"a"}, {{0, 0, 2.0}});
  EXPECT_EQ(g.degree(0), 2);
  EXPECT_EQ(g.ends_at(0).size(), 2u);
  EXPECT_EQ(g.end_vertex(tail_end(0)), 0);
  EXPECT_EQ(g.end_vertex(head_end(0)), 0);
  EXPECT_TRUE(g.degree_two_oriented(0));
}

TEST(MetricGraph, BettiNumbers) {
  EXPECT_EQ(betti(interval_fixture()), 0);
  EXPECT_EQ(betti(star_fixture()), 0);
  EXPECT_EQ(betti(cycle_fixture()), 1);
  EXPECT_EQ(betti(lasso_fixture()), 1);
  EXPECT_EQ(betti(two_cycle_fixture()), 2);
  const MetricGraph two({"a", "b", "c", "d"}, {{0, 1, 1.0}, {2, 3, 1.0}});
  EXPECT_EQ(two.num_components(), 2);
  EXPECT_EQ(betti(two), 0);
}

TEST(MetricGraph, OrientsDegreeTwoChains) {
  // a <- m -> b: m has two outgoing ends.
  const MetricGraph g({"a", "m", "b"}, {{1, 0, 1.0}, {1, 2, 1.5}});
  EXPECT_FALSE(g.oriented());
  const MetricGraph h = orient_for_degree_two(g);
  EXPECT_TRUE(h.oriented());
  EXPECT_TRUE(h.degree_two_oriented(1));
  EXPECT_DOUBLE_EQ(h.total_length(), 2.5);
}

TEST(MetricGraph, ReverseAllKeepsLengths) {
  const MetricGraph g = two_cycle_fixture();
  const MetricGraph r = reverse_all(g);
  for (int e = 0; e < g.num_edges(); ++e) {
    EXPECT_EQ(r.edge(e).tail, g.edge(e).head);
    EXPECT_EQ(r.edge(e).head, g.edge(e).tail);
    EXPECT_EQ(r.length(e), g.length(e));
  }
}

TEST(Points, NormalizeEndpointToVertex) {
  const MetricGraph g = path3();
  const PointOnGraph p = normalize_point(g, PointOnGraph::interior(0, 1.0));
  EXPECT_TRUE(p.is_vertex());
  EXPECT_EQ(p.vertex, 1);
  EXPECT_TRUE(same_point(g, PointOnGraph::interior(1, 0.0), PointOnGraph::at_vertex(g, 1)));
  EXPECT_THROW(PointOnGraph::at_vertex(g, 0), std::invalid_argument);
}

TEST(Subdivision, InsertPreservesTotalLength) {
  const MetricGraph g = star_fixture();
  const Subdivision s =
      insert_degree_two(g, {PointOnGraph::interior(0, 0.25), PointOnGraph::interior(0, 0.75), PointOnGraph::interior(2, 1.0)});
  EXPECT_EQ(s.graph.num_edges(), g.num_edges() + 3);
  EXPECT_EQ(s.graph.num_vertices(), g.num_vertices() + 3);
  EXPECT_NEAR(s.graph.total_length(), g.total_length(), 1e-14);
  EXPECT_EQ(betti(s.graph), betti(g));
  ASSERT_EQ(s.point_vertices.size(), 3u);
  for (int v : s.point_vertices) EXPECT_EQ(s.graph.degree(v), 2);
  EXPECT_THROW(insert_degree_two(g, {PointOnGraph::interior(0, 1.5)}), std::invalid_argument);
}

TEST(Cut, CycleCutOnceIsAnInterval) {
  const MetricGraph g = cycle_fixture();
  const CutResult c = cut_at_vertices(g, {0});
  EXPECT_EQ(c.num_components, 1);
  EXPECT_EQ(betti(c.graph), 0);
  EXPECT_EQ(c.graph.num_vertices(), 2);
  ASSERT_EQ(c.daughters.size(), 1u);
  EXPECT_EQ(c.graph.degree(c.daughters[0].first), 1);
  EXPECT_EQ(c.graph.degree(c.daughters[0].second), 1);
}

TEST(Cut, PathCutInTwo) {
  const CutResult c = cut_at_vertices(path3(), {1});
  EXPECT_EQ(c.num_components, 2);
  EXPECT_THROW(cut_at_vertices(path3(), {0}), std::invalid_argument);
}

TEST(Cut, TwoCycleCutSets) {
  const MetricGraph g = two_cycle_fixture();
  const PointCut a = cut_at_points(g, two_cycle_cut_a(g));
  const PointCut b = cut_at_points(g, two_cycle_cut_b(g));
  EXPECT_EQ(betti(a.cut.graph), 0);
  EXPECT_EQ(a.cut.num_components, 1);
  EXPECT_EQ(betti(b.cut.graph), 1);
}

TEST(GraphIo, ParsesYamlAndJson) {
  const MetricGraph y = parse_graph("vertices: [a, b]\nedges:\n  - {from: a, to: b, length: 3.5}\n");
  EXPECT_EQ(y.num_vertices(), 2);
  EXPECT_EQ(y.length(0), 3.5);
  const MetricGraph j = parse_graph(R"({"vertices": ["a"], "edges": [{"from": "a", "to": "a", "length": 2}]})");
  EXPECT_EQ(j.num_edges(), 1);
  EXPECT_EQ(betti(j), 1);
}

TEST(GraphIo, RejectsMalformed) {
  EXPECT_THROW(parse_graph("vertices: [a, b]\nedges: [{from: a, to: c, length: 1}]\n"), ParseError);
  EXPECT_THROW(parse_graph("vertices: [a, b]\nedges: [{from: a, to: b, length: -1}]\n"), ParseError);
  EXPECT_THROW(parse_graph("vertices: [a, b]\nedges: [{from: a, to: b, length: abc}]\n"), ParseError);
  EXPECT_THROW(parse_graph("vertices: [a, b\n"), ParseError);
  EXPECT_THROW(parse_graph("edges: []\n"), ParseError);
  EXPECT_THROW(load_graph("/nonexistent/graph.yaml"), ParseError);
}

TEST(GraphIo, RoundTripIsExact) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const MetricGraph g = random_graph(seed);
    const MetricGraph h = parse_graph(dump_graph(g));
    ASSERT_EQ(h.num_edges(), g.num_edges());
    ASSERT_EQ(h.vertex_ids(), g.vertex_ids());
    for (int e = 0; e < g.num_edges(); ++e) {
      EXPECT_EQ(h.edge(e).tail, g.edge(e).tail);
      EXPECT_EQ(h.edge(e).head, g.edge(e).head);
      EXPECT_EQ(h.length(e), g.length(e));
    }
  }
  EXPECT_EQ(std::stod(format_exact(kPi)), kPi);
  EXPECT_EQ(std::stod(format_exact(0.1)), 0.1);
}

TEST(GraphIo, Conditions) {
  const MetricGraph g = path3();
  const auto c = parse_conditions(g,
                                  "conditions:\n"
                                  "  - {vertex: m, type: delta, alpha: 0.5, t: inf}\n"
                                  "  - {vertex: a, type: robin, alpha: 1.5}\n");
  ASSERT_EQ(c.size(), 3u);
  ASSERT_TRUE(std::holds_alternative<DeltaAlpha>(c[1]));
  EXPECT_TRUE(std::get<DeltaAlpha>(c[1]).t.is_infinite());
  EXPECT_EQ(std::get<DeltaAlpha>(c[1]).alpha, 0.5);
  ASSERT_TRUE(std::holds_alternative<RobinFixed>(c[0]));
  EXPECT_TRUE(std::holds_alternative<NeumannKirchhoff>(c[2]));
  // Wrong degree, unknown vertex and unknown type.
  EXPECT_THROW(parse_conditions(g, "conditions: [{vertex: a, type: delta, t: 1}]\n"), ParseError);
  EXPECT_THROW(parse_conditions(g, "conditions: [{vertex: q, type: nk}]\n"), ParseError);
  EXPECT_THROW(parse_conditions(g, "conditions: [{vertex: m, type: bogus}]\n"), ParseError);
  EXPECT_THROW(parse_conditions(g, "conditions: 3\n"), ParseError);
}

TEST(GraphIo, Points) {
  const MetricGraph g = path3();
  const PointOnGraph p = parse_point(g, "1:0.25");
  EXPECT_EQ(p.edge, 1);
  EXPECT_DOUBLE_EQ(p.x, 0.25);
  EXPECT_EQ(parse_point(g, "m").vertex, 1);
  EXPECT_THROW(parse_point(g, "a"), ParseError);
  EXPECT_THROW(parse_point(g, "2:0.5"), ParseError);
  EXPECT_THROW(parse_point(g, "0:1"), ParseError);
  EXPECT_THROW(parse_point(g, "0:x"), ParseError);
}

}  // namespace
}  // namespace qg
