#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <sstream>

#include "oracles.hpp"
#include "slabperc/invasion.hpp"

using namespace slabperc;

namespace {

LabelField path_field(int len, std::vector<double> labels) {
  const GeometryPtr g = make_geometry(0, {0, len, 0, 0});
  REQUIRE(g->edge_count() == labels.size());
  return LabelField(g, std::move(labels));
}

bool subset(const std::vector<EdgeId>& a, const std::vector<EdgeId>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST_CASE("exhaustive invasion covers the window and starts at the cheapest edge") {
  const GeometryPtr g = make_geometry(1, {0, 4, 0, 3});
  for (std::uint64_t t = 0; t < 20; ++t) {
    const LabelField omega = sample_labels(g, 2, t);
    const Vertex start{static_cast<int>(t % 5), static_cast<int>(t % 4), static_cast<int>(t % 2)};
    const InvasionState st = invade(omega, start, StopExhaust{});
    CHECK(st.reason == StopReason::exhausted);
    CHECK(st.vertices.size() == g->vertex_count());
    CHECK(st.log.size() == g->edge_count());
    EdgeId best = kNone;
    for (const Incidence& inc : g->incident(g->index(start)))
      if (best == kNone || omega.edge_less(inc.edge, best)) best = inc.edge;
    CHECK(st.log.front().edge == best);
    CHECK(st.vertices.front() == g->index(start));
  }
}

TEST_CASE("invasion tree equals the minimal spanning tree from every start") {
  const GeometryPtr g = make_geometry(1, {0, 2, 0, 2});
  for (std::uint64_t t = 0; t < 25; ++t) {
    const LabelField omega = sample_labels(g, 6, t);
    const ForestEdgeSet mst = kruskal_mst(omega);
    CHECK(mst.edges.size() == g->vertex_count() - 1);
    CHECK(mst.edges == oracle::criterion_forest(omega));
    for (std::uint32_t v = 0; v < g->vertex_count(); ++v)
      CHECK(invade(omega, g->vertex(v), StopExhaust{}).tree_edges() == mst.edges);
  }
}

TEST_CASE("small hand-built fields") {
  const LabelField line = path_field(4, {0.5, 0.1, 0.9, 0.3});
  CHECK(kruskal_mst(line).edges.size() == 4);
  const InvasionState st = invade(line, {0, 0, 0}, StopExhaust{});
  std::vector<double> seen;
  for (const auto& s : st.log) seen.push_back(s.label);
  CHECK(seen == std::vector<double>{0.5, 0.1, 0.9, 0.3});
  CHECK(record_values(st) == std::vector<std::pair<std::size_t, double>>{{1, 0.5}, {3, 0.9}});

  const GeometryPtr sq = make_geometry(0, {0, 1, 0, 1});
  std::vector<double> labels(sq->edge_count());
  const EdgeId heavy = *sq->edge_between({0, 1, 0}, {1, 1, 0});
  for (EdgeId e = 0; e < labels.size(); ++e) labels[e] = 0.1 + 0.1 * e;
  labels[heavy] = 0.9;
  const ForestEdgeSet tree = kruskal_mst(LabelField(sq, labels));
  CHECK(tree.edges.size() == 3);
  CHECK_FALSE(tree.contains(heavy));
}

TEST_CASE("monotone labels make every invaded edge a record") {
  const LabelField line = path_field(6, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
  const InvasionState st = invade(line, {0, 0, 0}, StopExhaust{});
  for (const auto& s : st.log) CHECK(s.record);
  CHECK(record_values(st).size() == 6);
}

TEST_CASE("record values increase and bound what is reachable below them") {
  const GeometryPtr g = make_geometry(1, {0, 6, 0, 6});
  for (std::uint64_t t = 0; t < 20; ++t) {
    const LabelField omega = sample_labels(g, 9, t);
    const Vertex start{3, 3, 0};
    const InvasionState st = invade(omega, start, StopExhaust{});
    const auto rec = record_values(st);
    for (std::size_t i = 1; i < rec.size(); ++i) CHECK(rec[i].second > rec[i - 1].second);
    for (const auto& [step, level] : rec) {
      // Before a record is invaded, the vertices taken are exactly those
      // reachable from the start below its label.
      std::size_t count = 1;
      for (std::size_t i = 0; i + 1 < step; ++i) count += st.log[i].tree_edge;
      std::vector<std::uint8_t> invaded_before(g->vertex_count(), 0);
      for (std::size_t i = 0; i < count; ++i) invaded_before[st.vertices[i]] = 1;
      CHECK(invaded_before == oracle::reachable_below(omega, g->index(start), level));
    }
  }
}

TEST_CASE("a cluster below the current record is absorbed before the next record") {
  const GeometryPtr g = make_geometry(0, {0, 8, 0, 0});
  std::vector<double> labels(g->edge_count(), 0.05);
  labels[*g->edge_between({2, 0, 0}, {3, 0, 0})] = 0.6;
  labels[*g->edge_between({6, 0, 0}, {7, 0, 0})] = 0.7;
  labels[*g->edge_between({3, 0, 0}, {4, 0, 0})] = 0.2;
  const InvasionState st = invade(LabelField(g, labels), {0, 0, 0}, StopExhaust{});
  const auto rec = record_values(st);
  REQUIRE(rec.size() == 3);
  CHECK(rec[1].second == 0.6);
  CHECK(rec[2].second == 0.7);
  // All of x = 3..6 is invaded between the two records.
  CHECK(rec[2].first == 7);
}

TEST_CASE("stopped invasions") {
  const GeometryPtr g = make_geometry(1, ball_box(0, 0, 8));
  const LabelField omega = sample_labels(g, 10, 0);
  std::size_t prev = 0;
  for (int N = 1; N <= 8; ++N) {
    const InvasionState st = invade(omega, {0, 0, 0}, StopAtBoundary{0, 0, N});
    CHECK(st.reason == StopReason::hit_boundary);
    const Vertex last = g->vertex(st.vertices.back());
    CHECK(plane_dist(last.x, last.y, 0, 0) == N);
    for (std::size_t i = 0; i + 1 < st.vertices.size(); ++i) {
      const Vertex v = g->vertex(st.vertices[i]);
      CHECK(plane_dist(v.x, v.y, 0, 0) < N);
    }
    CHECK(st.log.size() >= prev);
    prev = st.log.size();
  }
  const InvasionState budget = invade(omega, {0, 0, 0}, StopAfterSteps{5});
  CHECK(budget.reason == StopReason::step_budget);
  CHECK(budget.log.size() == 5);
  CHECK_THROWS_AS(invade(omega, {9, 0, 0}, StopExhaust{}), DomainError);
}

TEST_CASE("invasion CSV") {
  const LabelField line = path_field(2, {0.25, 0.75});
  std::ostringstream out;
  write_invasion_csv(out, invade(line, {0, 0, 0}, StopExhaust{}));
  CHECK(out.str() ==
        "step,ux,uy,uz,vx,vy,vz,label,is_tree_edge,record_flag\n"
        "1,0,0,0,1,0,0,0.25,1,1\n"
        "2,1,0,0,2,0,0,0.75,1,1\n");
}

TEST_CASE("free and wired spanning forests") {
  const GeometryPtr g = make_geometry(1, {0, 6, 0, 6});
  for (std::uint64_t t = 0; t < 20; ++t) {
    const LabelField omega = sample_labels(g, 12, t);
    const ForestEdgeSet mst = kruskal_mst(omega);
    CHECK(msf_window(omega, g->window(), ForestFlavor::free_window).edges == mst.edges);
    CHECK(msf_window(omega, g->window(), ForestFlavor::wired_window).edges == mst.edges);
    for (int n = 1; n <= 2; ++n) {
      const PlaneBox inner{3 - n, 3 + n, 3 - n, 3 + n};
      const PlaneBox outer{2 - n, 4 + n, 2 - n, 4 + n};
      const ForestEdgeSet fr = msf_window(omega, inner, ForestFlavor::free_window);
      const ForestEdgeSet wi = msf_window(omega, inner, ForestFlavor::wired_window);
      const std::size_t inside = static_cast<std::size_t>(inner.width() * inner.height() * 2);
      CHECK(fr.edges.size() == inside - 1);
      CHECK(wi.edges.size() == inside);
      // Every wired edge inside G_n is a free edge.
      std::vector<EdgeId> wi_inner;
      for (EdgeId e : wi.edges) {
        const Vertex u = g->vertex(g->edge(e).u);
        const Vertex v = g->vertex(g->edge(e).v);
        if (inner.contains(u.x, u.y) && inner.contains(v.x, v.y)) wi_inner.push_back(e);
      }
      CHECK(subset(wi_inner, fr.edges));
      // Free forests shrink and wired forests grow as the window grows.
      const ForestEdgeSet fr2 = msf_window(omega, outer, ForestFlavor::free_window);
      const ForestEdgeSet wi2 = msf_window(omega, outer, ForestFlavor::wired_window);
      std::vector<EdgeId> fr2_inner;
      for (EdgeId e : fr2.edges) {
        const Vertex u = g->vertex(g->edge(e).u);
        const Vertex v = g->vertex(g->edge(e).v);
        if (inner.contains(u.x, u.y) && inner.contains(v.x, v.y)) fr2_inner.push_back(e);
      }
      CHECK(subset(fr2_inner, fr.edges));
      CHECK(subset(wi.edges, wi2.edges));
    }
  }
  const LabelField omega = sample_labels(g, 12, 0);
  CHECK_THROWS_AS(msf_window(omega, {-1, 2, 0, 2}, ForestFlavor::free_window), DomainError);
  CHECK_THROWS_AS(msf_window(omega, {0, 2, 0, 2}, ForestFlavor::mst), DomainError);
  const auto j = forest_to_json(kruskal_mst(omega));
  CHECK(j["flavor"] == "mst");
  CHECK(j["edges"].size() == g->vertex_count() - 1);
}

TEST_CASE("invasion intersections") {
  const GeometryPtr g = make_geometry(1, ball_box(0, 0, 6));
  const LabelField omega = sample_labels(g, 13, 0);
  const auto same = intersect_invasions(omega, {2, 1, 0}, {2, 1, 0}, 6);
  CHECK(same.intersect);
  CHECK(*same.first_common == Vertex{2, 1, 0});
  CHECK_THROWS_AS(intersect_invasions(omega, {0, 0, 0}, {7, 0, 0}, 6), DomainError);
  CHECK_THROWS_AS(intersect_invasions(omega, {0, 0, 0}, {1, 0, 0}, 7), DomainError);
  // Intersection never becomes false as N grows on one field.
  for (std::uint64_t t = 0; t < 10; ++t) {
    const LabelField w = sample_labels(g, 14, t);
    bool before = false;
    for (int N = 2; N <= 6; ++N) {
      const bool now = intersect_invasions(w, {0, 0, 0}, {2, 0, 1}, N).intersect;
      CHECK((!before || now));
      before = now;
    }
  }
}
