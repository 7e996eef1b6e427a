#include "slabperc/invasion.hpp"

#include <algorithm>
#include <ostream>
#include <queue>

#include "slabperc/connectivity.hpp"

namespace slabperc {

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::exhausted: return "exhausted";
    case StopReason::hit_boundary: return "hit_boundary";
    case StopReason::step_budget: return "step_budget";
  }
  return "?";
}

const char* to_string(ForestFlavor f) {
  switch (f) {
    case ForestFlavor::mst: return "mst";
    case ForestFlavor::free_window: return "free";
    case ForestFlavor::wired_window: return "wired";
  }
  return "?";
}

std::vector<EdgeId> InvasionState::cluster_edges() const {
  std::vector<EdgeId> out;
  out.reserve(log.size());
  for (const auto& s : log) out.push_back(s.edge);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<EdgeId> InvasionState::tree_edges() const {
  std::vector<EdgeId> out;
  for (const auto& s : log)
    if (s.tree_edge) out.push_back(s.edge);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct Frontier {
  double label;
  EdgeId edge;
  bool operator>(const Frontier& o) const {
    return label > o.label || (label == o.label && edge > o.edge);
  }
};

bool should_stop(const StopRule& stop, const Vertex& v) {
  if (const auto* b = std::get_if<StopAtBoundary>(&stop))
    return plane_dist(v.x, v.y, b->cx, b->cy) >= b->radius;
  return false;
}

}  // namespace

InvasionState invade(const LabelField& omega, const Vertex& start, const StopRule& stop) {
  const SlabGeometry& g = omega.geometry();
  if (!g.contains(start)) throw DomainError("invasion start outside window: " + to_string(start));

  InvasionState st;
  st.geometry = omega.geometry_ptr();
  st.start = start;
  st.order.assign(g.vertex_count(), kNone);

  std::priority_queue<Frontier, std::vector<Frontier>, std::greater<>> heap;
  std::vector<std::uint8_t> queued(g.edge_count(), 0);
  const auto add_vertex = [&](std::uint32_t v) {
    st.order[v] = static_cast<std::uint32_t>(st.vertices.size());
    st.vertices.push_back(v);
    for (const Incidence& inc : g.incident(v)) {
      if (queued[inc.edge]) continue;
      queued[inc.edge] = 1;
      heap.push({omega[inc.edge], inc.edge});
    }
  };

  add_vertex(g.index(start));
  if (should_stop(stop, start)) {
    st.reason = StopReason::hit_boundary;
    return st;
  }
  const auto* budget = std::get_if<StopAfterSteps>(&stop);
  bool have_record = false;
  while (!heap.empty()) {
    if (budget && st.log.size() >= budget->steps) {
      st.reason = StopReason::step_budget;
      return st;
    }
    const Frontier f = heap.top();
    heap.pop();
    const Edge& e = g.edge(f.edge);
    const bool u_in = st.invaded(e.u);
    const std::uint32_t fresh = u_in ? e.v : e.u;
    const bool tree = !(u_in && st.invaded(e.v));
    const bool record = !have_record || f.label > st.record;
    if (record) {
      st.record = f.label;
      have_record = true;
    }
    st.log.push_back({st.log.size() + 1, f.edge, f.label, tree, record});
    if (tree) {
      add_vertex(fresh);
      if (should_stop(stop, g.vertex(fresh))) {
        st.reason = StopReason::hit_boundary;
        return st;
      }
    }
  }
  st.reason = StopReason::exhausted;
  return st;
}

std::vector<std::pair<std::size_t, double>> record_values(const InvasionState& state) {
  std::vector<std::pair<std::size_t, double>> out;
  for (const auto& s : state.log)
    if (s.record) out.emplace_back(s.step, s.label);
  return out;
}

void write_invasion_csv(std::ostream& out, const InvasionState& state) {
  const SlabGeometry& g = *state.geometry;
  out << "step,ux,uy,uz,vx,vy,vz,label,is_tree_edge,record_flag\n";
  const auto old = out.precision(17);
  for (const auto& s : state.log) {
    const Edge& e = g.edge(s.edge);
    const Vertex u = g.vertex(e.u);
    const Vertex v = g.vertex(e.v);
    out << s.step << ',' << u.x << ',' << u.y << ',' << u.z << ',' << v.x << ',' << v.y << ','
        << v.z << ',' << s.label << ',' << int(s.tree_edge) << ',' << int(s.record) << '\n';
  }
  out.precision(old);
}

// ---------------------------------------------------------------------------
// Spanning forests

bool ForestEdgeSet::contains(EdgeId e) const {
  return std::binary_search(edges.begin(), edges.end(), e);
}

namespace {

std::vector<EdgeId> sorted_by_label(const LabelField& omega, std::vector<EdgeId> ids) {
  std::sort(ids.begin(), ids.end(), [&](EdgeId a, EdgeId b) { return omega.edge_less(a, b); });
  return ids;
}

/// Kruskal over the given edges; `node` maps a geometry vertex to its union-find slot.
template <class NodeOf>
std::vector<EdgeId> kruskal(const LabelField& omega, std::vector<EdgeId> candidates,
                            std::size_t nodes, NodeOf node) {
  const SlabGeometry& g = omega.geometry();
  UnionFind uf(nodes);
  std::vector<EdgeId> out;
  for (EdgeId e : sorted_by_label(omega, std::move(candidates))) {
    const Edge& ed = g.edge(e);
    if (uf.unite(node(ed.u), node(ed.v))) out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

ForestEdgeSet kruskal_mst(const LabelField& omega) {
  const SlabGeometry& g = omega.geometry();
  std::vector<EdgeId> all(g.edge_count());
  for (EdgeId e = 0; e < all.size(); ++e) all[e] = e;
  ForestEdgeSet f{omega.geometry_ptr(), g.window(), ForestFlavor::mst, {}};
  f.edges = kruskal(omega, std::move(all), g.vertex_count(), [](std::uint32_t v) { return v; });
  return f;
}

ForestEdgeSet msf_window(const LabelField& omega, PlaneBox inner, ForestFlavor flavor) {
  const SlabGeometry& g = omega.geometry();
  const PlaneBox& w = g.window();
  if (inner.x0 > inner.x1 || inner.y0 > inner.y1) throw DomainError("empty inner window");
  if (inner.x0 < w.x0 || inner.x1 > w.x1 || inner.y0 < w.y0 || inner.y1 > w.y1)
    throw DomainError("inner window is not contained in the sampled geometry");
  if (flavor == ForestFlavor::mst) throw DomainError("msf_window needs the free or wired flavor");

  const auto inside = [&](std::uint32_t v) {
    const Vertex p = g.vertex(v);
    return inner.contains(p.x, p.y);
  };
  std::vector<EdgeId> candidates;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    const bool a = inside(ed.u);
    const bool b = inside(ed.v);
    if (flavor == ForestFlavor::free_window ? (a && b) : (a || b)) candidates.push_back(e);
  }
  // Outside vertices all map to the super-vertex in the last slot.
  const auto super = static_cast<std::uint32_t>(g.vertex_count());
  ForestEdgeSet f{omega.geometry_ptr(), inner, flavor, {}};
  f.edges = kruskal(omega, std::move(candidates), g.vertex_count() + 1,
                    [&](std::uint32_t v) { return inside(v) ? v : super; });
  return f;
}

nlohmann::json forest_to_json(const ForestEdgeSet& f) {
  const SlabGeometry& g = *f.geometry;
  nlohmann::json edges = nlohmann::json::array();
  for (EdgeId e : f.edges) {
    const Vertex u = g.vertex(g.edge(e).u);
    const Vertex v = g.vertex(g.edge(e).v);
    edges.push_back({{u.x, u.y, u.z}, {v.x, v.y, v.z}});
  }
  return {{"flavor", to_string(f.flavor)},
          {"geometry", geometry_to_json(g)},
          {"window", {f.window.x0, f.window.x1, f.window.y0, f.window.y1}},
          {"edges", std::move(edges)}};
}

InvasionIntersection intersect_invasions(const LabelField& omega, const Vertex& a,
                                         const Vertex& b, int N) {
  const SlabGeometry& g = omega.geometry();
  const PlaneBox need = ball_box(0, 0, N);
  const PlaneBox& w = g.window();
  if (need.x0 < w.x0 || need.x1 > w.x1 || need.y0 < w.y0 || need.y1 > w.y1)
    throw DomainError("window does not contain the ball of radius N");
  if (plane_dist(a.x, a.y, 0, 0) > N || plane_dist(b.x, b.y, 0, 0) > N)
    throw DomainError("invasion starts must lie in the ball of radius N");
  const StopAtBoundary stop{0, 0, N};
  const InvasionState ia = invade(omega, a, stop);
  const InvasionState ib = invade(omega, b, stop);
  InvasionIntersection out;
  for (std::uint32_t v : ia.vertices) {
    if (ib.invaded(v)) {
      out.intersect = true;
      out.first_common = g.vertex(v);
      break;
    }
  }
  return out;
}

}  // namespace slabperc
