// Invasion percolation clusters and trees, Kruskal minimal spanning trees and
// the free / wired spanning trees of a sub-window.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "slabperc/geometry.hpp"
#include "slabperc/labels.hpp"

namespace slabperc {

struct StopExhaust {};
/// Stop as soon as a vertex at sup-distance >= radius from (cx, cy) is invaded.
struct StopAtBoundary {
  int cx = 0;
  int cy = 0;
  int radius = 0;
};
/// Stop after this many invaded edges.
struct StopAfterSteps {
  std::size_t steps = 0;
};
using StopRule = std::variant<StopExhaust, StopAtBoundary, StopAfterSteps>;

enum class StopReason { exhausted, hit_boundary, step_budget };
const char* to_string(StopReason r);

struct InvasionStep {
  std::size_t step;  // 1-based
  EdgeId edge;
  double label;
  bool tree_edge;  // the edge added a new vertex
  bool record;     // the label exceeds every earlier invaded label
};

struct InvasionState {
  GeometryPtr geometry;
  Vertex start;
  /// Invaded vertex indices in order of invasion; vertices.front() is the start.
  std::vector<std::uint32_t> vertices;
  /// Position in `vertices` per geometry vertex, kNone if not invaded.
  std::vector<std::uint32_t> order;
  std::vector<InvasionStep> log;
  double record = 0.0;
  StopReason reason = StopReason::exhausted;

  bool invaded(std::uint32_t v) const { return order[v] != kNone; }
  std::vector<EdgeId> cluster_edges() const;
  std::vector<EdgeId> tree_edges() const;
};

InvasionState invade(const LabelField& omega, const Vertex& start, const StopRule& stop);

/// (step, label) of every strict new maximum in the invasion log.
std::vector<std::pair<std::size_t, double>> record_values(const InvasionState& state);

/// CSV with columns step,ux,uy,uz,vx,vy,vz,label,is_tree_edge,record_flag.
void write_invasion_csv(std::ostream& out, const InvasionState& state);

enum class ForestFlavor { mst, free_window, wired_window };
const char* to_string(ForestFlavor f);

struct ForestEdgeSet {
  GeometryPtr geometry;
  PlaneBox window;
  ForestFlavor flavor = ForestFlavor::mst;
  /// Sorted edge ids.
  std::vector<EdgeId> edges;

  bool contains(EdgeId e) const;
};

/// Minimal spanning forest of the whole geometry under the (label, id) order.
ForestEdgeSet kruskal_mst(const LabelField& omega);

/// Free: MST of the subgraph induced by `inner`. Wired: MST of the graph in
/// which every geometry vertex outside `inner` is merged into one vertex,
/// restricted to real edges with an endpoint in `inner`.
ForestEdgeSet msf_window(const LabelField& omega, PlaneBox inner, ForestFlavor flavor);

nlohmann::json forest_to_json(const ForestEdgeSet& f);

struct InvasionIntersection {
  bool intersect = false;
  /// The common vertex invaded earliest by the invasion from a.
  std::optional<Vertex> first_common;
};

/// Runs the invasions from a and b stopped on the boundary of the ball of
/// radius N about the origin and intersects their vertex sets.
InvasionIntersection intersect_invasions(const LabelField& omega, const Vertex& a,
                                         const Vertex& b, int N);

}  // namespace slabperc
