// Open clusters, crossing events, minimal open paths and circuits, winding
// detection in annuli and the three-disjoint-paths check.
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "slabperc/geometry.hpp"
#include "slabperc/labels.hpp"

namespace slabperc {

/// Union-find with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n = 0) { reset(n); }
  void reset(std::size_t n);
  std::uint32_t find(std::uint32_t a);
  /// Returns false when a and b were already joined.
  bool unite(std::uint32_t a, std::uint32_t b);
  std::uint32_t size_of(std::uint32_t a) { return size_[find(a)]; }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
};

struct ClusterPartition {
  /// Component id per geometry vertex index; kNone outside the region.
  std::vector<std::uint32_t> component;
  /// Size of each component id.
  std::vector<std::uint32_t> sizes;

  std::size_t count() const { return sizes.size(); }
  bool connected(std::uint32_t u, std::uint32_t v) const {
    return component[u] != kNone && component[u] == component[v];
  }
};

/// Components of the open subgraph induced on the region's vertices.
ClusterPartition clusters(const BondConfig& c, const Region& region);

/// A <-> B inside S. Empty A∩S or B∩S makes the event false.
struct CrossingQuery {
  Region region;
  std::vector<Vertex> source;
  std::vector<Vertex> target;

  /// Horizontal crossing H(R) of a rectangle: left face to right face.
  static CrossingQuery horizontal(const Region& rect);
  static CrossingQuery vertical(const Region& rect);
};

bool crossing(const BondConfig& c, const CrossingQuery& q);

/// Lexicographically minimal open self-avoiding path in S from A to B under
/// path_less; empty when A and B are not connected inside S.
PathOrCircuit min_open_path(const BondConfig& c, const Region& S, std::span<const Vertex> A,
                            std::span<const Vertex> B);

/// Crossing sign of the planar step (ax,ay) -> (bx,by) through the cut ray
/// {y = cy + 1/2, x > cx}: +1 upward, -1 downward, 0 otherwise.
inline int cut_weight(int ax, int ay, int bx, int by, int cx, int cy) {
  if (ax != bx || ax <= cx) return 0;
  if (ay == cy && by == cy + 1) return 1;
  if (ay == cy + 1 && by == cy) return -1;
  return 0;
}

/// Some open cluster inside the annulus contains a circuit whose projection
/// winds around the annulus center.
bool has_surrounding_circuit(const BondConfig& c, const Region& annulus);

/// Number of open clusters inside the annulus that contain a surrounding circuit.
std::size_t surrounding_cluster_count(const BondConfig& c, const Region& annulus);

/// Winding number about (cx, cy) of a closed planar-projected vertex sequence.
int winding_number(std::span<const Vertex> closed_walk, int cx, int cy);

/// The minimal (under path_less) canonical open circuit inside the annulus
/// whose projection has nonzero winding about the center; empty if none.
PathOrCircuit min_surrounding_circuit(const BondConfig& c, const Region& annulus);

/// Quadrant slab L = Z_+^2 x [k] without (0,0,0) and (0,0,k).
bool in_quadrant_slab(int k, const Vertex& v);

/// Vertices of L at sup-distance exactly s from z: the outer boundary of
/// the ball B_s(z) x [k] within L.
std::vector<Vertex> ball_boundary_in_quadrant(int k, int s, const Vertex& z);

/// Decides whether three vertex-disjoint self-avoiding paths inside
/// (B_s(z) x [k]) ∩ L \ {z} join u-u', v-v', w-w'. Pairs with identical
/// endpoints are joined by the one-vertex path.
bool disjoint_paths_check(int k, int s, const Vertex& z, const std::array<Vertex, 3>& from,
                          const std::array<Vertex, 3>& to);

/// Same check with the ball graph around z built once and reused.
class DisjointPathsSolver {
 public:
  DisjointPathsSolver(int k, int s, const Vertex& z);
  ~DisjointPathsSolver();
  DisjointPathsSolver(DisjointPathsSolver&&) noexcept;
  bool operator()(const std::array<Vertex, 3>& from, const std::array<Vertex, 3>& to);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace slabperc
