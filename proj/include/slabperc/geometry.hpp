// Finite windows of the slab Z^2 x {0..k}: vertices, canonical edge ids,
// plane regions and the total orders on vertices, paths and circuits.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace slabperc {

/// Raised when an argument lies outside the domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Vertex {
  int x = 0;
  int y = 0;
  int z = 0;

  friend bool operator==(const Vertex&, const Vertex&) = default;
};

std::string to_string(const Vertex& v);

/// Squared Euclidean norm; exact in integers.
constexpr long long norm2(const Vertex& v) {
  return 1LL * v.x * v.x + 1LL * v.y * v.y + 1LL * v.z * v.z;
}

/// x < y iff |x| < |y|, or equal norms and (x,y,z) lexicographically smaller.
constexpr bool vertex_less(const Vertex& a, const Vertex& b) {
  const long long na = norm2(a);
  const long long nb = norm2(b);
  if (na != nb) return na < nb;
  if (a.x != b.x) return a.x < b.x;
  if (a.y != b.y) return a.y < b.y;
  return a.z < b.z;
}

struct VertexOrder {
  constexpr bool operator()(const Vertex& a, const Vertex& b) const { return vertex_less(a, b); }
};

/// Closed box [x0,x1] x [y0,y1] of Z^2.
struct PlaneBox {
  int x0 = 0;
  int x1 = 0;
  int y0 = 0;
  int y1 = 0;

  int width() const { return x1 - x0 + 1; }
  int height() const { return y1 - y0 + 1; }
  bool contains(int x, int y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
  friend bool operator==(const PlaneBox&, const PlaneBox&) = default;
};

/// Box c + [-n,n]^2.
inline PlaneBox ball_box(int cx, int cy, int n) { return {cx - n, cx + n, cy - n, cy + n}; }

/// Sup-norm distance of plane projections.
inline int plane_dist(int ax, int ay, int bx, int by) {
  const int dx = ax > bx ? ax - bx : bx - ax;
  const int dy = ay > by ? ay - by : by - ay;
  return dx > dy ? dx : dy;
}

using EdgeId = std::uint32_t;
inline constexpr std::uint32_t kNone = 0xffffffffu;

/// Positive lattice directions; an edge is stored once, from its lower endpoint.
enum class Direction : std::uint8_t { px = 0, py = 1, pz = 2 };

struct Edge {
  std::uint32_t u = 0;  // vertex index of the lower endpoint
  std::uint32_t v = 0;
  Direction dir = Direction::px;
};

/// Incidence record: neighbor vertex index and the connecting edge id.
struct Incidence {
  std::uint32_t vertex;
  EdgeId edge;
};

class SlabGeometry {
 public:
  SlabGeometry(int thickness, PlaneBox window);

  int thickness() const { return k_; }
  const PlaneBox& window() const { return window_; }
  int layers() const { return k_ + 1; }

  std::size_t vertex_count() const { return vertex_count_; }
  std::size_t edge_count() const { return edges_.size(); }

  bool contains(const Vertex& v) const {
    return window_.contains(v.x, v.y) && v.z >= 0 && v.z <= k_;
  }

  /// Row-major index: ((y - y0) * width + (x - x0)) * (k + 1) + z.
  std::uint32_t index(const Vertex& v) const {
    return static_cast<std::uint32_t>(
        ((v.y - window_.y0) * window_.width() + (v.x - window_.x0)) * layers() + v.z);
  }
  /// Like index() but throws DomainError for vertices outside the window.
  std::uint32_t checked_index(const Vertex& v) const;
  Vertex vertex(std::uint32_t i) const {
    const int z = static_cast<int>(i % layers());
    const int cell = static_cast<int>(i / layers());
    return {window_.x0 + cell % window_.width(), window_.y0 + cell / window_.width(), z};
  }

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  std::span<const Edge> edges() const { return edges_; }

  /// Edge id of the edge leaving vertex index `u` in positive direction `d`, or kNone.
  EdgeId edge_from(std::uint32_t u, Direction d) const { return slot_[3 * u + static_cast<int>(d)]; }
  std::optional<EdgeId> edge_between(const Vertex& a, const Vertex& b) const;

  /// Incidences of vertex index u, in the order +x, -x, +y, -y, +z, -z.
  std::span<const Incidence> incident(std::uint32_t u) const {
    return {adj_.data() + adj_begin_[u], adj_.data() + adj_begin_[u + 1]};
  }

  /// Lattice neighbors inside the window, in the order +x, -x, +y, -y, +z, -z.
  std::vector<Vertex> neighbors(const Vertex& v) const;

  friend bool operator==(const SlabGeometry& a, const SlabGeometry& b) {
    return a.k_ == b.k_ && a.window_ == b.window_;
  }

 private:
  int k_;
  PlaneBox window_;
  std::size_t vertex_count_;
  std::vector<Edge> edges_;
  std::vector<EdgeId> slot_;
  std::vector<std::uint32_t> adj_begin_;
  std::vector<Incidence> adj_;
};

/// Free-function form of SlabGeometry::neighbors.
std::vector<Vertex> neighbors(const SlabGeometry& g, const Vertex& v);

nlohmann::json geometry_to_json(const SlabGeometry& g);
SlabGeometry geometry_from_json(const nlohmann::json& j);

enum class RegionKind { rectangle, annulus, cylinder };

/// Vertical cylinder S x [k] over a plane set S. Rectangles carry their faces,
/// annuli B_m(c) \ B_n(c) carry center and radii.
class Region {
 public:
  static Region rectangle(int thickness, PlaneBox box);
  static Region annulus(int thickness, int cx, int cy, int inner, int outer);
  static Region cylinder(int thickness, std::span<const std::array<int, 2>> cells);

  RegionKind kind() const { return kind_; }
  int thickness() const { return k_; }
  const PlaneBox& bounds() const { return bounds_; }

  bool contains_cell(int x, int y) const {
    if (!bounds_.contains(x, y)) return false;
    return mask_[(y - bounds_.y0) * bounds_.width() + (x - bounds_.x0)] != 0;
  }
  bool contains(const Vertex& v) const { return v.z >= 0 && v.z <= k_ && contains_cell(v.x, v.y); }

  std::size_t cell_count() const { return cells_; }
  std::size_t vertex_count() const { return cells_ * static_cast<std::size_t>(k_ + 1); }
  std::vector<std::array<int, 2>> plane_cells() const;
  std::vector<Vertex> vertices() const;

  // Rectangle faces (vertical face sets). Throw DomainError for other kinds.
  std::vector<Vertex> left_face() const;
  std::vector<Vertex> right_face() const;
  std::vector<Vertex> bottom_face() const;
  std::vector<Vertex> top_face() const;

  // Annulus data. Throw DomainError for other kinds.
  std::array<int, 2> center() const;
  int inner_radius() const;
  int outer_radius() const;
  /// Vertices at sup-distance inner+1 (resp. outer) from the center.
  std::vector<Vertex> inner_ring() const;
  std::vector<Vertex> outer_ring() const;

 private:
  Region(RegionKind kind, int k, PlaneBox bounds) : kind_(kind), k_(k), bounds_(bounds) {}
  void require(RegionKind kind, const char* what) const;
  std::vector<Vertex> column_set(PlaneBox box) const;

  RegionKind kind_;
  int k_;
  PlaneBox bounds_;
  std::vector<std::uint8_t> mask_;
  std::size_t cells_ = 0;
  int cx_ = 0;
  int cy_ = 0;
  int inner_ = 0;
  int outer_ = 0;
};

/// S x [k] for a plane set S inside the geometry's window. Rectangular S
/// yields a rectangle region with faces.
Region bar(const SlabGeometry& g, std::span<const std::array<int, 2>> cells);
Region bar(const SlabGeometry& g, PlaneBox box);
/// The cylinder over the projection of a vertex set.
Region bar(const SlabGeometry& g, std::span<const Vertex> vertices);

/// Per-vertex membership mask of a region over the geometry's vertex indices.
std::vector<std::uint8_t> region_mask(const SlabGeometry& g, const Region& r);

/// dist*: sup-norm distance between plane projections; min over pairs for sets.
int dist_star(const Vertex& a, const Vertex& b);
int dist_star(std::span<const Vertex> a, std::span<const Vertex> b);
int dist_star(const Region& a, const Region& b);

/// Ordered vertex sequence. Circuits are closed (first == last) and, when
/// canonical, start at their smallest vertex and are oriented so that the
/// second vertex precedes the second-to-last.
struct PathOrCircuit {
  std::vector<Vertex> vertices;
  bool closed = false;
  bool canonical = false;

  bool empty() const { return vertices.empty(); }
  friend bool operator==(const PathOrCircuit&, const PathOrCircuit&) = default;
};

/// Canonical representative of a circuit given as a cyclic vertex sequence,
/// with or without the repeated final vertex.
PathOrCircuit canonical_circuit(std::span<const Vertex> cycle);

/// Lexicographic order under vertex_less; a strict prefix is smaller. Circuits
/// compare by canonical representative. Mixing a path and a circuit throws.
bool path_less(const PathOrCircuit& p, const PathOrCircuit& q);

/// Adjacency, self-avoidance and closure checks.
bool is_valid_path(const SlabGeometry& g, const PathOrCircuit& p);

nlohmann::json path_to_json(const PathOrCircuit& p);
PathOrCircuit path_from_json(const nlohmann::json& j);

}  // namespace slabperc
