#include "slabperc/geometry.hpp"

#include <algorithm>
#include <limits>

namespace slabperc {

std::string to_string(const Vertex& v) {
  return "(" + std::to_string(v.x) + "," + std::to_string(v.y) + "," + std::to_string(v.z) + ")";
}

SlabGeometry::SlabGeometry(int thickness, PlaneBox window) : k_(thickness), window_(window) {
  if (thickness < 0) throw DomainError("slab thickness must be nonnegative");
  if (window.x1 < window.x0 || window.y1 < window.y0) throw DomainError("empty window");
  vertex_count_ = static_cast<std::size_t>(window.width()) * window.height() * layers();
  if (vertex_count_ >= kNone / 4) throw DomainError("window too large");

  slot_.assign(3 * vertex_count_, kNone);
  edges_.reserve(3 * vertex_count_);
  for (std::uint32_t u = 0; u < vertex_count_; ++u) {
    const Vertex a = vertex(u);
    if (a.x < window_.x1) {
      slot_[3 * u] = static_cast<EdgeId>(edges_.size());
      edges_.push_back({u, index({a.x + 1, a.y, a.z}), Direction::px});
    }
    if (a.y < window_.y1) {
      slot_[3 * u + 1] = static_cast<EdgeId>(edges_.size());
      edges_.push_back({u, index({a.x, a.y + 1, a.z}), Direction::py});
    }
    if (a.z < k_) {
      slot_[3 * u + 2] = static_cast<EdgeId>(edges_.size());
      edges_.push_back({u, u + 1, Direction::pz});
    }
  }

  adj_begin_.assign(vertex_count_ + 1, 0);
  adj_.reserve(2 * edges_.size());
  for (std::uint32_t u = 0; u < vertex_count_; ++u) {
    adj_begin_[u] = static_cast<std::uint32_t>(adj_.size());
    const Vertex a = vertex(u);
    const auto push_plus = [&](Direction d) {
      const EdgeId e = edge_from(u, d);
      if (e != kNone) adj_.push_back({edges_[e].v, e});
    };
    const auto push_minus = [&](Vertex b, Direction d) {
      if (!contains(b)) return;
      const std::uint32_t w = index(b);
      adj_.push_back({w, edge_from(w, d)});
    };
    push_plus(Direction::px);
    push_minus({a.x - 1, a.y, a.z}, Direction::px);
    push_plus(Direction::py);
    push_minus({a.x, a.y - 1, a.z}, Direction::py);
    push_plus(Direction::pz);
    push_minus({a.x, a.y, a.z - 1}, Direction::pz);
  }
  adj_begin_[vertex_count_] = static_cast<std::uint32_t>(adj_.size());
}

std::uint32_t SlabGeometry::checked_index(const Vertex& v) const {
  if (!contains(v)) throw DomainError("vertex " + to_string(v) + " outside window");
  return index(v);
}

std::optional<EdgeId> SlabGeometry::edge_between(const Vertex& a, const Vertex& b) const {
  if (!contains(a) || !contains(b)) return std::nullopt;
  const std::uint32_t ia = index(a);
  for (const Incidence& inc : incident(ia)) {
    if (vertex(inc.vertex) == b) return inc.edge;
  }
  return std::nullopt;
}

std::vector<Vertex> SlabGeometry::neighbors(const Vertex& v) const {
  const std::uint32_t i = checked_index(v);
  std::vector<Vertex> out;
  out.reserve(6);
  for (const Incidence& inc : incident(i)) out.push_back(vertex(inc.vertex));
  return out;
}

std::vector<Vertex> neighbors(const SlabGeometry& g, const Vertex& v) { return g.neighbors(v); }

nlohmann::json geometry_to_json(const SlabGeometry& g) {
  const PlaneBox& w = g.window();
  return {{"k", g.thickness()}, {"window", {w.x0, w.x1, w.y0, w.y1}}};
}

SlabGeometry geometry_from_json(const nlohmann::json& j) {
  const auto& w = j.at("window");
  if (!w.is_array() || w.size() != 4) throw DomainError("window must be [x0,x1,y0,y1]");
  return SlabGeometry(j.at("k").get<int>(),
                      {w[0].get<int>(), w[1].get<int>(), w[2].get<int>(), w[3].get<int>()});
}

// ---------------------------------------------------------------------------
// Regions

Region Region::rectangle(int thickness, PlaneBox box) {
  if (box.x1 < box.x0 || box.y1 < box.y0) throw DomainError("empty rectangle");
  Region r(RegionKind::rectangle, thickness, box);
  r.mask_.assign(static_cast<std::size_t>(box.width()) * box.height(), 1);
  r.cells_ = r.mask_.size();
  return r;
}

Region Region::annulus(int thickness, int cx, int cy, int inner, int outer) {
  if (inner < 0 || outer <= inner) throw DomainError("annulus needs 0 <= n < m");
  Region r(RegionKind::annulus, thickness, ball_box(cx, cy, outer));
  r.mask_.assign(static_cast<std::size_t>(r.bounds_.width()) * r.bounds_.height(), 0);
  for (int y = r.bounds_.y0; y <= r.bounds_.y1; ++y) {
    for (int x = r.bounds_.x0; x <= r.bounds_.x1; ++x) {
      if (plane_dist(x, y, cx, cy) > inner) {
        r.mask_[(y - r.bounds_.y0) * r.bounds_.width() + (x - r.bounds_.x0)] = 1;
        ++r.cells_;
      }
    }
  }
  r.cx_ = cx;
  r.cy_ = cy;
  r.inner_ = inner;
  r.outer_ = outer;
  return r;
}

Region Region::cylinder(int thickness, std::span<const std::array<int, 2>> cells) {
  PlaneBox box{0, -1, 0, -1};
  if (!cells.empty()) {
    box = {cells[0][0], cells[0][0], cells[0][1], cells[0][1]};
    for (const auto& c : cells) {
      box.x0 = std::min(box.x0, c[0]);
      box.x1 = std::max(box.x1, c[0]);
      box.y0 = std::min(box.y0, c[1]);
      box.y1 = std::max(box.y1, c[1]);
    }
  }
  Region r(RegionKind::cylinder, thickness, box);
  if (cells.empty()) return r;
  r.mask_.assign(static_cast<std::size_t>(box.width()) * box.height(), 0);
  for (const auto& c : cells) {
    auto& m = r.mask_[(c[1] - box.y0) * box.width() + (c[0] - box.x0)];
    if (!m) {
      m = 1;
      ++r.cells_;
    }
  }
  return r;
}

std::vector<std::array<int, 2>> Region::plane_cells() const {
  std::vector<std::array<int, 2>> out;
  out.reserve(cells_);
  for (int y = bounds_.y0; y <= bounds_.y1; ++y)
    for (int x = bounds_.x0; x <= bounds_.x1; ++x)
      if (contains_cell(x, y)) out.push_back({x, y});
  return out;
}

std::vector<Vertex> Region::vertices() const {
  std::vector<Vertex> out;
  out.reserve(vertex_count());
  for (const auto& c : plane_cells())
    for (int z = 0; z <= k_; ++z) out.push_back({c[0], c[1], z});
  return out;
}

void Region::require(RegionKind kind, const char* what) const {
  if (kind_ != kind) throw DomainError(std::string(what) + " requires a different region kind");
}

std::vector<Vertex> Region::column_set(PlaneBox box) const {
  std::vector<Vertex> out;
  for (int y = box.y0; y <= box.y1; ++y)
    for (int x = box.x0; x <= box.x1; ++x)
      for (int z = 0; z <= k_; ++z) out.push_back({x, y, z});
  return out;
}

std::vector<Vertex> Region::left_face() const {
  require(RegionKind::rectangle, "left_face");
  return column_set({bounds_.x0, bounds_.x0, bounds_.y0, bounds_.y1});
}
std::vector<Vertex> Region::right_face() const {
  require(RegionKind::rectangle, "right_face");
  return column_set({bounds_.x1, bounds_.x1, bounds_.y0, bounds_.y1});
}
std::vector<Vertex> Region::bottom_face() const {
  require(RegionKind::rectangle, "bottom_face");
  return column_set({bounds_.x0, bounds_.x1, bounds_.y0, bounds_.y0});
}
std::vector<Vertex> Region::top_face() const {
  require(RegionKind::rectangle, "top_face");
  return column_set({bounds_.x0, bounds_.x1, bounds_.y1, bounds_.y1});
}

std::array<int, 2> Region::center() const {
  require(RegionKind::annulus, "center");
  return {cx_, cy_};
}
int Region::inner_radius() const {
  require(RegionKind::annulus, "inner_radius");
  return inner_;
}
int Region::outer_radius() const {
  require(RegionKind::annulus, "outer_radius");
  return outer_;
}

std::vector<Vertex> Region::inner_ring() const {
  require(RegionKind::annulus, "inner_ring");
  std::vector<Vertex> out;
  for (const Vertex& v : vertices())
    if (plane_dist(v.x, v.y, cx_, cy_) == inner_ + 1) out.push_back(v);
  return out;
}

std::vector<Vertex> Region::outer_ring() const {
  require(RegionKind::annulus, "outer_ring");
  std::vector<Vertex> out;
  for (const Vertex& v : vertices())
    if (plane_dist(v.x, v.y, cx_, cy_) == outer_) out.push_back(v);
  return out;
}

Region bar(const SlabGeometry& g, std::span<const std::array<int, 2>> cells) {
  for (const auto& c : cells) {
    if (!g.window().contains(c[0], c[1]))
      throw DomainError("plane cell (" + std::to_string(c[0]) + "," + std::to_string(c[1]) +
                        ") outside window");
  }
  Region r = Region::cylinder(g.thickness(), cells);
  if (!cells.empty() && r.cell_count() ==
                            static_cast<std::size_t>(r.bounds().width()) * r.bounds().height()) {
    return Region::rectangle(g.thickness(), r.bounds());
  }
  return r;
}

Region bar(const SlabGeometry& g, PlaneBox box) {
  if (!g.window().contains(box.x0, box.y0) || !g.window().contains(box.x1, box.y1))
    throw DomainError("rectangle outside window");
  return Region::rectangle(g.thickness(), box);
}

Region bar(const SlabGeometry& g, std::span<const Vertex> vertices) {
  std::vector<std::array<int, 2>> cells;
  cells.reserve(vertices.size());
  for (const Vertex& v : vertices) cells.push_back({v.x, v.y});
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return bar(g, std::span<const std::array<int, 2>>(cells));
}

std::vector<std::uint8_t> region_mask(const SlabGeometry& g, const Region& r) {
  std::vector<std::uint8_t> mask(g.vertex_count(), 0);
  for (const auto& c : r.plane_cells()) {
    if (!g.window().contains(c[0], c[1])) continue;
    for (int z = 0; z <= std::min(r.thickness(), g.thickness()); ++z)
      mask[g.index({c[0], c[1], z})] = 1;
  }
  return mask;
}

// ---------------------------------------------------------------------------
// Distances

int dist_star(const Vertex& a, const Vertex& b) { return plane_dist(a.x, a.y, b.x, b.y); }

int dist_star(std::span<const Vertex> a, std::span<const Vertex> b) {
  if (a.empty() || b.empty()) throw DomainError("dist* of an empty set");
  int best = std::numeric_limits<int>::max();
  for (const Vertex& u : a)
    for (const Vertex& v : b) best = std::min(best, dist_star(u, v));
  return best;
}

int dist_star(const Region& a, const Region& b) {
  const auto ca = a.plane_cells();
  const auto cb = b.plane_cells();
  if (ca.empty() || cb.empty()) throw DomainError("dist* of an empty set");
  int best = std::numeric_limits<int>::max();
  for (const auto& u : ca)
    for (const auto& v : cb) best = std::min(best, plane_dist(u[0], u[1], v[0], v[1]));
  return best;
}

// ---------------------------------------------------------------------------
// Paths and circuits

PathOrCircuit canonical_circuit(std::span<const Vertex> cycle) {
  std::vector<Vertex> c(cycle.begin(), cycle.end());
  if (c.size() >= 2 && c.front() == c.back()) c.pop_back();
  if (c.size() < 3) throw DomainError("a circuit needs at least three distinct vertices");
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j)
      if (c[i] == c[j]) throw DomainError("circuit interior is not self-avoiding");

  const std::size_t r = c.size();
  std::size_t lo = 0;
  for (std::size_t i = 1; i < r; ++i)
    if (vertex_less(c[i], c[lo])) lo = i;

  PathOrCircuit out;
  out.closed = true;
  out.canonical = true;
  out.vertices.reserve(r + 1);
  const bool forward = vertex_less(c[(lo + 1) % r], c[(lo + r - 1) % r]);
  for (std::size_t s = 0; s < r; ++s) {
    const std::size_t i = forward ? (lo + s) % r : (lo + r - s) % r;
    out.vertices.push_back(c[i]);
  }
  out.vertices.push_back(c[lo]);
  return out;
}

namespace {

bool sequence_less(std::span<const Vertex> a, std::span<const Vertex> b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (vertex_less(a[i], b[i])) return true;
    if (vertex_less(b[i], a[i])) return false;
  }
  return a.size() < b.size();
}

}  // namespace

bool path_less(const PathOrCircuit& p, const PathOrCircuit& q) {
  if (p.closed != q.closed) throw DomainError("cannot compare a path with a circuit");
  if (!p.closed) return sequence_less(p.vertices, q.vertices);
  const PathOrCircuit cp = p.canonical ? p : canonical_circuit(p.vertices);
  const PathOrCircuit cq = q.canonical ? q : canonical_circuit(q.vertices);
  return sequence_less(cp.vertices, cq.vertices);
}

bool is_valid_path(const SlabGeometry& g, const PathOrCircuit& p) {
  const auto& vs = p.vertices;
  if (vs.empty()) return true;
  for (const Vertex& v : vs)
    if (!g.contains(v)) return false;
  for (std::size_t i = 0; i + 1 < vs.size(); ++i)
    if (!g.edge_between(vs[i], vs[i + 1])) return false;
  const std::size_t distinct = p.closed ? vs.size() - 1 : vs.size();
  if (p.closed && (vs.size() < 4 || !(vs.front() == vs.back()))) return false;
  for (std::size_t i = 0; i < distinct; ++i)
    for (std::size_t j = i + 1; j < distinct; ++j)
      if (vs[i] == vs[j]) return false;
  return true;
}

nlohmann::json path_to_json(const PathOrCircuit& p) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Vertex& v : p.vertices) arr.push_back({v.x, v.y, v.z});
  return arr;
}

PathOrCircuit path_from_json(const nlohmann::json& j) {
  PathOrCircuit p;
  for (const auto& t : j) p.vertices.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
  p.closed = p.vertices.size() >= 4 && p.vertices.front() == p.vertices.back();
  return p;
}

}  // namespace slabperc
