#include "slabperc/connectivity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace slabperc {

void UnionFind::reset(std::size_t n) {
  parent_.resize(n);
  size_.assign(n, 1);
  for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<std::uint32_t>(i);
}

std::uint32_t UnionFind::find(std::uint32_t a) {
  while (parent_[a] != a) {
    parent_[a] = parent_[parent_[a]];
    a = parent_[a];
  }
  return a;
}

bool UnionFind::unite(std::uint32_t a, std::uint32_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  return true;
}

ClusterPartition clusters(const BondConfig& c, const Region& region) {
  const SlabGeometry& g = c.geometry();
  const auto mask = region_mask(g, region);
  UnionFind uf(g.vertex_count());
  const auto edges = g.edges();
  for (EdgeId e = 0; e < edges.size(); ++e) {
    if (c.is_open(e) && mask[edges[e].u] && mask[edges[e].v]) uf.unite(edges[e].u, edges[e].v);
  }
  ClusterPartition out;
  out.component.assign(g.vertex_count(), kNone);
  std::vector<std::uint32_t> root_id(g.vertex_count(), kNone);
  for (std::uint32_t v = 0; v < g.vertex_count(); ++v) {
    if (!mask[v]) continue;
    const std::uint32_t r = uf.find(v);
    if (root_id[r] == kNone) {
      root_id[r] = static_cast<std::uint32_t>(out.sizes.size());
      out.sizes.push_back(0);
    }
    out.component[v] = root_id[r];
    ++out.sizes[root_id[r]];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Crossings

CrossingQuery CrossingQuery::horizontal(const Region& rect) {
  return {rect, rect.left_face(), rect.right_face()};
}

CrossingQuery CrossingQuery::vertical(const Region& rect) {
  return {rect, rect.bottom_face(), rect.top_face()};
}

namespace {

std::vector<std::uint32_t> indices_in(const SlabGeometry& g, const std::vector<std::uint8_t>& mask,
                                      std::span<const Vertex> vs) {
  std::vector<std::uint32_t> out;
  for (const Vertex& v : vs) {
    if (!g.contains(v)) continue;
    const std::uint32_t i = g.index(v);
    if (mask[i]) out.push_back(i);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Marks every vertex reachable from `sources` along open edges through
/// vertices with allowed[v] != 0. Sources must be allowed.
void reach(const BondConfig& c, std::span<const std::uint32_t> sources,
           const std::vector<std::uint8_t>& allowed, std::vector<std::uint8_t>& seen,
           std::vector<std::uint32_t>& queue) {
  const SlabGeometry& g = c.geometry();
  queue.clear();
  for (std::uint32_t s : sources) {
    if (allowed[s] && !seen[s]) {
      seen[s] = 1;
      queue.push_back(s);
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (const Incidence& inc : g.incident(queue[head])) {
      if (!seen[inc.vertex] && allowed[inc.vertex] && c.is_open(inc.edge)) {
        seen[inc.vertex] = 1;
        queue.push_back(inc.vertex);
      }
    }
  }
}

}  // namespace

bool crossing(const BondConfig& c, const CrossingQuery& q) {
  const SlabGeometry& g = c.geometry();
  const auto mask = region_mask(g, q.region);
  const auto src = indices_in(g, mask, q.source);
  const auto dst = indices_in(g, mask, q.target);
  if (src.empty() || dst.empty()) return false;
  std::vector<std::uint8_t> seen(g.vertex_count(), 0);
  std::vector<std::uint32_t> queue;
  reach(c, src, mask, seen, queue);
  return std::any_of(dst.begin(), dst.end(), [&](std::uint32_t t) { return seen[t] != 0; });
}

// ---------------------------------------------------------------------------
// Minimal open path

PathOrCircuit min_open_path(const BondConfig& c, const Region& S, std::span<const Vertex> A,
                            std::span<const Vertex> B) {
  const SlabGeometry& g = c.geometry();
  const auto mask = region_mask(g, S);
  auto starts = indices_in(g, mask, A);
  const auto targets = indices_in(g, mask, B);
  PathOrCircuit out;
  if (starts.empty() || targets.empty()) return out;

  std::vector<std::uint8_t> is_target(g.vertex_count(), 0);
  for (std::uint32_t t : targets) is_target[t] = 1;

  const auto by_order = [&](std::uint32_t a, std::uint32_t b) {
    return vertex_less(g.vertex(a), g.vertex(b));
  };
  std::sort(starts.begin(), starts.end(), by_order);

  std::vector<std::uint8_t> allowed = mask;
  std::vector<std::uint8_t> seen(g.vertex_count());
  std::vector<std::uint32_t> queue;
  // Some simple path from v to B avoids the prefix iff v reaches B in the
  // open subgraph of S minus the prefix.
  const auto reaches_target = [&](std::uint32_t v) {
    if (is_target[v]) return true;
    std::fill(seen.begin(), seen.end(), 0);
    const std::uint32_t src[1] = {v};
    reach(c, src, allowed, seen, queue);
    return std::any_of(targets.begin(), targets.end(),
                       [&](std::uint32_t t) { return seen[t] != 0; });
  };

  std::uint32_t current = kNone;
  for (std::uint32_t a : starts) {
    if (reaches_target(a)) {
      current = a;
      break;
    }
  }
  if (current == kNone) return out;

  std::vector<std::uint32_t> path{current};
  allowed[current] = 0;
  std::vector<std::uint32_t> candidates;
  while (!is_target[current]) {
    candidates.clear();
    for (const Incidence& inc : g.incident(current))
      if (allowed[inc.vertex] && c.is_open(inc.edge)) candidates.push_back(inc.vertex);
    std::sort(candidates.begin(), candidates.end(), by_order);
    std::uint32_t next = kNone;
    for (std::uint32_t w : candidates) {
      if (reaches_target(w)) {
        next = w;
        break;
      }
    }
    current = next;  // always found: the previous step certified a route
    path.push_back(current);
    allowed[current] = 0;
  }

  out.vertices.reserve(path.size());
  for (std::uint32_t v : path) out.vertices.push_back(g.vertex(v));
  return out;
}

// ---------------------------------------------------------------------------
// Winding

namespace {

struct AnnulusView {
  const SlabGeometry& g;
  std::vector<std::uint8_t> mask;
  int cx;
  int cy;

  AnnulusView(const SlabGeometry& geom, const Region& annulus)
      : g(geom), mask(region_mask(geom, annulus)) {
    if (annulus.kind() != RegionKind::annulus) throw DomainError("region is not an annulus");
    cx = annulus.center()[0];
    cy = annulus.center()[1];
  }

  int weight(std::uint32_t a, std::uint32_t b) const {
    const Vertex va = g.vertex(a);
    const Vertex vb = g.vertex(b);
    return cut_weight(va.x, va.y, vb.x, vb.y, cx, cy);
  }
};

/// Potential labelling of every open cluster of the annulus. conflict[root]
/// is set when the cluster holds a closed walk of nonzero winding.
struct Potentials {
  std::vector<int> phi;
  std::vector<std::uint32_t> root;
  std::vector<std::uint8_t> conflict;
  std::vector<std::uint32_t> roots;
};

Potentials potentials(const BondConfig& c, const AnnulusView& view) {
  const SlabGeometry& g = c.geometry();
  Potentials pot;
  pot.phi.assign(g.vertex_count(), 0);
  pot.root.assign(g.vertex_count(), kNone);
  pot.conflict.assign(g.vertex_count(), 0);
  std::vector<std::uint32_t> queue;
  for (std::uint32_t s = 0; s < g.vertex_count(); ++s) {
    if (!view.mask[s] || pot.root[s] != kNone) continue;
    pot.roots.push_back(s);
    pot.root[s] = s;
    queue.assign(1, s);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::uint32_t u = queue[head];
      for (const Incidence& inc : g.incident(u)) {
        const std::uint32_t v = inc.vertex;
        if (!view.mask[v] || !c.is_open(inc.edge)) continue;
        const int expect = pot.phi[u] + view.weight(u, v);
        if (pot.root[v] == kNone) {
          pot.root[v] = s;
          pot.phi[v] = expect;
          queue.push_back(v);
        } else if (pot.phi[v] != expect) {
          pot.conflict[s] = 1;
        }
      }
    }
  }
  return pot;
}

}  // namespace

bool has_surrounding_circuit(const BondConfig& c, const Region& annulus) {
  return surrounding_cluster_count(c, annulus) > 0;
}

std::size_t surrounding_cluster_count(const BondConfig& c, const Region& annulus) {
  const AnnulusView view(c.geometry(), annulus);
  const Potentials pot = potentials(c, view);
  std::size_t n = 0;
  for (std::uint32_t r : pot.roots) n += pot.conflict[r];
  return n;
}

int winding_number(std::span<const Vertex> closed_walk, int cx, int cy) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < closed_walk.size(); ++i) {
    const double a0 = std::atan2(closed_walk[i].y - cy, closed_walk[i].x - cx);
    const double a1 = std::atan2(closed_walk[i + 1].y - cy, closed_walk[i + 1].x - cx);
    double d = a1 - a0;
    while (d > std::numbers::pi) d -= 2 * std::numbers::pi;
    while (d <= -std::numbers::pi) d += 2 * std::numbers::pi;
    total += d;
  }
  return static_cast<int>(std::lround(total / (2 * std::numbers::pi)));
}

// ---------------------------------------------------------------------------
// Minimal surrounding circuit

namespace {

/// Depth-first search over circuit prefixes in lexicographic order. A branch
/// is cut when no completion exists: the head must still reach the start
/// through unused vertices larger than the start, entering it from a vertex
/// larger than the second one; when that component carries no winding
/// conflict the winding of every completion is fixed and checked exactly.
class CircuitSearch {
 public:
  CircuitSearch(const BondConfig& c, const AnnulusView& view)
      : c_(c), g_(c.geometry()), view_(view) {
    in_prefix_.assign(g_.vertex_count(), 0);
    phi_.assign(g_.vertex_count(), 0);
    stamp_.assign(g_.vertex_count(), 0);
  }

  bool search_from(std::uint32_t s) {
    s_ = s;
    prefix_.assign(1, s);
    in_prefix_[s] = 1;
    const bool found = extend(0);
    in_prefix_[s] = 0;
    return found;
  }

  const std::vector<std::uint32_t>& circuit() const { return prefix_; }

 private:
  bool above_start(std::uint32_t v) const { return vertex_less(g_.vertex(s_), g_.vertex(v)); }

  std::uint32_t open_edge_to_start(std::uint32_t t) const {
    for (const Incidence& inc : g_.incident(t))
      if (inc.vertex == s_ && c_.is_open(inc.edge)) return inc.edge;
    return kNone;
  }

  bool extend(int h) {
    const std::uint32_t u = prefix_.back();
    if (prefix_.size() >= 3 && vertex_less(g_.vertex(prefix_[1]), g_.vertex(u)) &&
        open_edge_to_start(u) != kNone && h + view_.weight(u, s_) != 0) {
      prefix_.push_back(s_);
      return true;
    }
    std::vector<std::uint32_t> next;
    for (const Incidence& inc : g_.incident(u)) {
      const std::uint32_t x = inc.vertex;
      if (view_.mask[x] && !in_prefix_[x] && c_.is_open(inc.edge) && above_start(x))
        next.push_back(x);
    }
    std::sort(next.begin(), next.end(), [&](std::uint32_t a, std::uint32_t b) {
      return vertex_less(g_.vertex(a), g_.vertex(b));
    });
    for (std::uint32_t x : next) {
      const int hx = h + view_.weight(u, x);
      prefix_.push_back(x);
      in_prefix_[x] = 1;
      if (feasible(hx) && extend(hx)) return true;
      in_prefix_[x] = 0;
      prefix_.pop_back();
    }
    return false;
  }

  bool feasible(int h) {
    const std::uint32_t u = prefix_.back();
    const Vertex second = g_.vertex(prefix_[1]);
    ++epoch_;
    queue_.assign(1, u);
    stamp_[u] = epoch_;
    phi_[u] = 0;
    bool conflict = false;
    bool any_entry = false;
    bool good_entry = false;
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const std::uint32_t a = queue_[head];
      for (const Incidence& inc : g_.incident(a)) {
        if (!c_.is_open(inc.edge)) continue;
        const std::uint32_t b = inc.vertex;
        if (b == s_) {
          if (vertex_less(second, g_.vertex(a))) {
            any_entry = true;
            if (h + phi_[a] + view_.weight(a, s_) != 0) good_entry = true;
          }
          continue;
        }
        if (!view_.mask[b] || in_prefix_[b] || !above_start(b)) continue;
        const int expect = phi_[a] + view_.weight(a, b);
        if (stamp_[b] != epoch_) {
          stamp_[b] = epoch_;
          phi_[b] = expect;
          queue_.push_back(b);
        } else if (phi_[b] != expect) {
          conflict = true;
        }
      }
    }
    if (!any_entry) return false;
    return conflict || good_entry;
  }

  const BondConfig& c_;
  const SlabGeometry& g_;
  const AnnulusView& view_;
  std::uint32_t s_ = 0;
  std::vector<std::uint32_t> prefix_;
  std::vector<std::uint8_t> in_prefix_;
  std::vector<int> phi_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<std::uint32_t> queue_;
};

}  // namespace

PathOrCircuit min_surrounding_circuit(const BondConfig& c, const Region& annulus) {
  const SlabGeometry& g = c.geometry();
  const AnnulusView view(g, annulus);
  const Potentials pot = potentials(c, view);

  std::vector<std::uint32_t> starts;
  for (std::uint32_t v = 0; v < g.vertex_count(); ++v)
    if (view.mask[v] && pot.conflict[pot.root[v]]) starts.push_back(v);
  std::sort(starts.begin(), starts.end(), [&](std::uint32_t a, std::uint32_t b) {
    return vertex_less(g.vertex(a), g.vertex(b));
  });

  CircuitSearch search(c, view);
  for (std::uint32_t s : starts) {
    if (!search.search_from(s)) continue;
    PathOrCircuit out;
    out.closed = true;
    out.canonical = true;
    for (std::uint32_t v : search.circuit()) out.vertices.push_back(g.vertex(v));
    return out;
  }
  return {};
}

}  // namespace slabperc
