#include <algorithm>
#include <array>
#include <cstdlib>

#include "slabperc/connectivity.hpp"

namespace slabperc {

bool in_quadrant_slab(int k, const Vertex& v) {
  if (v.x < 0 || v.y < 0 || v.z < 0 || v.z > k) return false;
  return !(v.x == 0 && v.y == 0 && (v.z == 0 || v.z == k));
}

std::vector<Vertex> ball_boundary_in_quadrant(int k, int s, const Vertex& z) {
  std::vector<Vertex> out;
  for (int y = z.y - s; y <= z.y + s; ++y)
    for (int x = z.x - s; x <= z.x + s; ++x)
      if (plane_dist(x, y, z.x, z.y) == s)
        for (int h = 0; h <= k; ++h)
          if (in_quadrant_slab(k, {x, y, h})) out.push_back({x, y, h});
  return out;
}

namespace {

/// The graph (B_s(z) x [k]) ∩ L \ {z} with compact vertex ids.
class BallGraph {
 public:
  BallGraph(int k, int s, const Vertex& z) : k_(k), s_(s), z_(z) {
    if (k < 0 || s < 1) throw DomainError("disjoint paths check needs k >= 0 and s >= 1");
    if (!in_quadrant_slab(k, z)) throw DomainError("z is not in the quadrant slab");
    box_ = ball_box(z.x, z.y, s);
    const std::size_t n = static_cast<std::size_t>(box_.width()) * box_.height() * (k + 1);
    active_.assign(n, 0);
    for (std::uint32_t i = 0; i < n; ++i) {
      const Vertex v = vertex(i);
      active_[i] = in_quadrant_slab(k, v) && !(v == z);
    }
    adj_.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      if (!active_[i]) continue;
      const Vertex v = vertex(i);
      const std::array<Vertex, 6> nb = {Vertex{v.x + 1, v.y, v.z}, Vertex{v.x - 1, v.y, v.z},
                                        Vertex{v.x, v.y + 1, v.z}, Vertex{v.x, v.y - 1, v.z},
                                        Vertex{v.x, v.y, v.z + 1}, Vertex{v.x, v.y, v.z - 1}};
      for (const Vertex& w : nb)
        if (contains(w)) adj_[i].push_back(index(w));
    }
  }

  std::size_t size() const { return active_.size(); }
  bool contains(const Vertex& v) const {
    return box_.contains(v.x, v.y) && v.z >= 0 && v.z <= k_ && active_[index(v)];
  }
  std::uint32_t index(const Vertex& v) const {
    return static_cast<std::uint32_t>(((v.y - box_.y0) * box_.width() + (v.x - box_.x0)) * (k_ + 1) +
                                      v.z);
  }
  Vertex vertex(std::uint32_t i) const {
    const int h = static_cast<int>(i % (k_ + 1));
    const int cell = static_cast<int>(i / (k_ + 1));
    return {box_.x0 + cell % box_.width(), box_.y0 + cell / box_.width(), h};
  }
  const std::vector<std::uint32_t>& adj(std::uint32_t i) const { return adj_[i]; }
  int k() const { return k_; }
  int s() const { return s_; }
  const Vertex& center() const { return z_; }

 private:
  int k_;
  int s_;
  Vertex z_;
  PlaneBox box_;
  std::vector<std::uint8_t> active_;
  std::vector<std::vector<std::uint32_t>> adj_;
};

using Pair = std::array<std::uint32_t, 2>;

/// Greedy shortest paths first; on failure an exhaustive search over simple
/// paths of each pair in turn, cut whenever a pending pair loses its route.
class Router {
 public:
  explicit Router(const BallGraph& g) : g_(g), seen_(g.size(), 0), prev_(g.size(), kNone) {}

  bool solve(const std::vector<Pair>& pairs) {
    std::vector<std::uint8_t> endpoints(g_.size(), 0);
    for (const Pair& p : pairs) endpoints[p[0]] = endpoints[p[1]] = 1;

    std::vector<int> order(pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    do {
      for (bool flip : {false, true}) {
        blocked_ = endpoints;
        bool ok = true;
        for (int i : order) {
          const Pair& p = pairs[i];
          if (p[0] == p[1]) continue;
          if (!bfs(p[0], p[1], flip)) {
            ok = false;
            break;
          }
          for (std::uint32_t v = p[1]; v != kNone; v = prev_[v]) blocked_[v] = 1;
        }
        if (ok) return true;
      }
    } while (std::next_permutation(order.begin(), order.end()));

    blocked_ = endpoints;
    pairs_ = pairs;
    return search(0);
  }

 private:
  /// Shortest path a -> b through unblocked vertices; b may be blocked.
  bool bfs(std::uint32_t a, std::uint32_t b, bool flip = false) {
    std::fill(seen_.begin(), seen_.end(), 0);
    queue_.assign(1, a);
    seen_[a] = 1;
    prev_[a] = kNone;
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const std::uint32_t u = queue_[head];
      const auto& nb = g_.adj(u);
      for (std::size_t t = 0; t < nb.size(); ++t) {
        const std::uint32_t v = flip ? nb[nb.size() - 1 - t] : nb[t];
        if (seen_[v]) continue;
        if (v == b) {
          prev_[v] = u;
          return true;
        }
        if (blocked_[v]) continue;
        seen_[v] = 1;
        prev_[v] = u;
        queue_.push_back(v);
      }
    }
    return a == b;
  }

  bool pending_routable(std::size_t from) {
    for (std::size_t j = from; j < pairs_.size(); ++j) {
      const Pair& q = pairs_[j];
      if (q[0] != q[1] && !bfs(q[0], q[1])) return false;
    }
    return true;
  }

  bool search(std::size_t i) {
    if (i == pairs_.size()) return true;
    const Pair& p = pairs_[i];
    if (p[0] == p[1]) return search(i + 1);
    if (i + 1 == pairs_.size()) return bfs(p[0], p[1]);
    return walk(i, p[0]);
  }

  bool walk(std::size_t i, std::uint32_t u) {
    const std::uint32_t target = pairs_[i][1];
    for (std::uint32_t v : g_.adj(u)) {
      if (v == target) {
        if (search(i + 1)) return true;
        continue;
      }
      if (blocked_[v]) continue;
      blocked_[v] = 1;
      if (bfs(v, target) && pending_routable(i + 1) && walk(i, v)) return true;
      blocked_[v] = 0;
    }
    return false;
  }

  const BallGraph& g_;
  std::vector<Pair> pairs_;
  std::vector<std::uint8_t> blocked_;
  std::vector<std::uint8_t> seen_;
  std::vector<std::uint32_t> prev_;
  std::vector<std::uint32_t> queue_;
};

}  // namespace

struct DisjointPathsSolver::Impl {
  Impl(int k, int s, const Vertex& z)
      : graph(k, s, z), ring(ball_boundary_in_quadrant(k, s, z)), router(graph) {}
  BallGraph graph;
  std::vector<Vertex> ring;
  Router router;
};

DisjointPathsSolver::DisjointPathsSolver(int k, int s, const Vertex& z)
    : impl_(std::make_unique<Impl>(k, s, z)) {}
DisjointPathsSolver::~DisjointPathsSolver() = default;
DisjointPathsSolver::DisjointPathsSolver(DisjointPathsSolver&&) noexcept = default;

bool DisjointPathsSolver::operator()(const std::array<Vertex, 3>& from,
                                     const std::array<Vertex, 3>& to) {
  const BallGraph& g = impl_->graph;
  const Vertex& z = g.center();
  for (int i = 0; i < 3; ++i) {
    const int l1 = std::abs(from[i].x - z.x) + std::abs(from[i].y - z.y) + std::abs(from[i].z - z.z);
    if (l1 != 1 || !in_quadrant_slab(g.k(), from[i]))
      throw DomainError("u, v, w must be neighbors of z in the quadrant slab");
    if (std::find(impl_->ring.begin(), impl_->ring.end(), to[i]) == impl_->ring.end())
      throw DomainError("u', v', w' must lie on the boundary of the ball");
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      if (from[i] == from[j] || to[i] == to[j]) throw DomainError("endpoints must be distinct");
      if (from[i] == to[j]) throw DomainError("endpoints of different pairs coincide");
    }
  }
  std::vector<Pair> pairs;
  for (int i = 0; i < 3; ++i) pairs.push_back({g.index(from[i]), g.index(to[i])});
  return impl_->router.solve(pairs);
}

bool disjoint_paths_check(int k, int s, const Vertex& z, const std::array<Vertex, 3>& from,
                          const std::array<Vertex, 3>& to) {
  DisjointPathsSolver solver(k, s, z);
  return solver(from, to);
}

}  // namespace slabperc
