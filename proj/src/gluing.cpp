#include "slabperc/gluing.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>

#include "slabperc/connectivity.hpp"
#include "slabperc/invasion.hpp"
#include "slabperc/rng.hpp"
#include "slabperc/stats.hpp"

namespace slabperc {

bool EventPredicate::operator()(const BondConfig& c) const {
  if (!on_config) throw DomainError("event '" + name + "' has no configuration evaluator");
  return on_config(c);
}

bool EventPredicate::operator()(const LabelField& omega) const {
  if (!on_labels) throw DomainError("event '" + name + "' has no label evaluator");
  return on_labels(omega);
}

namespace {

BondConfig random_config(const GeometryPtr& g, double p, CounterRng& rng) {
  std::vector<std::uint8_t> bits(g->edge_count());
  for (auto& b : bits) b = rng.uniform() < p ? 1 : 0;
  return BondConfig(g, std::move(bits));
}

}  // namespace

bool support_respected(const EventPredicate& ev, const GeometryPtr& g, double p, std::uint64_t seed,
                       int trials) {
  std::vector<std::uint8_t> in_support(g->edge_count(), 0);
  for (EdgeId e : ev.support) in_support.at(e) = 1;
  std::vector<EdgeId> outside;
  for (EdgeId e = 0; e < g->edge_count(); ++e)
    if (!in_support[e]) outside.push_back(e);
  if (outside.empty()) return true;
  CounterRng rng(stream_key(seed, 0x5u));
  for (int t = 0; t < trials; ++t) {
    const BondConfig c = random_config(g, p, rng);
    const EdgeId e = outside[rng.below(outside.size())];
    if (ev(c) != ev(c.with_edge(e, !c.is_open(e)))) return false;
  }
  return true;
}

bool monotonicity_respected(const EventPredicate& ev, const GeometryPtr& g, double p,
                            std::uint64_t seed, int trials) {
  if (ev.monotonicity == Monotonicity::neither || ev.support.empty()) return true;
  CounterRng rng(stream_key(seed, 0x6u));
  for (int t = 0; t < trials; ++t) {
    const BondConfig c = random_config(g, p, rng);
    const EdgeId e = ev.support[rng.below(ev.support.size())];
    if (c.is_open(e)) continue;
    const bool before = ev(c);
    const bool after = ev(c.with_edge(e, true));
    if (ev.monotonicity == Monotonicity::increasing && before && !after) return false;
    if (ev.monotonicity == Monotonicity::decreasing && !before && after) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Gluing for invasions

std::string GlueEvents::failed_domain_conjunct() const {
  if (!circuit) return "no open circuit surrounds the origin in the ring";
  if (!no_escape) return "an open path escapes from the inner ball to the outer boundary";
  if (origin_holds) return "the invasion from the origin already contains the minimal circuit";
  if (!x_holds) return "the invasion from x does not contain the minimal circuit";
  return {};
}

const char* to_string(EdgeChange c) {
  switch (c) {
    case EdgeChange::untouched: return "untouched";
    case EdgeChange::opened: return "opened";
    case EdgeChange::closed: return "closed";
  }
  return "?";
}

std::vector<EdgeId> plus_cylinder_edges(const SlabGeometry& g, const Vertex& center) {
  const std::array<std::array<int, 2>, 5> cells = {{{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
  std::vector<EdgeId> out;
  for (const auto& d : cells) {
    for (int h = 0; h <= g.thickness(); ++h) {
      const Vertex v{center.x + d[0], center.y + d[1], h};
      if (!g.contains(v)) continue;
      if (h < g.thickness()) {
        if (auto e = g.edge_between(v, {v.x, v.y, h + 1})) out.push_back(*e);
      }
      if (d[0] != 0 || d[1] != 0) {
        if (auto e = g.edge_between(v, {center.x, center.y, h})) out.push_back(*e);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

constexpr Vertex kOrigin{0, 0, 0};

void check_context(const SlabGeometry& g, const GlueContext& ctx) {
  if (ctx.n < 1 || ctx.m <= 2 * ctx.n) throw DomainError("gluing needs n >= 1 and m > 2n");
  if (!(ctx.p > 0.0 && ctx.p < 1.0)) throw DomainError("gluing needs p in (0,1)");
  const double b = ctx.closing_level();
  if (!(b > ctx.p && b < 1.0)) throw DomainError("gluing needs b in (p,1)");
  const PlaneBox need = ball_box(0, 0, ctx.m);
  const PlaneBox& w = g.window();
  if (need.x0 < w.x0 || need.x1 > w.x1 || need.y0 < w.y0 || need.y1 > w.y1)
    throw DomainError("window does not contain the ball of radius m");
  if (plane_dist(ctx.x.x, ctx.x.y, 0, 0) > ctx.m || ctx.x.z < 0 || ctx.x.z > g.thickness())
    throw DomainError("x must lie in the ball of radius m");
}

std::vector<EdgeId> circuit_edges(const SlabGeometry& g, const PathOrCircuit& c) {
  std::vector<EdgeId> out;
  for (std::size_t i = 0; i + 1 < c.vertices.size(); ++i)
    out.push_back(*g.edge_between(c.vertices[i], c.vertices[i + 1]));
  std::sort(out.begin(), out.end());
  return out;
}

bool contains_edges(const InvasionState& inv, std::span<const EdgeId> edges) {
  std::vector<std::uint8_t> in(inv.geometry->edge_count(), 0);
  for (const auto& s : inv.log) in[s.edge] = 1;
  return std::all_of(edges.begin(), edges.end(), [&](EdgeId e) { return in[e] != 0; });
}

/// Everything the gluing map reads off a label field.
struct Frame {
  BondConfig config;
  PathOrCircuit circuit;
  std::vector<EdgeId> circuit_edges;
  std::vector<std::uint8_t> on_circuit;  // per vertex
  GlueEvents events;
  std::optional<InvasionState> from_origin;
  std::optional<InvasionState> from_x;
};

Frame read_frame(const LabelField& omega, const GlueContext& ctx) {
  const SlabGeometry& g = omega.geometry();
  check_context(g, ctx);
  const int k = g.thickness();
  Frame f{threshold(omega, ctx.p), {}, {}, std::vector<std::uint8_t>(g.vertex_count(), 0), {}, {}, {}};
  const Region ring = Region::annulus(k, 0, 0, ctx.n, 2 * ctx.n);
  f.circuit = min_surrounding_circuit(f.config, ring);
  f.events.circuit = !f.circuit.empty();

  const Region ball = Region::rectangle(k, ball_box(0, 0, ctx.m));
  CrossingQuery escape{ball, Region::rectangle(k, ball_box(0, 0, 2 * ctx.n)).vertices(),
                       Region::annulus(k, 0, 0, ctx.m - 1, ctx.m).vertices()};
  f.events.no_escape = !crossing(f.config, escape);

  if (f.events.circuit) {
    f.circuit_edges = circuit_edges(g, f.circuit);
    for (const Vertex& v : f.circuit.vertices) f.on_circuit[g.index(v)] = 1;
    const StopAtBoundary stop{0, 0, ctx.m};
    f.from_origin = invade(omega, kOrigin, stop);
    f.from_x = invade(omega, ctx.x, stop);
    f.events.origin_holds = contains_edges(*f.from_origin, f.circuit_edges);
    f.events.x_holds = contains_edges(*f.from_x, f.circuit_edges);
  }
  return f;
}

/// First vertex of the invasion from the origin on the inner boundary of the
/// component R of the origin among columns off the circuit's projection,
/// and the smallest circuit vertex whose column is a planar neighbor of it.
std::optional<std::array<Vertex, 2>> landing(const SlabGeometry& g, const Frame& f) {
  const PlaneBox& w = g.window();
  const auto cell = [&](int x, int y) { return (y - w.y0) * w.width() + (x - w.x0); };
  std::vector<std::uint8_t> shadow(static_cast<std::size_t>(w.width()) * w.height(), 0);
  for (const Vertex& v : f.circuit.vertices) shadow[cell(v.x, v.y)] = 1;

  std::vector<std::uint8_t> in_r(shadow.size(), 0);
  std::vector<std::array<int, 2>> queue{{0, 0}};
  in_r[cell(0, 0)] = 1;
  constexpr std::array<std::array<int, 2>, 4> dirs = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (const auto& d : dirs) {
      const int x = queue[head][0] + d[0];
      const int y = queue[head][1] + d[1];
      if (!w.contains(x, y) || shadow[cell(x, y)] || in_r[cell(x, y)]) continue;
      in_r[cell(x, y)] = 1;
      queue.push_back({x, y});
    }
  }
  const auto on_boundary = [&](int x, int y) {
    if (!in_r[cell(x, y)]) return false;
    for (const auto& d : dirs)
      if (w.contains(x + d[0], y + d[1]) && shadow[cell(x + d[0], y + d[1])]) return true;
    return false;
  };

  for (std::uint32_t vi : f.from_origin->vertices) {
    const Vertex z = g.vertex(vi);
    if (!on_boundary(z.x, z.y)) continue;
    std::optional<Vertex> best;
    for (const Vertex& c : f.circuit.vertices) {
      if (std::abs(c.x - z.x) + std::abs(c.y - z.y) != 1) continue;
      if (!best || vertex_less(c, *best)) best = c;
    }
    return std::array<Vertex, 2>{z, *best};
  }
  return std::nullopt;
}

/// From `from`, one step into the centre column at the same height (unless
/// already there), then vertically toward `toward` until the first vertex
/// flagged in `stop`.
std::vector<Vertex> column_path(const SlabGeometry& g, const Vertex& from, const Vertex& toward,
                                const std::vector<std::uint8_t>& stop) {
  std::vector<Vertex> path{from};
  Vertex cur = from;
  if (cur.x != toward.x || cur.y != toward.y) {
    cur = {toward.x, toward.y, from.z};
    path.push_back(cur);
  }
  while (!stop[g.index(cur)]) {
    cur.z += cur.z < toward.z ? 1 : -1;
    path.push_back(cur);
  }
  return path;
}

std::vector<EdgeId> path_edges(const SlabGeometry& g, const std::vector<Vertex>& path) {
  std::vector<EdgeId> out;
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    out.push_back(*g.edge_between(path[i], path[i + 1]));
  return out;
}

bool in_plus(const Vertex& v, const Vertex& center) {
  return std::abs(v.x - center.x) + std::abs(v.y - center.y) <= 1;
}

bool connected(const BondConfig& c, std::uint32_t a, std::uint32_t b) {
  const SlabGeometry& g = c.geometry();
  std::vector<std::uint8_t> seen(g.vertex_count(), 0);
  std::vector<std::uint32_t> queue{a};
  seen[a] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    if (queue[head] == b) return true;
    for (const Incidence& inc : g.incident(queue[head])) {
      if (seen[inc.vertex] || !c.is_open(inc.edge)) continue;
      seen[inc.vertex] = 1;
      queue.push_back(inc.vertex);
    }
  }
  return false;
}

std::vector<EdgeId> set_minus(std::vector<EdgeId> a, std::vector<EdgeId> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<EdgeId> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

GlueWitness witness_from(const SlabGeometry& g, const Frame& f, const std::array<Vertex, 2>& zz) {
  return {zz[0], zz[1], set_minus(plus_cylinder_edges(g, zz[1]), f.circuit_edges)};
}

}  // namespace

GlueEvents evaluate_glue_events(const LabelField& omega, const GlueContext& ctx) {
  return read_frame(omega, ctx).events;
}

SurgeryReport glue_invasion(const LabelField& omega, const GlueContext& ctx) {
  const SlabGeometry& g = omega.geometry();
  const Frame f = read_frame(omega, ctx);
  if (!f.events.domain()) throw PreconditionError(f.events.failed_domain_conjunct());
  const auto zz = landing(g, f);
  if (!zz) throw PreconditionError("the invasion from the origin never lands next to the circuit");
  const Vertex z = (*zz)[0];
  const Vertex zp = (*zz)[1];
  const double b = ctx.closing_level();

  SurgeryReport rep{omega, omega, {}, {}, 0, f.events, {}, f.circuit, {}, 0, 0, {}, {}, {}, {}, {}};
  rep.forward = witness_from(g, f, *zz);
  rep.bound = plus_cylinder_edges(g, zp).size();
  rep.circuit_clusters_before = surrounding_cluster_count(f.config, Region::annulus(g.thickness(), 0, 0, ctx.n, 2 * ctx.n));

  // Step 1: a witness path from z into the circuit through the centre column.
  rep.gamma_z = column_path(g, z, zp, f.on_circuit);
  std::vector<EdgeId> opened = path_edges(g, rep.gamma_z);

  const auto apply = [&](const std::vector<EdgeId>& open_set) {
    const auto closed = set_minus(rep.forward.changed, open_set);
    return affine_close(affine_open(omega, open_set, ctx.p), closed, b);
  };

  // Step 2: the first plus vertex reached from x, joined to the circuit or
  // to the step-1 path unless the surgery already connects it to z.
  for (std::uint32_t vi : f.from_x->vertices) {
    const Vertex v = g.vertex(vi);
    if (in_plus(v, zp)) {
      rep.w = v;
      break;
    }
  }
  if (rep.w) {
    std::vector<std::uint8_t> target = f.on_circuit;
    for (const Vertex& v : rep.gamma_z) target[g.index(v)] = 1;
    const bool joined = target[g.index(*rep.w)] ||
                        connected(threshold(apply(opened), ctx.p), g.index(*rep.w), g.index(z));
    if (!joined) {
      rep.gamma_w = column_path(g, *rep.w, zp, target);
      for (EdgeId e : path_edges(g, rep.gamma_w)) opened.push_back(e);
    }
  }

  // Step 3: every other plus edge off the circuit is closed.
  rep.output = apply(opened);
  std::sort(opened.begin(), opened.end());
  rep.changed = rep.forward.changed;
  for (EdgeId e : rep.changed)
    rep.kinds.push_back(std::binary_search(opened.begin(), opened.end(), e) ? EdgeChange::opened
                                                                            : EdgeChange::closed);

  const Frame after = read_frame(rep.output, ctx);
  rep.after = after.events;
  rep.circuit_after = after.circuit;
  rep.circuit_clusters_after = surrounding_cluster_count(after.config, Region::annulus(g.thickness(), 0, 0, ctx.n, 2 * ctx.n));
  rep.reconstructed = reconstruct_glue(rep.output, ctx);
  return rep;
}

std::optional<GlueWitness> reconstruct_glue(const LabelField& omega_prime, const GlueContext& ctx) {
  const SlabGeometry& g = omega_prime.geometry();
  const Frame f = read_frame(omega_prime, ctx);
  if (!f.events.circuit) return std::nullopt;
  const auto zz = landing(g, f);
  if (!zz) return std::nullopt;
  return witness_from(g, f, *zz);
}

LabelField invert_glue(const LabelField& omega_prime, const GlueWitness& witness,
                       const GlueContext& ctx) {
  std::vector<EdgeId> opened;
  std::vector<EdgeId> closed;
  for (EdgeId e : witness.changed) (omega_prime[e] < ctx.p ? opened : closed).push_back(e);
  return affine_close_inverse(affine_open_inverse(omega_prime, opened, ctx.p), closed,
                              ctx.closing_level());
}

GlueInstance plant_glue_candidate(int k, const GlueContext& base, std::uint64_t seed,
                                  std::uint64_t stream) {
  if (k < 1) throw DomainError("planted gluing instances need k >= 1");
  const auto g = make_geometry(k, ball_box(0, 0, base.m));
  check_context(*g, {base.n, base.m, kOrigin, base.p, base.b});
  const double p = base.p;
  const double b = base.closing_level();
  CounterRng rng(stream_key(seed, stream) ^ 0x9a7eu);
  const int radius = base.n + 1 + static_cast<int>(rng.below(base.n));
  const int ring_layer = static_cast<int>(rng.below(k + 1));
  const int lane_layer = (ring_layer + 1 + static_cast<int>(rng.below(k))) % (k + 1);
  constexpr std::array<std::array<int, 2>, 4> dirs = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
  const auto dir = dirs[rng.below(4)];

  std::vector<double> labels(g->edge_count());
  fill_labels(*g, seed, stream, labels);
  const auto set = [&](const Vertex& a, const Vertex& c, double value) {
    labels[*g->edge_between(a, c)] = value;
  };
  const auto sup = [](const Vertex& v) { return plane_dist(v.x, v.y, 0, 0); };

  // Closed shell outside B_{2n}.
  for (EdgeId e = 0; e < g->edge_count(); ++e) {
    const Edge& ed = g->edge(e);
    if (std::max(sup(g->vertex(ed.u)), sup(g->vertex(ed.v))) > 2 * base.n)
      labels[e] = b + (1.0 - b) * labels[e];
  }
  // Corridor: closed side edges from just inside the ring outwards, open
  // lane edges, and one gate edge just above p in the shell.
  std::vector<Vertex> lane;
  for (int h = 0; h != lane_layer; h += lane_layer > 0 ? 1 : -1) lane.push_back({0, 0, h});
  for (int t = 0; t <= base.m; ++t) lane.push_back({t * dir[0], t * dir[1], lane_layer});
  for (const Vertex& v : lane) {
    if (sup(v) < radius - 1) continue;
    for (const Vertex& u : g->neighbors(v)) set(v, u, b + (1.0 - b) * rng.uniform());
  }
  for (std::size_t i = 0; i + 1 < lane.size(); ++i) {
    const bool gate = sup(lane[i]) == 2 * base.n + 1;
    set(lane[i], lane[i + 1], gate ? p + 1e-6 * rng.uniform() : p * rng.uniform());
  }
  // Planted square circuit.
  std::vector<Vertex> ring;
  for (int t = -radius; t < radius; ++t) ring.push_back({t, -radius, ring_layer});
  for (int t = -radius; t < radius; ++t) ring.push_back({radius, t, ring_layer});
  for (int t = radius; t > -radius; --t) ring.push_back({t, radius, ring_layer});
  for (int t = radius; t > -radius; --t) ring.push_back({-radius, t, ring_layer});
  for (std::size_t i = 0; i < ring.size(); ++i)
    set(ring[i], ring[(i + 1) % ring.size()], p * rng.uniform());

  GlueContext ctx = base;
  if (rng.below(2) == 0) {
    ctx.x = ring[rng.below(ring.size())];
  } else {
    const int side = 2 * (2 * base.n) + 1;
    ctx.x = {static_cast<int>(rng.below(side)) - 2 * base.n,
             static_cast<int>(rng.below(side)) - 2 * base.n, static_cast<int>(rng.below(k + 1))};
  }
  return {LabelField(g, std::move(labels), seed, stream), ctx};
}

std::optional<GlueInstance> sample_glue_domain(int k, const GlueContext& base, std::uint64_t seed,
                                               std::uint64_t first_stream, int max_attempts,
                                               std::uint64_t* next_stream) {
  for (int i = 0; i < max_attempts; ++i) {
    GlueInstance inst = plant_glue_candidate(k, base, seed, first_stream + i);
    if (evaluate_glue_events(inst.omega, inst.ctx).domain()) {
      if (next_stream) *next_stream = first_stream + i + 1;
      return inst;
    }
  }
  if (next_stream) *next_stream = first_stream + max_attempts;
  return std::nullopt;
}

bool SurgeryReport::untouched_identical() const {
  std::vector<std::uint8_t> moved(input.size(), 0);
  for (EdgeId e : changed) moved[e] = 1;
  for (EdgeId e = 0; e < input.size(); ++e)
    if (!moved[e] && input[e] != output[e]) return false;
  return true;
}

nlohmann::json SurgeryReport::to_json() const {
  const SlabGeometry& g = input.geometry();
  const auto events = [](const GlueEvents& e) {
    return nlohmann::json{{"circuit", e.circuit},
                          {"no_escape", e.no_escape},
                          {"origin_holds", e.origin_holds},
                          {"x_holds", e.x_holds},
                          {"target", e.target()}};
  };
  const auto vertex = [](const Vertex& v) { return nlohmann::json::array({v.x, v.y, v.z}); };
  nlohmann::json edges = nlohmann::json::array();
  for (std::size_t i = 0; i < changed.size(); ++i) {
    const Edge& e = g.edge(changed[i]);
    edges.push_back({{"u", vertex(g.vertex(e.u))},
                     {"v", vertex(g.vertex(e.v))},
                     {"map", to_string(kinds[i])},
                     {"before", input[changed[i]]},
                     {"after", output[changed[i]]}});
  }
  nlohmann::json j{{"changed", std::move(edges)},
                   {"bound", bound},
                   {"before", events(before)},
                   {"after", events(after)},
                   {"circuit", path_to_json(circuit_before)},
                   {"circuit_preserved", circuit_before == circuit_after},
                   {"z", vertex(forward.z)},
                   {"z_prime", vertex(forward.z_prime)},
                   {"gamma_z", path_to_json({gamma_z, false, false})},
                   {"gamma_w", path_to_json({gamma_w, false, false})}};
  j["w"] = w ? vertex(*w) : nlohmann::json();
  j["reconstructed_z_prime"] = reconstructed ? vertex(reconstructed->z_prime) : nlohmann::json();
  return j;
}

// ---------------------------------------------------------------------------
// Counting lemmas

bool LemmaReport::hypotheses_hold() const {
  return std::all_of(hypotheses.begin(), hypotheses.end(),
                     [](const HypothesisResult& h) { return h.holds; });
}

nlohmann::json LemmaReport::to_json() const {
  nlohmann::json hyps = nlohmann::json::array();
  for (const auto& h : hypotheses) {
    nlohmann::json j{{"name", h.name}, {"holds", h.holds}};
    if (h.counterexample) j["counterexample"] = *h.counterexample;
    hyps.push_back(std::move(j));
  }
  nlohmann::json j{{"lemma", lemma},          {"hypotheses", std::move(hyps)},
                   {"lhs", lhs},              {"rhs", rhs},
                   {"margin_sigma", margin_sigma}, {"inequality_holds", inequality_holds}};
  if (lhs_exact) j["lhs_exact"] = *lhs_exact;
  if (rhs_exact) j["rhs_exact"] = *rhs_exact;
  if (!extra.empty()) j["details"] = extra;
  return j;
}

namespace {

std::string edge_list(const SlabGeometry& g, std::span<const EdgeId> edges) {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = g.edge(edges[i]);
    out << (i ? ", " : "") << to_string(g.vertex(e.u)) << '-' << to_string(g.vertex(e.v));
  }
  out << '}';
  return out.str();
}

std::string open_support(const SlabGeometry& g, std::span<const EdgeId> support, std::uint32_t mask) {
  std::vector<EdgeId> open;
  for (std::size_t i = 0; i < support.size(); ++i)
    if (mask >> i & 1u) open.push_back(support[i]);
  return "open " + edge_list(g, open);
}

Rational rational_pow(const Rational& x, int n) {
  Rational out = 1;
  for (int i = 0; i < n; ++i) out *= x;
  return out;
}

}  // namespace

LemmaReport verify_combi0(const EventPredicate& A, const EventPredicate& B, const ConfigMap& phi,
                          int s, const Rational& t, const Rational& p, const GeometryPtr& g,
                          std::span<const EdgeId> support) {
  if (support.size() > 22) throw DomainError("exhaustive check supports at most 22 edges");
  if (s < 0 || t <= 0) throw DomainError("combi0 needs s >= 0 and t > 0");
  if (p <= 0 || p >= 1) throw DomainError("combi0 needs p in (0,1)");
  const std::size_t n = support.size();
  std::vector<int> slot(g->edge_count(), -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (support[i] >= g->edge_count()) throw DomainError("support edge outside geometry");
    slot[support[i]] = static_cast<int>(i);
  }

  const auto make = [&](std::uint32_t mask) {
    std::vector<std::uint8_t> bits(g->edge_count(), 0);
    for (std::size_t i = 0; i < n; ++i) bits[support[i]] = mask >> i & 1u;
    return BondConfig(g, std::move(bits));
  };

  LemmaReport rep;
  rep.lemma = "combi0";
  HypothesisResult h_count{"image_size_at_least_t", true, {}};
  HypothesisResult h_into{"image_within_B", true, {}};
  HypothesisResult h_fiber{"fiber_local_outside_s_edges", true, {}};

  // Per image configuration: the union of the edges where some preimage differs.
  struct Image {
    std::uint32_t support_diff = 0;
    std::vector<EdgeId> outside;  // open edges off the support
    std::uint32_t witness = 0;
  };
  std::map<std::pair<std::uint32_t, std::vector<EdgeId>>, Image> images;

  std::vector<std::uint64_t> count_a(n + 1, 0);
  std::vector<std::uint64_t> count_b(n + 1, 0);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const BondConfig c = make(mask);
    const int ones = std::popcount(mask);
    if (B(c)) ++count_b[ones];
    if (!A(c)) continue;
    ++count_a[ones];
    std::vector<std::pair<std::uint32_t, std::vector<EdgeId>>> outs;
    for (const BondConfig& out : phi(c)) {
      std::uint32_t m = 0;
      std::vector<EdgeId> outside;
      for (EdgeId e = 0; e < out.size(); ++e) {
        if (!out.is_open(e)) continue;
        if (slot[e] >= 0) m |= 1u << slot[e];
        else outside.push_back(e);
      }
      if (h_into.holds && !B(out)) {
        h_into.holds = false;
        h_into.counterexample = open_support(*g, support, mask) + " maps outside B";
      }
      outs.emplace_back(m, std::move(outside));
    }
    std::sort(outs.begin(), outs.end());
    outs.erase(std::unique(outs.begin(), outs.end()), outs.end());
    if (h_count.holds && Rational(outs.size()) < t) {
      h_count.holds = false;
      h_count.counterexample = open_support(*g, support, mask) + " has " +
                               std::to_string(outs.size()) + " images";
    }
    for (auto& key : outs) {
      auto [it, fresh] = images.try_emplace(key);
      Image& im = it->second;
      if (fresh) im.witness = mask;
      im.support_diff |= key.first ^ mask;
      im.outside = key.second;
    }
  }
  for (const auto& [key, im] : images) {
    const std::size_t size = std::popcount(im.support_diff) + im.outside.size();
    if (size > static_cast<std::size_t>(s)) {
      h_fiber.holds = false;
      h_fiber.counterexample = "image " + open_support(*g, support, key.first) + " has preimages " +
                               "differing on " + std::to_string(size) + " edges, e.g. " +
                               open_support(*g, support, im.witness);
      break;
    }
  }
  rep.hypotheses = {h_count, h_into, h_fiber};

  const Rational q = 1 - p;
  Rational pa = 0;
  Rational pb = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    const Rational w = rational_pow(p, static_cast<int>(i)) * rational_pow(q, static_cast<int>(n - i));
    pa += Rational(count_a[i]) * w;
    pb += Rational(count_b[i]) * w;
  }
  const Rational low = p < q ? p : q;
  const Rational rhs = rational_pow(Rational(2) / low, s) * pb / t;
  rep.inequality_holds = pa <= rhs;
  rep.lhs = pa.convert_to<double>();
  rep.rhs = rhs.convert_to<double>();
  rep.lhs_exact = pa.str();
  rep.rhs_exact = rhs.str();
  rep.margin_sigma = std::numeric_limits<double>::infinity();

  const auto den_p = boost::multiprecision::denominator(p);
  const auto bound = boost::multiprecision::pow(boost::multiprecision::cpp_int(den_p), static_cast<unsigned>(n));
  const bool exact = bound % boost::multiprecision::denominator(pa) == 0 &&
                     bound % boost::multiprecision::denominator(pb) == 0;
  rep.extra = {{"support_edges", n},
               {"P_A", pa.str()},
               {"P_B", pb.str()},
               {"denominators_divide", exact},
               {"images", images.size()}};
  return rep;
}

namespace {

constexpr double kMapTolerance = 1e-12;

void check_affine(const LabelField& in, const AffineSurgery& out, int s, double a, double b) {
  if (out.changed.size() != out.kinds.size())
    throw DomainError("surgery reports a kind for every changed edge");
  if (out.changed.size() > static_cast<std::size_t>(s))
    throw DomainError("surgery changes more than s edges");
  std::vector<std::uint8_t> moved(in.size(), 0);
  for (std::size_t i = 0; i < out.changed.size(); ++i) {
    const EdgeId e = out.changed[i];
    moved.at(e) = 1;
    double expect = in[e];
    if (out.kinds[i] == EdgeChange::opened) expect = a * in[e];
    else if (out.kinds[i] == EdgeChange::closed) expect = b + (1.0 - b) * in[e];
    else throw DomainError("surgery lists an untouched edge as changed");
    if (std::abs(out.output[e] - expect) > kMapTolerance)
      throw DomainError("surgery moves an edge by a map other than the two affine maps");
  }
  for (EdgeId e = 0; e < in.size(); ++e)
    if (!moved[e] && in[e] != out.output[e])
      throw DomainError("surgery changes an edge it does not report");
}

}  // namespace

LemmaReport verify_combi(const EventPredicate& A, const EventPredicate& B, const AffineMap& phi,
                         int s, double a, double b, const GeometryPtr& g,
                         const CombiOptions& options) {
  if (!(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0)) throw DomainError("combi needs a, b in (0,1)");
  if (s < 0 || options.trials == 0) throw DomainError("combi needs s >= 0 and trials > 0");
  const double floor = std::min(a, 1.0 - b);
  const double jac_bound = std::pow(floor, s);

  std::uint64_t in_a = 0;
  std::uint64_t in_b = 0;
  std::size_t jac_checked = 0;
  std::size_t jac_branch = 0;
  double jac_min = std::numeric_limits<double>::infinity();
  HypothesisResult h_into{"image_within_B", true, {}};
  HypothesisResult h_jac{"jacobian_at_least_bound", true, {}};
  std::vector<double> labels(g->edge_count());

  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    fill_labels(*g, options.seed, trial, labels);
    const LabelField omega(g, labels, options.seed, trial);
    in_b += B(omega);
    if (!A(omega)) continue;
    ++in_a;
    const auto out = phi(omega);
    if (!out) throw DomainError("surgery is undefined on a configuration of A");
    check_affine(omega, *out, s, a, b);
    if (h_into.holds && !B(out->output)) {
      h_into.holds = false;
      h_into.counterexample = "trial " + std::to_string(trial) + " maps outside B";
    }
    if (jac_checked + jac_branch >= options.jacobian_samples) continue;

    // Finite-difference Jacobian over the changed edges and a few untouched ones.
    std::vector<EdgeId> cols = out->changed;
    for (EdgeId e = 0; e < g->edge_count() && cols.size() < out->changed.size() + 4; ++e)
      if (std::find(out->changed.begin(), out->changed.end(), e) == out->changed.end())
        cols.push_back(e);
    const auto m = static_cast<Eigen::Index>(cols.size());
    Eigen::MatrixXd J(m, m);
    bool same_branch = true;
    for (Eigen::Index j = 0; j < m && same_branch; ++j) {
      const EdgeId e = cols[j];
      const double h = omega[e] + options.fd_step <= 1.0 ? options.fd_step : -options.fd_step;
      const std::array<EdgeId, 1> which{e};
      const std::array<double, 1> value{omega[e] + h};
      const auto moved = phi(omega.with_labels(which, value));
      if (!moved || moved->changed != out->changed || moved->kinds != out->kinds) {
        same_branch = false;
        break;
      }
      for (Eigen::Index i = 0; i < m; ++i)
        J(i, j) = (moved->output[cols[i]] - out->output[cols[i]]) / h;
    }
    if (!same_branch) {
      ++jac_branch;
      continue;
    }
    ++jac_checked;
    const double det = std::abs(J.fullPivLu().determinant());
    jac_min = std::min(jac_min, det);
    if (h_jac.holds && det < jac_bound * (1.0 - 1e-6)) {
      h_jac.holds = false;
      h_jac.counterexample = "trial " + std::to_string(trial) + " has Jacobian " + std::to_string(det);
    }
  }

  LemmaReport rep;
  rep.lemma = "combi";
  rep.hypotheses = {{"affine_primitives", true, {}}, h_into, h_jac};
  const double n = static_cast<double>(options.trials);
  const double pa = in_a / n;
  const double pb = in_b / n;
  const double C = std::pow(2.0 / floor, s);
  const double sigma = std::hypot(proportion_se(in_a, options.trials),
                                  C * proportion_se(in_b, options.trials));
  rep.lhs = pa;
  rep.rhs = C * pb;
  rep.margin_sigma = (rep.rhs - rep.lhs) / sigma;
  rep.inequality_holds = rep.lhs <= rep.rhs + 3.0 * sigma;
  const Interval ca = wilson_interval(in_a, options.trials);
  const Interval cb = wilson_interval(in_b, options.trials);
  rep.extra = {{"trials", options.trials},
               {"count_A", in_a},
               {"count_B", in_b},
               {"ci95_A", {ca.lo, ca.hi}},
               {"ci95_B", {cb.lo, cb.hi}},
               {"constant", C},
               {"jacobian_bound", jac_bound},
               {"jacobian_samples", jac_checked},
               {"jacobian_branch_changes", jac_branch}};
  if (jac_checked) rep.extra["jacobian_min"] = jac_min;
  return rep;
}

LemmaReport fkg_and_sqrt_check(std::span<const EventPredicate> events, double p,
                               const GeometryPtr& g, const FkgOptions& options) {
  if (events.empty()) throw DomainError("FKG check needs at least one event");
  if (options.batches < 2 || options.trials < options.batches)
    throw DomainError("FKG check needs at least two batches and one trial per batch");
  for (const auto& ev : events) {
    if (ev.monotonicity != Monotonicity::increasing)
      throw DomainError("event '" + ev.name + "' is not tagged increasing");
    if (!monotonicity_respected(ev, g, p, options.seed, options.mutation_trials))
      throw DomainError("event '" + ev.name + "' is tagged increasing but a mutation breaks it");
  }
  const std::size_t j = events.size();
  const std::size_t per_batch = options.trials / options.batches;
  const std::size_t trials = per_batch * options.batches;

  // Per batch: single, pair and union counts.
  std::vector<std::vector<double>> single(options.batches, std::vector<double>(j, 0.0));
  std::vector<std::vector<double>> pair(options.batches, std::vector<double>(j * j, 0.0));
  std::vector<double> any(options.batches, 0.0);
  std::vector<double> labels(g->edge_count());
  std::vector<std::uint8_t> hit(j);
  for (std::size_t t = 0; t < trials; ++t) {
    fill_labels(*g, options.seed, t, labels);
    std::vector<std::uint8_t> bits(labels.size());
    for (std::size_t e = 0; e < labels.size(); ++e) bits[e] = labels[e] < p;
    const BondConfig c(g, std::move(bits), p);
    const std::size_t batch = t / per_batch;
    bool some = false;
    for (std::size_t i = 0; i < j; ++i) {
      hit[i] = events[i](c);
      single[batch][i] += hit[i];
      some = some || hit[i];
    }
    for (std::size_t i = 0; i < j; ++i)
      for (std::size_t l = 0; l < j; ++l) pair[batch][i * j + l] += hit[i] && hit[l];
    any[batch] += some;
  }

  // A statistic evaluated on pooled frequencies, with its batch-means error.
  const auto assess = [&](auto stat) {
    std::vector<double> s1(j, 0.0), s2(j * j, 0.0);
    double s3 = 0.0;
    std::vector<double> per;
    for (std::size_t bt = 0; bt < options.batches; ++bt) {
      std::vector<double> f1(j), f2(j * j);
      for (std::size_t i = 0; i < j; ++i) f1[i] = single[bt][i] / per_batch;
      for (std::size_t i = 0; i < j * j; ++i) f2[i] = pair[bt][i] / per_batch;
      per.push_back(stat(f1, f2, any[bt] / per_batch));
      for (std::size_t i = 0; i < j; ++i) s1[i] += single[bt][i];
      for (std::size_t i = 0; i < j * j; ++i) s2[i] += pair[bt][i];
      s3 += any[bt];
    }
    for (auto& v : s1) v /= trials;
    for (auto& v : s2) v /= trials;
    const double value = stat(s1, s2, s3 / trials);
    double mean = 0.0;
    for (double v : per) mean += v;
    mean /= per.size();
    double var = 0.0;
    for (double v : per) var += (v - mean) * (v - mean);
    var /= per.size() - 1;
    return std::pair<double, double>{value, std::sqrt(var / per.size())};
  };

  LemmaReport rep;
  rep.lemma = "fkg_sqrt";
  rep.hypotheses.push_back({"monotonicity_tags", true, {}});
  rep.inequality_holds = true;
  rep.margin_sigma = std::numeric_limits<double>::infinity();
  nlohmann::json pairs = nlohmann::json::array();
  for (std::size_t i = 0; i < j; ++i) {
    for (std::size_t l = i; l < j; ++l) {
      const auto [cov, sd] = assess([&](const std::vector<double>& f1, const std::vector<double>& f2,
                                        double) { return f2[i * j + l] - f1[i] * f1[l]; });
      const bool ok = cov >= -3.0 * sd;
      rep.inequality_holds = rep.inequality_holds && ok;
      if (sd > 0.0) rep.margin_sigma = std::min(rep.margin_sigma, cov / sd);
      pairs.push_back({{"a", events[i].name}, {"b", events[l].name}, {"covariance", cov},
                       {"sigma", sd}, {"holds", ok}});
    }
  }
  const double root = 1.0 / static_cast<double>(j);
  const auto [gap, gap_sd] = assess([&](const std::vector<double>& f1, const std::vector<double>&,
                                        double u) {
    return *std::max_element(f1.begin(), f1.end()) - (1.0 - std::pow(1.0 - u, root));
  });
  const bool gap_ok = gap >= -3.0 * gap_sd;
  rep.inequality_holds = rep.inequality_holds && gap_ok;
  if (gap_sd > 0.0) rep.margin_sigma = std::min(rep.margin_sigma, gap / gap_sd);
  rep.lhs = gap;
  rep.rhs = 0.0;
  rep.extra = {{"trials", trials}, {"covariances", std::move(pairs)},
               {"sqrt_gap", gap}, {"sqrt_gap_sigma", gap_sd}, {"sqrt_holds", gap_ok}};
  return rep;
}

}  // namespace slabperc
