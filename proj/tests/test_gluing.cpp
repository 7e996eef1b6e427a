#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "slabperc/connectivity.hpp"
#include "slabperc/gluing.hpp"

using namespace slabperc;

namespace {

EventPredicate edge_event(const std::string& name, EdgeId e, bool open) {
  EventPredicate ev;
  ev.name = name;
  ev.support = {e};
  ev.monotonicity = open ? Monotonicity::increasing : Monotonicity::decreasing;
  ev.on_config = [e, open](const BondConfig& c) { return c.is_open(e) == open; };
  return ev;
}

EventPredicate crossing_event(const std::string& name, const GeometryPtr& g, const Region& r,
                              std::vector<Vertex> from, std::vector<Vertex> to) {
  EventPredicate ev;
  ev.name = name;
  const auto mask = region_mask(*g, r);
  for (EdgeId e = 0; e < g->edge_count(); ++e)
    if (mask[g->edge(e).u] && mask[g->edge(e).v]) ev.support.push_back(e);
  ev.monotonicity = Monotonicity::increasing;
  const CrossingQuery q{r, std::move(from), std::move(to)};
  ev.on_config = [q](const BondConfig& c) { return crossing(c, q); };
  return ev;
}

std::vector<EdgeId> all_edges(const GeometryPtr& g) {
  std::vector<EdgeId> out(g->edge_count());
  for (EdgeId e = 0; e < out.size(); ++e) out[e] = e;
  return out;
}

}  // namespace

TEST_CASE("plus cylinder size") {
  const SlabGeometry g1(1, ball_box(0, 0, 3));
  CHECK(plus_cylinder_edges(g1, {0, 0, 0}).size() == 13);
  const SlabGeometry g0(0, ball_box(0, 0, 3));
  CHECK(plus_cylinder_edges(g0, {1, 1, 0}).size() == 4);
  const SlabGeometry g2(2, ball_box(0, 0, 3));
  CHECK(plus_cylinder_edges(g2, {0, 0, 1}).size() == 22);
  // Clipped by the window at a corner.
  CHECK(plus_cylinder_edges(g1, {3, 3, 0}).size() == 7);
}

TEST_CASE("gluing on planted instances") {
  const GlueContext base{2, 6, {}, 0.3, {}};
  std::uint64_t stream = 0;
  int done = 0;
  while (done < 25) {
    auto inst = sample_glue_domain(1, base, 77, stream, 200, &stream);
    REQUIRE(inst);
    const SurgeryReport rep = glue_invasion(inst->omega, inst->ctx);
    CHECK(rep.before.domain());
    CHECK_FALSE(rep.before.origin_holds);
    CHECK(rep.after.target());
    CHECK(rep.circuit_after == rep.circuit_before);
    CHECK(rep.circuit_clusters_after == rep.circuit_clusters_before);
    CHECK(rep.untouched_identical());
    CHECK(rep.changed.size() <= rep.bound);
    CHECK(rep.bound <= 13);
    const double b = inst->ctx.closing_level();
    for (std::size_t i = 0; i < rep.changed.size(); ++i) {
      const EdgeId e = rep.changed[i];
      if (rep.kinds[i] == EdgeChange::opened)
        CHECK(rep.output[e] == doctest::Approx(0.3 * rep.input[e]));
      else
        CHECK(rep.output[e] == doctest::Approx(b + (1 - b) * rep.input[e]));
    }
    REQUIRE(rep.reconstructed);
    CHECK(rep.reconstructed->z_prime == rep.forward.z_prime);
    CHECK(rep.reconstructed->changed == rep.forward.changed);
    const LabelField back = invert_glue(rep.output, *rep.reconstructed, inst->ctx);
    for (EdgeId e = 0; e < back.size(); ++e) CHECK(back[e] == doctest::Approx(rep.input[e]).epsilon(1e-12));
    const auto j = rep.to_json();
    CHECK(j["circuit_preserved"] == true);
    CHECK(j["after"]["target"] == true);
    ++done;
  }
}

TEST_CASE("gluing preconditions") {
  const GlueContext ctx{2, 6, {1, 0, 0}, 0.3, {}};
  const LabelField uniform = sample_labels(make_geometry(1, ball_box(0, 0, 6)), 5, 0);
  CHECK_THROWS_AS(glue_invasion(uniform, ctx), PreconditionError);
  GlueContext bad = ctx;
  bad.m = 4;
  CHECK_THROWS_AS(evaluate_glue_events(uniform, bad), DomainError);
  bad = ctx;
  bad.b = 0.2;
  CHECK_THROWS_AS(evaluate_glue_events(uniform, bad), DomainError);
  CHECK_THROWS_AS(plant_glue_candidate(0, ctx, 1, 0), DomainError);
  const LabelField small = sample_labels(make_geometry(1, ball_box(0, 0, 5)), 5, 0);
  CHECK_THROWS_AS(evaluate_glue_events(small, ctx), DomainError);
  CHECK(ctx.closing_level() == doctest::Approx(0.65));
}

TEST_CASE("discrete counting lemma: identity, single flip and a two-image map") {
  const GeometryPtr g = make_geometry(0, {0, 2, 0, 1});
  const std::vector<EdgeId> support = all_edges(g);
  REQUIRE(support.size() == 7);
  const EdgeId e = 0;
  const EdgeId f = 1;
  const Rational half(1, 2);

  const auto open_e = edge_event("e open", e, true);
  const auto closed_e = edge_event("e closed", e, false);
  const ConfigMap identity = [](const BondConfig& c) { return std::vector<BondConfig>{c}; };
  const LemmaReport r0 = verify_combi0(open_e, open_e, identity, 0, 1, half, g, support);
  CHECK(r0.hypotheses_hold());
  CHECK(r0.inequality_holds);
  CHECK(*r0.lhs_exact == "1/2");
  CHECK(r0.extra["denominators_divide"] == true);

  const ConfigMap flip = [e](const BondConfig& c) { return std::vector<BondConfig>{c.with_edge(e, true)}; };
  const LemmaReport r1 = verify_combi0(closed_e, open_e, flip, 1, 1, Rational(1, 3), g, support);
  CHECK(r1.hypotheses_hold());
  CHECK(r1.inequality_holds);
  CHECK(*r1.lhs_exact == "2/3");
  CHECK(*r1.rhs_exact == "2");

  const ConfigMap two = [e, f](const BondConfig& c) {
    const BondConfig o = c.with_edge(e, true);
    return std::vector<BondConfig>{o, o.with_edge(f, !o.is_open(f))};
  };
  const LemmaReport r2 = verify_combi0(closed_e, open_e, two, 2, 2, half, g, support);
  CHECK(r2.hypotheses_hold());
  CHECK(r2.inequality_holds);
  CHECK(r2.rhs == doctest::Approx(0.5 * 16 * 0.5));
  // Too small an s breaks the fiber hypothesis.
  const LemmaReport r3 = verify_combi0(closed_e, open_e, two, 1, 2, half, g, support);
  CHECK_FALSE(r3.hypotheses_hold());
  CHECK(r3.hypotheses[2].counterexample);
}

TEST_CASE("discrete counting lemma with a crossing event") {
  const GeometryPtr g = make_geometry(0, {0, 2, 0, 1});
  const Region rect = Region::rectangle(0, g->window());
  const auto A = crossing_event("H", g, rect, rect.left_face(), rect.right_face());
  std::vector<EdgeId> bottom;
  for (int x = 0; x < 2; ++x) bottom.push_back(*g->edge_between({x, 0, 0}, {x + 1, 0, 0}));
  EventPredicate B;
  B.name = "bottom row open";
  B.support = bottom;
  B.on_config = [bottom](const BondConfig& c) {
    return std::all_of(bottom.begin(), bottom.end(), [&](EdgeId e) { return c.is_open(e); });
  };
  // Open the bottom row and close everything else: every crossing maps to
  // the same configuration, so the fiber spans the whole support.
  const ConfigMap collapse = [g, bottom](const BondConfig&) {
    return std::vector<BondConfig>{BondConfig::from_open_edges(g, bottom)};
  };
  const LemmaReport bad = verify_combi0(A, B, collapse, 2, 1, Rational(1, 2), g, all_edges(g));
  CHECK_FALSE(bad.hypotheses_hold());
  // Opening the bottom row keeps the rest: fibers differ on at most two edges.
  const ConfigMap open_row = [bottom](const BondConfig& c) {
    BondConfig o = c;
    for (EdgeId e : bottom) o = o.with_edge(e, true);
    return std::vector<BondConfig>{o};
  };
  const LemmaReport good = verify_combi0(A, B, open_row, 2, 1, Rational(1, 2), g, all_edges(g));
  CHECK(good.hypotheses_hold());
  CHECK(good.inequality_holds);
  CHECK(good.extra["denominators_divide"] == true);
  CHECK_THROWS_AS(verify_combi0(A, B, open_row, -1, 1, Rational(1, 2), g, all_edges(g)), DomainError);
  CHECK_THROWS_AS(verify_combi0(A, B, open_row, 2, 1, Rational(1), g, all_edges(g)), DomainError);
}

TEST_CASE("discrete counting lemma: a false inequality is reported") {
  const GeometryPtr g = make_geometry(0, {0, 2, 0, 1});
  const auto support = all_edges(g);
  EventPredicate all{"always", support, Monotonicity::neither,
                     [](const BondConfig&) { return true; }, {}};
  EventPredicate full{"all open", support, Monotonicity::increasing,
                      [](const BondConfig& c) { return c.open_count() == c.size(); }, {}};
  const ConfigMap to_full = [g](const BondConfig&) {
    return std::vector<BondConfig>{BondConfig::all(g, true)};
  };
  const LemmaReport r = verify_combi0(all, full, to_full, 1, 1, Rational(1, 2), g, support);
  CHECK_FALSE(r.hypotheses_hold());
  CHECK_FALSE(r.inequality_holds);
  CHECK(*r.lhs_exact == "1");
  CHECK(*r.rhs_exact == "1/32");
}

TEST_CASE("affine counting lemma") {
  const GeometryPtr g = make_geometry(0, {0, 2, 0, 1});
  const EdgeId e = 2;
  const double a = 0.6;
  const double b = 0.7;
  EventPredicate high{"label >= 1/2", {e}, Monotonicity::decreasing, {},
                      [e](const LabelField& w) { return w[e] >= 0.5; }};
  EventPredicate low{"label < 0.6", {e}, Monotonicity::increasing, {},
                     [e](const LabelField& w) { return w[e] < 0.6; }};
  const AffineMap open = [e, a](const LabelField& w) -> std::optional<AffineSurgery> {
    const std::array<EdgeId, 1> which{e};
    return AffineSurgery{affine_open(w, which, a), {e}, {EdgeChange::opened}};
  };
  CombiOptions opt;
  opt.trials = 20000;
  const LemmaReport r = verify_combi(high, low, open, 1, a, b, g, opt);
  CHECK(r.hypotheses_hold());
  CHECK(r.inequality_holds);
  CHECK(r.lhs == doctest::Approx(0.5).epsilon(0.03));
  CHECK(r.extra["jacobian_min"].get<double>() == doctest::Approx(a).epsilon(1e-4));

  EventPredicate tiny{"label < 0.3", {e}, Monotonicity::increasing, {},
                      [e](const LabelField& w) { return w[e] < 0.3; }};
  EventPredicate top{"label >= 0.7", {e}, Monotonicity::decreasing, {},
                     [e](const LabelField& w) { return w[e] >= 0.7; }};
  const AffineMap close = [e, b](const LabelField& w) -> std::optional<AffineSurgery> {
    const std::array<EdgeId, 1> which{e};
    return AffineSurgery{affine_close(w, which, b), {e}, {EdgeChange::closed}};
  };
  const LemmaReport rc = verify_combi(tiny, top, close, 1, a, b, g, opt);
  CHECK(rc.hypotheses_hold());
  CHECK(rc.inequality_holds);

  const AffineMap identity = [](const LabelField& w) -> std::optional<AffineSurgery> {
    return AffineSurgery{w, {}, {}};
  };
  const LemmaReport r0 = verify_combi(high, high, identity, 0, a, b, g, opt);
  CHECK(r0.hypotheses_hold());
  CHECK(r0.lhs == r0.rhs);
  CHECK(r0.inequality_holds);

  const AffineMap rogue = [e](const LabelField& w) -> std::optional<AffineSurgery> {
    const std::array<EdgeId, 1> which{e};
    const std::array<double, 1> value{0.5};
    return AffineSurgery{w.with_labels(which, value), {e}, {EdgeChange::opened}};
  };
  CHECK_THROWS_AS(verify_combi(high, low, rogue, 1, a, b, g, opt), DomainError);
  CHECK_THROWS_AS(verify_combi(high, low, open, 0, a, b, g, opt), DomainError);
  CHECK_THROWS_AS(verify_combi(high, low, open, 1, 1.5, b, g, opt), DomainError);
}

TEST_CASE("Harris-FKG and the square-root trick") {
  const GeometryPtr g = make_geometry(1, {-1, 5, -1, 5});
  const Region box = Region::rectangle(1, {0, 4, 0, 4});
  const auto H = crossing_event("H", g, box, box.left_face(), box.right_face());
  const auto V = crossing_event("V", g, box, box.bottom_face(), box.top_face());
  FkgOptions opt;
  opt.trials = 20000;

  const std::vector<EventPredicate> same{H, H};
  const LemmaReport rs = fkg_and_sqrt_check(same, 0.5, g, opt);
  CHECK(rs.inequality_holds);

  const std::vector<EventPredicate> hv{H, V};
  const LemmaReport r = fkg_and_sqrt_check(hv, 0.5, g, opt);
  CHECK(r.hypotheses_hold());
  CHECK(r.inequality_holds);
  CHECK(r.extra["covariances"].size() == 3);
  CHECK(r.extra["covariances"][1]["covariance"].get<double>() > 0.0);

  // Mirror-image crossings of two overlapping boxes.
  const Region left = Region::rectangle(1, {0, 3, 0, 4});
  const Region right = Region::rectangle(1, {1, 4, 0, 4});
  const auto L = crossing_event("left", g, left, left.left_face(), left.right_face());
  const auto R = crossing_event("right", g, right, right.right_face(), right.left_face());
  const std::vector<EventPredicate> mirror{L, R};
  const LemmaReport rm = fkg_and_sqrt_check(mirror, 0.35, g, opt);
  CHECK(rm.inequality_holds);
  CHECK(rm.extra["sqrt_holds"] == true);

  EventPredicate wrong = H;
  wrong.name = "no H";
  wrong.on_config = [H](const BondConfig& c) { return !H(c); };
  const std::vector<EventPredicate> bad{H, wrong};
  CHECK_THROWS_AS(fkg_and_sqrt_check(bad, 0.5, g, opt), DomainError);
  EventPredicate untagged = V;
  untagged.monotonicity = Monotonicity::neither;
  const std::vector<EventPredicate> untag{untagged};
  CHECK_THROWS_AS(fkg_and_sqrt_check(untag, 0.5, g, opt), DomainError);
}

TEST_CASE("support and monotonicity probes") {
  const GeometryPtr g = make_geometry(1, {-1, 5, -1, 5});
  const Region box = Region::rectangle(1, {0, 4, 0, 4});
  const auto H = crossing_event("H", g, box, box.left_face(), box.right_face());
  CHECK(support_respected(H, g, 0.5, 1, 500));
  CHECK(monotonicity_respected(H, g, 0.5, 1, 500));
  EventPredicate narrow = H;
  narrow.support.resize(3);
  CHECK_FALSE(support_respected(narrow, g, 0.5, 1, 2000));
  EventPredicate flipped = H;
  flipped.monotonicity = Monotonicity::decreasing;
  CHECK_FALSE(monotonicity_respected(flipped, g, 0.5, 1, 2000));
}
