// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// `acceptance 3 7` runs only the listed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "oracles.hpp"
#include "slabperc/connectivity.hpp"
#include "slabperc/gluing.hpp"
#include "slabperc/harness.hpp"
#include "slabperc/invasion.hpp"
#include "slabperc/rng.hpp"

using namespace slabperc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ExecOptions exec_all() {
  return {std::max(1u, std::thread::hardware_concurrency()), false, 256};
}

// Shared by criteria 8 and 9.
std::optional<double> g_pc;

double pc_hat() {
  if (!g_pc) g_pc = estimate_pc(1, 64, 0.005, 10000, 2024, exec_all()).estimate;
  return *g_pc;
}

std::size_t edge_count(int k, int m, int n) {
  const std::size_t layers = k + 1;
  return layers * (static_cast<std::size_t>(m) * (n + 1) + static_cast<std::size_t>(n) * (m + 1)) +
         static_cast<std::size_t>(k) * (m + 1) * (n + 1);
}

Outcome crossing_oracle() {
  std::vector<std::array<int, 3>> shapes;
  for (int k = 0; k <= 2; ++k)
    for (int m = 1; m <= 6; ++m)
      for (int n = 0; n <= 6; ++n)
        if (edge_count(k, m, n) <= 22 && edge_count(k, m, n) >= 8) shapes.push_back({k, m, n});
  CounterRng rng(101);
  const std::uint64_t trials = 100000;
  int ok = 0;
  double worst = 0.0;
  std::ostringstream cases;
  for (int i = 0; i < 10; ++i) {
    const auto [k, m, n] = shapes[rng.below(shapes.size())];
    const double p = std::array<double, 3>{0.3, 0.5, 0.7}[rng.below(3)];
    const GeometryPtr g = make_geometry(k, {0, m, 0, n});
    const Region rect = Region::rectangle(k, g->window());
    const double exact = oracle::crossing_probability(g, rect, rect.left_face(), rect.right_face(), p);
    const auto mc = estimate_crossing(k, p, m, n, trials, 500 + i, exec_all());
    const double sigma = std::sqrt(exact * (1 - exact) / trials);
    const double z = sigma > 0 ? std::abs(mc.estimate - exact) / sigma : 0.0;
    worst = std::max(worst, z);
    ok += z <= 3.0;
    cases << fmt(" (k=%d,%dx%d,%zu edges,p=%.1f: exact %.4f mc %.4f)", k, m, n, g->edge_count(), p,
                 exact, mc.estimate);
  }
  return {ok == 10, fmt("%d/10 within 3 sigma, worst %.2f sigma;", ok, worst) + cases.str()};
}

Outcome min_path_oracle() {
  const GeometryPtr g = make_geometry(1, {0, 3, 0, 3});
  const Region rect = Region::rectangle(1, g->window());
  const auto A = rect.left_face();
  const auto B = rect.right_face();
  int equal = 0, nonempty = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const double p = 0.4 + 0.2 * (t % 3) / 2.0;
    const BondConfig c = sample_config(g, 202, t, p);
    const PathOrCircuit fast = min_open_path(c, rect, A, B);
    equal += fast.vertices == oracle::min_open_path(c, rect, A, B).vertices;
    nonempty += !fast.empty();
  }
  return {equal == 100, fmt("%d/100 equal (%d with a path)", equal, nonempty)};
}

Outcome winding_oracle() {
  int agree = 0, total = 0, enumerated = 0, enum_agree = 0, found = 0;
  for (int k = 0; k <= 1; ++k) {
    const GeometryPtr g = make_geometry(k, ball_box(0, 0, 3));
    const Region ann = Region::annulus(k, 0, 0, 1, 3);
    for (std::uint64_t t = 0; t < 1000; ++t) {
      const double p = std::array<double, 3>{0.3, 0.5, 0.7}[t % 3];
      const BondConfig c = sample_config(g, 303 + k, t, p);
      const bool fast = has_surrounding_circuit(c, ann);
      agree += fast == oracle::fundamental_cycle_winds(c, ann);
      const auto scan = oracle::scan_cycles(c, ann, false, 200000);
      if (scan.exhausted || scan.found) {
        ++enumerated;
        enum_agree += fast == scan.found;
      }
      found += fast;
      ++total;
    }
  }
  return {agree == total && enum_agree == enumerated,
          fmt("cycle-space oracle %d/%d; simple-cycle enumeration decided %d, agreed %d; %d with a "
              "surrounding circuit",
              agree, total, enumerated, enum_agree, found)};
}

Outcome mst_triangle() {
  const GeometryPtr g = make_geometry(1, {0, 2, 0, 2});
  int ok = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const LabelField omega = sample_labels(g, 404, t);
    const auto mst = kruskal_mst(omega).edges;
    bool all = mst == oracle::criterion_forest(omega);
    for (std::uint32_t v = 0; v < g->vertex_count() && all; ++v)
      all = invade(omega, g->vertex(v), StopExhaust{}).tree_edges() == mst;
    ok += all;
  }
  return {ok == 100, fmt("%d/100 fields: invasion tree from all 18 starts = Kruskal = criterion", ok)};
}

Outcome radius_three() {
  const int k = 1;
  const int s = 3;
  std::uint64_t instances = 0, failures = 0;
  int centres = 0;
  const Vertex steps[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  for (int h = 0; h <= k; ++h)
    for (int y = 0; y <= 3; ++y)
      for (int x = 0; x <= y; ++x) {
        const Vertex z{x, y, h};
        if (!in_quadrant_slab(k, z)) continue;
        ++centres;
        std::vector<Vertex> nb;
        for (const Vertex& d : steps) {
          const Vertex v{z.x + d.x, z.y + d.y, z.z + d.z};
          if (v.z >= 0 && v.z <= k && in_quadrant_slab(k, v)) nb.push_back(v);
        }
        const auto bd = ball_boundary_in_quadrant(k, s, z);
        DisjointPathsSolver solve(k, s, z);
        for (std::size_t a = 0; a < nb.size(); ++a)
          for (std::size_t b = a + 1; b < nb.size(); ++b)
            for (std::size_t c = b + 1; c < nb.size(); ++c)
              for (std::size_t i = 0; i < bd.size(); ++i)
                for (std::size_t j = 0; j < bd.size(); ++j)
                  for (std::size_t l = 0; l < bd.size(); ++l) {
                    if (i == j || j == l || i == l) continue;
                    ++instances;
                    failures += !solve({nb[a], nb[b], nb[c]}, {bd[i], bd[j], bd[l]});
                  }
      }
  return {failures == 0 && instances > 0,
          fmt("%llu instances over %d centres (x <= y <= 3, both layers), %llu without three "
              "disjoint paths",
              static_cast<unsigned long long>(instances), centres,
              static_cast<unsigned long long>(failures))};
}

Outcome combi0_suite() {
  const GeometryPtr g = make_geometry(0, {0, 2, 0, 1});
  std::vector<EdgeId> support(g->edge_count());
  for (EdgeId e = 0; e < support.size(); ++e) support[e] = e;
  const auto edge = [](const char* name, EdgeId e, bool open) {
    return EventPredicate{name, {e}, open ? Monotonicity::increasing : Monotonicity::decreasing,
                          [e, open](const BondConfig& c) { return c.is_open(e) == open; }, {}};
  };
  const auto open0 = edge("e open", 0, true);
  const auto closed0 = edge("e closed", 0, false);
  const ConfigMap identity = [](const BondConfig& c) { return std::vector<BondConfig>{c}; };
  const ConfigMap flip = [](const BondConfig& c) { return std::vector<BondConfig>{c.with_edge(0, true)}; };
  const ConfigMap two = [](const BondConfig& c) {
    const BondConfig o = c.with_edge(0, true);
    return std::vector<BondConfig>{o, o.with_edge(1, !o.is_open(1))};
  };
  const Region rect = Region::rectangle(0, g->window());
  const CrossingQuery h = CrossingQuery::horizontal(rect);
  const EventPredicate H{"H", support, Monotonicity::increasing,
                         [h](const BondConfig& c) { return crossing(c, h); }, {}};
  std::vector<EdgeId> row{*g->edge_between({0, 0, 0}, {1, 0, 0}), *g->edge_between({1, 0, 0}, {2, 0, 0})};
  const EventPredicate bottom{"bottom row open", row, Monotonicity::increasing,
                              [row](const BondConfig& c) { return c.is_open(row[0]) && c.is_open(row[1]); }, {}};
  const ConfigMap open_row = [row](const BondConfig& c) {
    return std::vector<BondConfig>{c.with_edge(row[0], true).with_edge(row[1], true)};
  };
  struct Case {
    const char* name;
    LemmaReport rep;
    bool expect_valid;
  };
  const Rational half(1, 2);
  std::vector<Case> cases{
      {"identity", verify_combi0(open0, open0, identity, 0, 1, half, g, support), true},
      {"flip", verify_combi0(closed0, open0, flip, 1, 1, Rational(1, 3), g, support), true},
      {"two images", verify_combi0(closed0, open0, two, 2, 2, half, g, support), true},
      {"open bottom row", verify_combi0(H, bottom, open_row, 2, 1, Rational(2, 5), g, support), true},
      {"negative control", verify_combi0(closed0, bottom, [g, row](const BondConfig&) {
         return std::vector<BondConfig>{BondConfig::from_open_edges(g, row)};
       }, 1, 1, half, g, support), false}};
  bool pass = true;
  std::string detail;
  for (const auto& c : cases) {
    const bool valid = c.rep.hypotheses_hold() && c.rep.inequality_holds &&
                       c.rep.extra["denominators_divide"].get<bool>();
    pass = pass && valid == c.expect_valid;
    detail += fmt("%s%s: %s <= %s %s", detail.empty() ? "" : "; ", c.name, c.rep.lhs_exact->c_str(),
                  c.rep.rhs_exact->c_str(), valid ? "holds" : "flagged");
  }
  return {pass, detail};
}

Outcome glue_contract() {
  const GlueContext base{2, 6, {}, 0.3, {}};
  std::uint64_t stream = 0;
  int checked = 0, violations = 0, unsampled = 0;
  std::size_t max_changed = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto inst = sample_glue_domain(1, base, 707, stream, 200, &stream);
    if (!inst) {
      ++unsampled;
      continue;
    }
    const SurgeryReport rep = glue_invasion(inst->omega, inst->ctx);
    ++checked;
    max_changed = std::max(max_changed, rep.changed.size());
    const bool ok = rep.after.target() && rep.circuit_after == rep.circuit_before &&
                    rep.changed.size() <= rep.bound && rep.untouched_identical() &&
                    rep.reconstructed && rep.reconstructed->z_prime == rep.forward.z_prime;
    violations += !ok;
  }
  return {checked == 1000 && violations == 0,
          fmt("%d domain samples from %llu candidates (%d unsampled), %d violations, at most %zu changed edges "
              "(bound 13)",
              checked, static_cast<unsigned long long>(stream), unsampled, violations, max_changed)};
}

Outcome box_crossing() {
  const double pc = pc_hat();
  bool pass = true;
  std::string detail = fmt("p_c estimate %.4f;", pc);
  for (int n : {8, 16, 32}) {
    for (auto [m, h] : {std::pair{n, n}, std::pair{2 * n, n}, std::pair{n, 2 * n}}) {
      const auto r = estimate_crossing(1, pc, m, h, 10000, 808, exec_all());
      pass = pass && r.estimate >= 0.05 && r.estimate <= 0.95;
      detail += fmt(" f(%d,%d)=%.3f", m, h, r.estimate);
    }
  }
  return {pass, detail};
}

Outcome one_arm() {
  const double pc = pc_hat();
  std::vector<int> radii;
  for (int n = 4; n <= 64; ++n) radii.push_back(n);
  const auto crit = one_arm_suite(1, pc, 2, radii, 10000, 909, exec_all());
  const auto sub = one_arm_suite(1, pc - 0.1, 2, radii, 10000, 910, exec_all());
  const bool delta = crit.power_law.ci95.lo > 0.0;
  const bool expo = sub.prefers_exponential();
  return {delta && expo,
          fmt("at p=%.4f delta=%.3f, CI [%.3f, %.3f]; at p=%.4f chi2 exponential %.1f vs power %.1f "
              "(%zu radii dropped)",
              pc, crit.power_law.estimate, crit.power_law.ci95.lo, crit.power_law.ci95.hi, pc - 0.1,
              sub.exponential.params["chi2"].get<double>(), sub.power_law.params["chi2"].get<double>(),
              sub.dropped.size())};
}

Outcome kesten() {
  bool pass = true;
  std::string detail;
  for (int k : {0, 1})
    for (double p : {0.4, 0.5}) {
      const auto r = kesten_inequality_check(k, p, 8, 100000, 1010, exec_all());
      pass = pass && r.holds;
      detail += fmt("%s(k=%d,p=%.1f: %.4f <= %.4f)", detail.empty() ? "" : " ", k, p, r.lhs.estimate,
                    r.bound);
    }
  return {pass, detail};
}

Outcome single_tree() {
  const std::vector<int> Ns{4, 8, 16, 32, 64};
  const auto recs = single_tree_suite(1, {4, 0, 0}, Ns, 1000, 1111, exec_all());
  bool monotone = true;
  std::string detail;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (i) monotone = monotone && *recs[i].successes >= *recs[i - 1].successes;
    detail += fmt(" N=%d:%.3f", Ns[i], recs[i].estimate);
  }
  return {monotone && recs.back().estimate >= 0.9,
          std::string(monotone ? "non-decreasing;" : "NOT monotone;") + detail};
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "slabperc_acceptance";
  fs::create_directories(dir);
  const std::vector<nlohmann::json> plans{
      {{"experiment", "crossing"}, {"fixed", {{"k", 1}, {"m", 12}}},
       {"grid", {{"p", {0.3, 0.4, 0.5}}, {"n", {6, 12}}}}, {"trials", 2000}, {"seed", 12}},
      {{"experiment", "box-crossing"}, {"fixed", {{"k", 1}, {"p", 0.37}, {"n", {4, 8}}}},
       {"grid", {{"rho", {0.5, 2.0}}}}, {"trials", 1000}, {"seed", 12}},
      {{"experiment", "one-arm"}, {"fixed", {{"k", 1}, {"m", 1}, {"radii", {2, 4, 6, 8}}}},
       {"grid", {{"p", {0.35, 0.4}}}}, {"trials", 1000}, {"seed", 12}},
      {{"experiment", "circuit"}, {"fixed", {{"k", 1}, {"n", {2, 3}}}}, {"grid", {{"p", {0.4}}}},
       {"trials", 500}, {"seed", 12}},
      {{"experiment", "single-tree"}, {"fixed", {{"k", 1}, {"x", {2, 0, 0}}, {"N", {4, 8}}}},
       {"grid", nlohmann::json::object()}, {"trials", 300}, {"seed", 12}}};
  int same = 0;
  std::size_t lines = 0;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    std::string text[2];
    for (int w = 0; w < 2; ++w) {
      ExperimentPlan plan = ExperimentPlan::from_json(plans[i]);
      plan.sink = (dir / fmt("plan%zu_w%d.jsonl", i, w)).string();
      fs::remove(plan.sink);
      run_plan(plan, {w == 0 ? 1u : 8u, false, w == 0 ? 256u : 13u});
      std::ifstream in(plan.sink, std::ios::binary);
      std::ostringstream s;
      s << in.rdbuf();
      text[w] = s.str();
    }
    same += !text[0].empty() && text[0] == text[1];
    lines += std::count(text[0].begin(), text[0].end(), '\n');
  }
  return {same == static_cast<int>(plans.size()),
          fmt("%d/%zu plans byte-identical with 1 and 8 workers (%zu records)", same, plans.size(), lines)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"crossing probability: exact enumeration vs Monte Carlo", crossing_oracle},
      {"minimal open path vs brute force", min_path_oracle},
      {"surrounding-circuit detection vs cycle oracles", winding_oracle},
      {"invasion tree = Kruskal = edge criterion", mst_triangle},
      {"three disjoint paths at radius 3", radius_three},
      {"discrete counting lemma with negative control", combi0_suite},
      {"gluing map contract", glue_contract},
      {"box crossings at the estimated critical point", box_crossing},
      {"one-arm decay", one_arm},
      {"squared-crossing inequality", kesten},
      {"single-tree trend", single_tree},
      {"determinism across worker counts", determinism}};
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !out.pass;
    std::printf("%s %2d %s [%.1f s]: %s\n", out.pass ? "PASS" : "FAIL", id, criteria[i].first, secs,
                out.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
