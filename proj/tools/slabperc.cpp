// Command-line front end: sampling, Monte Carlo experiments, invasions,
// spanning forests, verification suites and plots.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "slabperc/connectivity.hpp"
#include "slabperc/gluing.hpp"
#include "slabperc/harness.hpp"
#include "slabperc/invasion.hpp"
#include "slabperc/plot.hpp"

using namespace slabperc;
using nlohmann::json;

namespace {

struct Common {
  int k = 1;
  double p = 0.5;
  int m = 8;
  std::vector<int> n{8};
  std::vector<double> rho{1.0};
  std::vector<int> radii;
  double tol = 0.005;
  std::vector<int> x{4, 0, 0};
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  unsigned workers = 1;
  bool timing = false;
  std::string out;
  std::string format = "jsonl";
  std::string config;

  ExecOptions exec() const { return {workers, timing, 256}; }
};

std::string env_name(const std::string& flag) {
  std::string s = "SLABPERC_";
  for (char c : flag) s += c == '-' ? '_' : static_cast<char>(std::toupper(c));
  return s;
}

template <class T>
CLI::Option* flag(CLI::App* app, const std::string& name, T& target, const std::string& help) {
  return app->add_option("--" + name, target, help)->envname(env_name(name))->capture_default_str();
}

void add_run_flags(CLI::App* app, Common& c) {
  flag(app, "trials", c.trials, "Monte Carlo trials");
  flag(app, "seed", c.seed, "master seed");
  flag(app, "workers", c.workers, "worker threads");
  flag(app, "out", c.out, "output file (default stdout)");
  flag(app, "format", c.format, "jsonl or csv")->check(CLI::IsMember({"jsonl", "csv"}));
  flag(app, "config", c.config, "JSON plan file; runs the plan instead of a single cell");
  app->add_flag("--timing", c.timing, "record wall time (breaks byte reproducibility)")
      ->envname("SLABPERC_TIMING");
}

/// stdout unless a path is given.
class Sink {
 public:
  explicit Sink(const std::string& path, std::ios::openmode mode = std::ios::out) {
    if (path.empty()) return;
    file_.open(path, mode);
    if (!file_) throw std::runtime_error("cannot open " + path + " for writing");
  }
  std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void emit(const std::vector<EstimateRecord>& recs, const Common& c) {
  Sink sink(c.out);
  std::ostream& out = sink.get();
  if (c.format == "csv") {
    out << "experiment,params,estimate,ci_lo,ci_hi,trials,successes,seed,version,wall_ms\n";
    out.precision(17);
    for (const auto& r : recs) {
      std::string params = r.params.dump();
      std::string quoted = "\"";
      for (char ch : params) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      quoted += '"';
      out << r.experiment << ',' << quoted << ',' << r.estimate << ',' << r.ci95.lo << ','
          << r.ci95.hi << ',' << r.trials << ',' << (r.successes ? std::to_string(*r.successes) : "")
          << ',' << r.seed << ',' << r.version << ','
          << (r.wall_ms ? std::to_string(*r.wall_ms) : "") << '\n';
    }
    return;
  }
  for (const auto& r : recs) out << r.to_json().dump() << '\n';
}

/// --config: run a plan, defaulting its experiment and sink from the command line.
bool run_config(const std::string& experiment, const Common& c) {
  if (c.config.empty()) return false;
  std::ifstream in(c.config);
  if (!in) throw std::runtime_error("cannot read plan " + c.config);
  json j = json::parse(in);
  if (!j.contains("experiment")) j["experiment"] = experiment;
  ExperimentPlan plan = ExperimentPlan::from_json(j);
  if (!c.out.empty()) plan.sink = c.out;
  if (plan.sink.empty()) throw DomainError("a plan needs a sink: set \"sink\" or --out");
  const PlanResult r = run_plan(plan, c.exec());
  std::cerr << "plan " << plan.experiment << ": " << r.cells_run << " cells run, "
            << r.cells_skipped << " skipped, " << r.trials_run << " trials -> " << plan.sink << '\n';
  return true;
}

Vertex to_vertex(const std::vector<int>& v) {
  if (v.size() != 3) throw DomainError("a vertex needs three coordinates x,y,z");
  return {v[0], v[1], v[2]};
}

std::vector<Vertex> vertices_of(const json& j) {
  std::vector<Vertex> out;
  for (const auto& v : j) out.push_back(to_vertex(v.get<std::vector<int>>()));
  return out;
}

LabelField read_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read label dump " + path);
  return read_label_dump(in);
}

Region region_of(const json& q, int k) {
  const std::string kind = q.at("kind");
  if (kind == "rectangle") {
    const auto b = q.at("box").get<std::vector<int>>();
    return Region::rectangle(k, {b.at(0), b.at(1), b.at(2), b.at(3)});
  }
  if (kind == "annulus") {
    const auto c = q.at("center").get<std::vector<int>>();
    return Region::annulus(k, c.at(0), c.at(1), q.at("inner"), q.at("outer"));
  }
  throw DomainError("region kind must be rectangle or annulus");
}

/// Query JSON: {"p": .., "query": "min_open_path" | "crossing" | "min_circuit",
/// "region": {"kind": "rectangle", "box": [x0,x1,y0,y1]} or
/// {"kind": "annulus", "center": [cx,cy], "inner": n, "outer": m},
/// "source"/"target": [[x,y,z], ...] (rectangle faces by default)}.
json answer_query(const LabelField& omega, const json& q) {
  const int k = omega.geometry().thickness();
  const BondConfig c = threshold(omega, q.at("p").get<double>());
  const Region r = region_of(q.at("region"), k);
  const std::string what = q.at("query");
  if (what == "min_circuit") {
    const PathOrCircuit circ = min_surrounding_circuit(c, r);
    return {{"query", what}, {"found", !circ.empty()}, {"path", path_to_json(circ)}};
  }
  const auto source = q.contains("source") ? vertices_of(q["source"]) : r.left_face();
  const auto target = q.contains("target") ? vertices_of(q["target"]) : r.right_face();
  if (what == "crossing")
    return {{"query", what}, {"crossing", crossing(c, CrossingQuery{r, source, target})}};
  if (what == "min_open_path") {
    const PathOrCircuit path = min_open_path(c, r, source, target);
    return {{"query", what}, {"found", !path.empty()}, {"path", path_to_json(path)}};
  }
  throw DomainError("query must be min_open_path, crossing or min_circuit");
}

/// Built-in checks: gluing contract on planted instances, a discrete
/// counting-lemma instance with its negative control, Harris-FKG on crossing
/// events, and invasion tree = Kruskal tree on random fields.
int verify_suites(const Common& c, int glue_samples, std::ostream& out) {
  int failures = 0;
  const auto report = [&](const std::string& name, bool ok, json detail) {
    failures += !ok;
    out << json{{"check", name}, {"pass", ok}, {"detail", std::move(detail)}}.dump() << '\n';
  };

  {
    const GlueContext base{2, 6, {}, 0.3, {}};
    std::uint64_t stream = 0;
    int ok = 0, bad = 0, missing = 0;
    for (int i = 0; i < glue_samples; ++i) {
      const auto inst = sample_glue_domain(1, base, c.seed, stream, 100, &stream);
      if (!inst) {
        ++missing;
        continue;
      }
      const SurgeryReport rep = glue_invasion(inst->omega, inst->ctx);
      const bool good = rep.after.target() && rep.circuit_after == rep.circuit_before &&
                        rep.changed.size() <= rep.bound && rep.untouched_identical() &&
                        rep.reconstructed && rep.reconstructed->z_prime == rep.forward.z_prime;
      (good ? ok : bad) += 1;
    }
    report("glue_invasion", bad == 0 && missing == 0,
           {{"instances", ok + bad}, {"violations", bad}, {"unsampled", missing}});
  }
  {
    const GeometryPtr g = make_geometry(0, {0, 2, 0, 1});
    std::vector<EdgeId> support(g->edge_count());
    for (EdgeId e = 0; e < support.size(); ++e) support[e] = e;
    const EventPredicate closed{"e closed", {0}, Monotonicity::decreasing,
                                [](const BondConfig& b) { return !b.is_open(0); }, {}};
    const EventPredicate open{"e open", {0}, Monotonicity::increasing,
                              [](const BondConfig& b) { return b.is_open(0); }, {}};
    const ConfigMap flip = [](const BondConfig& b) { return std::vector<BondConfig>{b.with_edge(0, true)}; };
    const LemmaReport good = verify_combi0(closed, open, flip, 1, 1, Rational(1, 2), g, support);
    report("combi0", good.hypotheses_hold() && good.inequality_holds, good.to_json());
    const ConfigMap collapse = [g](const BondConfig&) {
      return std::vector<BondConfig>{BondConfig::all(g, true)};
    };
    const EventPredicate all{"all open", support, Monotonicity::increasing,
                             [](const BondConfig& b) { return b.open_count() == b.size(); }, {}};
    const LemmaReport neg = verify_combi0(closed, all, collapse, 1, 1, Rational(1, 2), g, support);
    report("combi0_negative_control_flagged", !neg.hypotheses_hold(), neg.to_json());
  }
  {
    const GeometryPtr g = make_geometry(c.k, {0, 4, 0, 4});
    const Region box = Region::rectangle(c.k, g->window());
    const auto make = [&](const std::string& name, std::vector<Vertex> a, std::vector<Vertex> b) {
      EventPredicate ev;
      ev.name = name;
      for (EdgeId e = 0; e < g->edge_count(); ++e) ev.support.push_back(e);
      ev.monotonicity = Monotonicity::increasing;
      const CrossingQuery q{box, std::move(a), std::move(b)};
      ev.on_config = [q](const BondConfig& cfg) { return crossing(cfg, q); };
      return ev;
    };
    const std::vector<EventPredicate> events{make("H", box.left_face(), box.right_face()),
                                             make("V", box.bottom_face(), box.top_face())};
    FkgOptions opt;
    opt.trials = std::max<std::uint64_t>(c.trials, 1000);
    opt.seed = c.seed;
    const LemmaReport r = fkg_and_sqrt_check(events, c.p, g, opt);
    report("fkg_sqrt", r.inequality_holds, r.to_json());
  }
  {
    const GeometryPtr g = make_geometry(1, {0, 2, 0, 2});
    int bad = 0;
    for (std::uint64_t t = 0; t < 50; ++t) {
      const LabelField omega = sample_labels(g, c.seed, t);
      const auto mst = kruskal_mst(omega).edges;
      for (std::uint32_t v = 0; v < g->vertex_count(); ++v)
        bad += invade(omega, g->vertex(v), StopExhaust{}).tree_edges() != mst;
    }
    report("invasion_tree_equals_kruskal", bad == 0, {{"fields", 50}, {"mismatches", bad}});
  }
  return failures;
}

std::vector<EstimateRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read records " + path);
  std::vector<EstimateRecord> out;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(EstimateRecord::from_json(json::parse(line)));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bond percolation on slabs: experiments and checks"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Common c;

  auto* sample = app.add_subcommand("sample", "write a label field (binary dump) or its open edges");
  flag(sample, "k", c.k, "slab thickness");
  flag(sample, "m", c.m, "window [0,m] x [0,n]");
  flag(sample, "n", c.n, "window height")->expected(1);
  flag(sample, "seed", c.seed, "master seed");
  flag(sample, "stream", c.stream, "stream id");
  flag(sample, "out", c.out, "output file");
  std::optional<double> sample_p;
  sample->add_option("--p", sample_p, "write the open edges at density p as JSON instead")
      ->envname("SLABPERC_P");

  auto* cross = app.add_subcommand("crossing", "f_p(m,n): horizontal crossing of [0,m] x [0,n]");
  flag(cross, "k", c.k, "slab thickness");
  flag(cross, "p", c.p, "edge density");
  flag(cross, "m", c.m, "box width");
  flag(cross, "n", c.n, "box height")->expected(1);
  add_run_flags(cross, c);

  auto* pc = app.add_subcommand("pc-estimate", "bisection of p -> f_p(n,n) toward 1/2");
  flag(pc, "k", c.k, "slab thickness");
  flag(pc, "n", c.n, "box size")->expected(1);
  flag(pc, "tol", c.tol, "final bracket width");
  add_run_flags(pc, c);

  auto* box = app.add_subcommand("box-crossing", "f(n, floor(rho n)) for lists of n and rho");
  flag(box, "k", c.k, "slab thickness");
  flag(box, "p", c.p, "edge density");
  flag(box, "n", c.n, "box widths")->delimiter(',');
  flag(box, "rho", c.rho, "aspect ratios")->delimiter(',');
  add_run_flags(box, c);

  auto* arm = app.add_subcommand("one-arm", "P[B_m <-> boundary of B_n] and decay fits");
  flag(arm, "k", c.k, "slab thickness");
  flag(arm, "p", c.p, "edge density");
  flag(arm, "m", c.m, "inner radius")->default_val(2);
  flag(arm, "radii", c.radii, "outer radii")->delimiter(',')->required();
  add_run_flags(arm, c);

  auto* circ = app.add_subcommand("circuit", "surrounding circuits in A_{n,2n} and radial crossings");
  flag(circ, "k", c.k, "slab thickness");
  flag(circ, "p", c.p, "edge density");
  flag(circ, "n", c.n, "inner radii")->delimiter(',');
  add_run_flags(circ, c);

  auto* tree = app.add_subcommand("single-tree", "P[the stopped invasions from 0 and x meet]");
  flag(tree, "k", c.k, "slab thickness");
  flag(tree, "x", c.x, "second start x,y,z")->delimiter(',')->expected(3);
  flag(tree, "radii", c.radii, "stopping radii N")->delimiter(',')->required();
  add_run_flags(tree, c);

  std::string labels_path;
  std::vector<int> start{0, 0, 0};
  int stop_radius = 0;
  std::size_t stop_steps = 0;
  auto* inv = app.add_subcommand("invade", "invasion log as CSV");
  flag(inv, "k", c.k, "slab thickness");
  flag(inv, "m", c.m, "sampled window is the ball of radius m");
  flag(inv, "seed", c.seed, "master seed");
  flag(inv, "stream", c.stream, "stream id");
  flag(inv, "out", c.out, "output file");
  inv->add_option("--labels", labels_path, "label dump to use instead of sampling");
  inv->add_option("--start", start, "start vertex x,y,z")->delimiter(',')->expected(3);
  inv->add_option("--radius", stop_radius, "stop on reaching this sup-distance from the origin");
  inv->add_option("--steps", stop_steps, "stop after this many invaded edges");

  std::string flavor = "mst";
  std::vector<int> inner;
  auto* msf = app.add_subcommand("msf", "minimal spanning forest as JSON");
  flag(msf, "k", c.k, "slab thickness");
  flag(msf, "m", c.m, "sampled window is the ball of radius m");
  flag(msf, "seed", c.seed, "master seed");
  flag(msf, "stream", c.stream, "stream id");
  flag(msf, "out", c.out, "output file");
  msf->add_option("--labels", labels_path, "label dump to use instead of sampling");
  msf->add_option("--flavor", flavor, "mst, free or wired")->check(CLI::IsMember({"mst", "free", "wired"}));
  msf->add_option("--inner", inner, "inner window x0,x1,y0,y1")->delimiter(',')->expected(4);

  std::string query_path;
  int glue_samples = 100;
  auto* ver = app.add_subcommand("verify", "answer a query on a label dump, or run the check suites");
  ver->add_option("--labels", labels_path, "label dump");
  ver->add_option("--query", query_path, "query JSON file");
  ver->add_option("--glue-samples", glue_samples, "planted gluing instances to check");
  flag(ver, "k", c.k, "thickness for the FKG check");
  flag(ver, "p", c.p, "density for the FKG check");
  flag(ver, "trials", c.trials, "trials for the FKG check");
  flag(ver, "seed", c.seed, "master seed");
  flag(ver, "out", c.out, "output file");

  std::string records_path;
  std::string only_experiment;
  PlotSpec spec;
  auto* plot = app.add_subcommand("plot", "SVG chart of JSON-lines records");
  plot->add_option("--in", records_path, "records file")->required();
  plot->add_option("--x", spec.x_param, "parameter on the horizontal axis")->capture_default_str();
  plot->add_option("--series", spec.series_param, "parameter splitting the records into series");
  plot->add_flag("--log-x", spec.log_x);
  plot->add_flag("--log-y", spec.log_y);
  plot->add_option("--title", spec.title);
  plot->add_option("--experiment", only_experiment, "keep only records of this experiment");
  flag(plot, "out", c.out, "output file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sample) {
      const GeometryPtr g = make_geometry(c.k, {0, c.m, 0, c.n.at(0)});
      const LabelField omega = sample_labels(g, c.seed, c.stream);
      if (sample_p) {
        const BondConfig cfg = threshold(omega, *sample_p);
        json edges = json::array();
        for (EdgeId e = 0; e < g->edge_count(); ++e) {
          if (!cfg.is_open(e)) continue;
          const Vertex u = g->vertex(g->edge(e).u), v = g->vertex(g->edge(e).v);
          edges.push_back({{u.x, u.y, u.z}, {v.x, v.y, v.z}});
        }
        Sink sink(c.out);
        sink.get() << json{{"geometry", geometry_to_json(*g)}, {"p", *sample_p}, {"seed", c.seed},
                           {"stream", c.stream}, {"open", std::move(edges)}}.dump()
                   << '\n';
      } else {
        if (c.out.empty()) throw DomainError("sample writes a binary dump: give --out");
        Sink sink(c.out, std::ios::out | std::ios::binary);
        write_label_dump(sink.get(), omega);
      }
    } else if (*cross) {
      if (!run_config("crossing", c))
        emit({estimate_crossing(c.k, c.p, c.m, c.n.at(0), c.trials, c.seed, c.exec())}, c);
    } else if (*pc) {
      if (!run_config("pc-estimate", c))
        emit({estimate_pc(c.k, c.n.at(0), c.tol, c.trials, c.seed, c.exec())}, c);
    } else if (*box) {
      if (!run_config("box-crossing", c))
        emit(box_crossing_suite(c.k, c.p, c.rho, c.n, c.trials, c.seed, c.exec()), c);
    } else if (*arm) {
      if (!run_config("one-arm", c)) {
        OneArmResult r = one_arm_suite(c.k, c.p, c.m, c.radii, c.trials, c.seed, c.exec());
        std::vector<EstimateRecord> recs = std::move(r.per_radius);
        recs.push_back(std::move(r.power_law));
        recs.push_back(std::move(r.exponential));
        emit(recs, c);
      }
    } else if (*circ) {
      if (!run_config("circuit", c)) emit(circuit_suite(c.k, c.p, c.n, c.trials, c.seed, c.exec()), c);
    } else if (*tree) {
      if (!run_config("single-tree", c))
        emit(single_tree_suite(c.k, to_vertex(c.x), c.radii, c.trials, c.seed, c.exec()), c);
    } else if (*inv) {
      const LabelField omega = labels_path.empty()
                                   ? sample_labels(make_geometry(c.k, ball_box(0, 0, c.m)), c.seed, c.stream)
                                   : read_labels(labels_path);
      StopRule stop = StopExhaust{};
      if (stop_radius > 0) stop = StopAtBoundary{0, 0, stop_radius};
      else if (stop_steps > 0) stop = StopAfterSteps{stop_steps};
      const InvasionState st = invade(omega, to_vertex(start), stop);
      Sink sink(c.out);
      write_invasion_csv(sink.get(), st);
      std::cerr << "stopped: " << to_string(st.reason) << ", " << st.log.size() << " edges\n";
    } else if (*msf) {
      const LabelField omega = labels_path.empty()
                                   ? sample_labels(make_geometry(c.k, ball_box(0, 0, c.m)), c.seed, c.stream)
                                   : read_labels(labels_path);
      ForestEdgeSet f;
      if (flavor == "mst") {
        f = kruskal_mst(omega);
      } else {
        const PlaneBox w = inner.empty() ? omega.geometry().window()
                                         : PlaneBox{inner[0], inner[1], inner[2], inner[3]};
        f = msf_window(omega, w, flavor == "free" ? ForestFlavor::free_window : ForestFlavor::wired_window);
      }
      Sink sink(c.out);
      sink.get() << forest_to_json(f).dump() << '\n';
    } else if (*ver) {
      Sink sink(c.out);
      if (!query_path.empty()) {
        if (labels_path.empty()) throw DomainError("--query needs --labels");
        std::ifstream q(query_path);
        if (!q) throw std::runtime_error("cannot read query " + query_path);
        sink.get() << answer_query(read_labels(labels_path), json::parse(q)).dump() << '\n';
      } else {
        const int failures = verify_suites(c, glue_samples, sink.get());
        if (failures) {
          std::cerr << failures << " check(s) failed\n";
          return 1;
        }
      }
    } else if (*plot) {
      std::vector<EstimateRecord> recs = read_records(records_path);
      if (!only_experiment.empty())
        std::erase_if(recs, [&](const EstimateRecord& r) { return r.experiment != only_experiment; });
      Sink sink(c.out);
      sink.get() << render_svg(recs, spec);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
