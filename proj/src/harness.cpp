#include "slabperc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "slabperc/connectivity.hpp"
#include "slabperc/invasion.hpp"
#include "slabperc/rng.hpp"

namespace slabperc {

nlohmann::json EstimateRecord::to_json() const {
  nlohmann::json j = {{"experiment", experiment},
                      {"params", params},
                      {"estimate", estimate},
                      {"ci95", {ci95.lo, ci95.hi}},
                      {"trials", trials},
                      {"successes", nullptr},
                      {"seed", seed},
                      {"version", version},
                      {"wall_ms", nullptr}};
  if (successes) j["successes"] = *successes;
  if (wall_ms) j["wall_ms"] = *wall_ms;
  if (!checks.empty()) j["checks"] = checks;
  if (cell) j["cell"] = *cell;
  return j;
}

EstimateRecord EstimateRecord::from_json(const nlohmann::json& j) {
  EstimateRecord r;
  r.experiment = j.at("experiment").get<std::string>();
  r.params = j.at("params");
  r.estimate = j.at("estimate").get<double>();
  r.ci95 = {j.at("ci95").at(0).get<double>(), j.at("ci95").at(1).get<double>()};
  r.trials = j.at("trials").get<std::uint64_t>();
  if (!j.at("successes").is_null()) r.successes = j["successes"].get<std::uint64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.version = j.at("version").get<std::string>();
  if (!j.at("wall_ms").is_null()) r.wall_ms = j["wall_ms"].get<double>();
  if (j.contains("checks")) r.checks = j["checks"];
  if (j.contains("cell")) r.cell = j["cell"].get<std::string>();
  return r;
}

std::vector<std::uint64_t> parallel_counts(
    std::uint64_t trials, std::size_t width, const ExecOptions& exec,
    const std::function<void(std::uint64_t, std::vector<std::uint64_t>&)>& body) {
  std::vector<std::uint64_t> total(width, 0);
  const unsigned workers = std::max(1u, exec.workers);
  if (workers == 1) {
    for (std::uint64_t t = 0; t < trials; ++t) body(t, total);
    return total;
  }
  const std::uint64_t block = std::max<std::size_t>(1, exec.block);
  std::atomic<std::uint64_t> next{0};
  std::mutex mu;
  std::exception_ptr error;
  const auto run = [&] {
    std::vector<std::uint64_t> acc(width, 0);
    try {
      for (;;) {
        const std::uint64_t begin = next.fetch_add(block);
        if (begin >= trials) break;
        const std::uint64_t end = std::min(trials, begin + block);
        for (std::uint64_t t = begin; t < end; ++t) body(t, acc);
      }
    } catch (...) {
      std::lock_guard lock(mu);
      if (!error) error = std::current_exception();
      next = trials;
    }
    std::lock_guard lock(mu);
    for (std::size_t i = 0; i < width; ++i) total[i] += acc[i];
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return total;
}

BondConfig sample_config(const GeometryPtr& g, std::uint64_t seed, std::uint64_t stream, double p) {
  const std::uint64_t key = stream_key(seed, stream);
  const auto edges = g->edges();
  std::vector<std::uint8_t> open(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Vertex a = g->vertex(edges[e].u);
    open[e] = edge_uniform(key, a.x, a.y, a.z, static_cast<int>(edges[e].dir)) < p;
  }
  return BondConfig(g, std::move(open), p);
}

namespace {

using Clock = std::chrono::steady_clock;

class Stopwatch {
 public:
  explicit Stopwatch(bool on) : on_(on), start_(Clock::now()) {}
  std::optional<double> ms() const {
    if (!on_) return std::nullopt;
    return std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
  }

 private:
  bool on_;
  Clock::time_point start_;
};

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0,1]");
}

void check_trials(std::uint64_t trials) {
  if (trials == 0) throw DomainError("at least one trial is needed");
}

EstimateRecord proportion_record(std::string experiment, nlohmann::json params,
                                 std::uint64_t successes, std::uint64_t trials,
                                 std::uint64_t seed) {
  EstimateRecord r;
  r.experiment = std::move(experiment);
  r.params = std::move(params);
  r.estimate = static_cast<double>(successes) / static_cast<double>(trials);
  r.ci95 = wilson_interval(successes, trials);
  r.trials = trials;
  r.successes = successes;
  r.seed = seed;
  return r;
}

std::vector<Vertex> ball_vertices(int k, int r) {
  std::vector<Vertex> out;
  for (int y = -r; y <= r; ++y)
    for (int x = -r; x <= r; ++x)
      for (int z = 0; z <= k; ++z) out.push_back({x, y, z});
  return out;
}

}  // namespace

EstimateRecord estimate_crossing(int k, double p, int m, int n, std::uint64_t trials,
                                 std::uint64_t seed, const ExecOptions& exec) {
  if (k < 0) throw DomainError("thickness must be non-negative");
  if (m < 1 || n < 0) throw DomainError("crossing box needs m >= 1 and n >= 0");
  check_probability(p);
  check_trials(trials);
  const Stopwatch clock(exec.timing);
  const PlaneBox box{0, m, 0, n};
  const GeometryPtr g = make_geometry(k, box);
  const CrossingQuery q = CrossingQuery::horizontal(Region::rectangle(k, box));
  const auto counts = parallel_counts(trials, 1, exec, [&](std::uint64_t t, auto& acc) {
    if (crossing(sample_config(g, seed, t, p), q)) ++acc[0];
  });
  EstimateRecord r = proportion_record("crossing", {{"k", k}, {"p", p}, {"m", m}, {"n", n}},
                                       counts[0], trials, seed);
  r.wall_ms = clock.ms();
  return r;
}

EstimateRecord estimate_pc(int k, int n, double tol, std::uint64_t trials_per_step,
                           std::uint64_t seed, const ExecOptions& exec) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  check_trials(trials_per_step);
  const Stopwatch clock(exec.timing);
  double lo = 0.0;
  double hi = 1.0;
  std::vector<PcStep> steps;
  std::uint64_t used = 0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double w = hi - lo;
    const EstimateRecord f = estimate_crossing(k, mid, n, n, trials_per_step, seed, exec);
    used += f.trials;
    PcStep step{mid, *f.successes, f.trials, ""};
    if (f.ci95.lo > 0.5) {
      hi = mid;
      step.decision = "lower";
    } else if (f.ci95.hi < 0.5) {
      lo = mid;
      step.decision = "upper";
    } else {
      lo = mid - 0.25 * w;
      hi = mid + 0.25 * w;
      step.decision = "recentre";
    }
    steps.push_back(step);
  }
  nlohmann::json log = nlohmann::json::array();
  for (const auto& s : steps)
    log.push_back({{"p", s.p}, {"successes", s.successes}, {"trials", s.trials},
                   {"decision", s.decision}});
  if (lo <= 0.0 || hi >= 1.0) {
    std::ostringstream msg;
    msg << "pc bisection did not converge: bracket [" << lo << ", " << hi
        << "] touches the boundary of [0,1]; steps " << log.dump();
    throw DomainError(msg.str());
  }
  EstimateRecord r;
  r.experiment = "pc_estimate";
  r.params = {{"k", k}, {"n", n}, {"tol", tol}, {"trials_per_step", trials_per_step},
              {"steps", std::move(log)}};
  r.estimate = 0.5 * (lo + hi);
  r.ci95 = {lo, hi};
  r.trials = used;
  r.seed = seed;
  r.wall_ms = clock.ms();
  return r;
}

std::vector<EstimateRecord> box_crossing_suite(int k, double p, const std::vector<double>& rhos,
                                               const std::vector<int>& ns, std::uint64_t trials,
                                               std::uint64_t seed, const ExecOptions& exec) {
  std::vector<EstimateRecord> out;
  for (double rho : rhos) {
    if (!(rho > 0.0)) throw DomainError("aspect ratio must be positive");
    for (int n : ns) {
      const int h = static_cast<int>(std::floor(rho * n));
      EstimateRecord r = estimate_crossing(k, p, n, h, trials, seed, exec);
      r.experiment = "box_crossing";
      r.params["rho"] = rho;
      r.checks["within_0.05_0.95"] = r.estimate >= 0.05 && r.estimate <= 0.95;
      out.push_back(std::move(r));
    }
  }
  return out;
}

bool OneArmResult::prefers_exponential() const {
  return exponential.params.at("chi2").get<double>() < power_law.params.at("chi2").get<double>();
}

OneArmResult one_arm_suite(int k, double p, int m, const std::vector<int>& radii,
                           std::uint64_t trials, std::uint64_t seed, const ExecOptions& exec) {
  if (k < 0 || m < 0) throw DomainError("thickness and inner radius must be non-negative");
  if (radii.empty()) throw DomainError("one-arm suite needs radii");
  for (int r : radii)
    if (r <= m) throw DomainError("every radius must exceed the inner radius");
  check_probability(p);
  check_trials(trials);
  const Stopwatch clock(exec.timing);
  const int rmax = *std::max_element(radii.begin(), radii.end());
  const GeometryPtr g = make_geometry(k, ball_box(0, 0, rmax));
  std::vector<std::uint32_t> sources;
  for (const Vertex& v : ball_vertices(k, m)) sources.push_back(g->index(v));

  // acc[r] counts trials whose cluster of B_m reaches sup-distance exactly r.
  const auto hist = parallel_counts(trials, rmax + 1, exec, [&](std::uint64_t t, auto& acc) {
    const BondConfig c = sample_config(g, seed, t, p);
    std::vector<std::uint8_t> seen(g->vertex_count(), 0);
    std::vector<std::uint32_t> queue(sources);
    for (std::uint32_t s : sources) seen[s] = 1;
    int reach = m;
    for (std::size_t i = 0; i < queue.size() && reach < rmax; ++i) {
      for (const Incidence& inc : g->incident(queue[i])) {
        if (seen[inc.vertex] || !c.is_open(inc.edge)) continue;
        seen[inc.vertex] = 1;
        queue.push_back(inc.vertex);
        const Vertex v = g->vertex(inc.vertex);
        reach = std::max(reach, plane_dist(v.x, v.y, 0, 0));
      }
    }
    ++acc[reach];
  });

  OneArmResult out;
  std::vector<double> logn, n_lin, logp, sigma;
  const nlohmann::json base = {{"k", k}, {"p", p}, {"m", m}};
  for (int r : radii) {
    std::uint64_t s = 0;
    for (int j = r; j <= rmax; ++j) s += hist[j];
    nlohmann::json params = base;
    params["n"] = r;
    out.per_radius.push_back(proportion_record("one_arm", std::move(params), s, trials, seed));
    if (s == 0) {
      out.dropped.push_back(r);
      continue;
    }
    const double phat = static_cast<double>(s) / static_cast<double>(trials);
    logn.push_back(std::log(static_cast<double>(r)));
    n_lin.push_back(r);
    logp.push_back(std::log(phat));
    sigma.push_back(proportion_se(s, trials) / phat);
  }
  if (logn.size() < 3)
    throw DomainError("one-arm fit needs at least three radii with successes; got " +
                      std::to_string(logn.size()));

  const auto fit_record = [&](const LineFit& fit, const char* model) {
    EstimateRecord r;
    r.experiment = "one_arm_fit";
    r.params = base;
    r.params["model"] = model;
    r.params["radii"] = radii;
    r.params["dropped"] = out.dropped;
    r.params["intercept"] = fit.intercept;
    r.params["chi2"] = fit.chi2;
    r.params["dof"] = fit.dof;
    r.estimate = -fit.slope;
    r.ci95 = {-fit.slope - kZ95 * fit.slope_se, -fit.slope + kZ95 * fit.slope_se};
    r.trials = trials;
    r.seed = seed;
    return r;
  };
  out.power_law = fit_record(weighted_line_fit(logn, logp, sigma), "power");
  out.exponential = fit_record(weighted_line_fit(n_lin, logp, sigma), "exponential");
  out.power_law.checks["delta_positive"] = out.power_law.ci95.lo > 0.0;
  out.power_law.wall_ms = clock.ms();
  return out;
}

std::vector<EstimateRecord> circuit_suite(int k, double p, const std::vector<int>& ns,
                                          std::uint64_t trials, std::uint64_t seed,
                                          const ExecOptions& exec) {
  if (k < 0) throw DomainError("thickness must be non-negative");
  check_probability(p);
  check_trials(trials);
  std::vector<EstimateRecord> out;
  for (int n : ns) {
    if (n < 1) throw DomainError("circuit suite needs n >= 1");
    const Stopwatch clock(exec.timing);
    const PlaneBox box = ball_box(0, 0, 2 * n);
    const GeometryPtr g = make_geometry(k, box);
    const Region ring = Region::annulus(k, 0, 0, n, 2 * n);
    CrossingQuery radial{Region::rectangle(k, box), ball_vertices(k, n), ring.outer_ring()};
    const auto counts = parallel_counts(trials, 2, exec, [&](std::uint64_t t, auto& acc) {
      const BondConfig c = sample_config(g, seed, t, p);
      if (has_surrounding_circuit(c, ring)) ++acc[0];
      if (crossing(c, radial)) ++acc[1];
    });
    const nlohmann::json params = {{"k", k}, {"p", p}, {"n", n}};
    EstimateRecord circ = proportion_record("circuit", params, counts[0], trials, seed);
    circ.checks["at_least_0.02"] = circ.estimate >= 0.02;
    circ.wall_ms = clock.ms();
    EstimateRecord arm = proportion_record("radial_crossing", params, counts[1], trials, seed);
    arm.checks["at_most_0.98"] = arm.estimate <= 0.98;
    arm.wall_ms = clock.ms();
    out.push_back(std::move(circ));
    out.push_back(std::move(arm));
  }
  return out;
}

std::vector<EstimateRecord> single_tree_suite(int k, const Vertex& x, const std::vector<int>& Ns,
                                              std::uint64_t trials, std::uint64_t seed,
                                              const ExecOptions& exec) {
  if (k < 0) throw DomainError("thickness must be non-negative");
  if (Ns.empty()) throw DomainError("single-tree suite needs radii");
  for (int N : Ns)
    if (N < 1) throw DomainError("radii must be positive");
  check_trials(trials);
  const int nmax = *std::max_element(Ns.begin(), Ns.end());
  const GeometryPtr g = make_geometry(k, ball_box(0, 0, nmax));
  if (!g->contains(x)) throw DomainError("x lies outside the ball of the largest radius");
  if (x.z < 0 || x.z > k) throw DomainError("x lies outside the slab");
  const Stopwatch clock(exec.timing);
  const Vertex origin{0, 0, 0};

  // First position in the invasion order at sup-distance >= N, or the size.
  const auto stop_length = [&](const InvasionState& st, int N) {
    for (std::size_t i = 0; i < st.vertices.size(); ++i) {
      const Vertex v = g->vertex(st.vertices[i]);
      if (plane_dist(v.x, v.y, 0, 0) >= N) return i + 1;
    }
    return st.vertices.size();
  };

  const auto counts = parallel_counts(trials, Ns.size(), exec, [&](std::uint64_t t, auto& acc) {
    const LabelField omega = sample_labels(g, seed, t);
    const StopAtBoundary stop{0, 0, nmax};
    const InvasionState a = invade(omega, origin, stop);
    const InvasionState b = invade(omega, x, stop);
    std::vector<std::pair<std::size_t, std::size_t>> common;
    for (std::size_t i = 0; i < a.vertices.size(); ++i)
      if (b.invaded(a.vertices[i])) common.emplace_back(i, b.order[a.vertices[i]]);
    for (std::size_t j = 0; j < Ns.size(); ++j) {
      const std::size_t ta = stop_length(a, Ns[j]);
      const std::size_t tb = stop_length(b, Ns[j]);
      if (std::any_of(common.begin(), common.end(),
                      [&](const auto& c) { return c.first < ta && c.second < tb; }))
        ++acc[j];
    }
  });
  std::vector<EstimateRecord> out;
  for (std::size_t j = 0; j < Ns.size(); ++j) {
    EstimateRecord r = proportion_record(
        "single_tree", {{"k", k}, {"x", {x.x, x.y, x.z}}, {"N", Ns[j]}}, counts[j], trials, seed);
    r.wall_ms = clock.ms();
    out.push_back(std::move(r));
  }
  return out;
}

nlohmann::json KestenReport::to_json() const {
  return {{"lhs", lhs.to_json()}, {"rhs", rhs.to_json()}, {"bound", bound},
          {"sigma", sigma},       {"holds", holds}};
}

KestenReport kesten_inequality_check(int k, double p, int n, std::uint64_t trials,
                                     std::uint64_t seed, const ExecOptions& exec) {
  if (n < 1) throw DomainError("squared-crossing check needs n >= 1");
  KestenReport rep;
  rep.lhs = estimate_crossing(k, p, 2 * n, 4 * n, trials, seed, exec);
  rep.rhs = estimate_crossing(k, p, n, 2 * n, trials, seed, exec);
  const double f = rep.rhs.estimate;
  rep.bound = 25.0 * f * f;
  const double se_l = proportion_se(*rep.lhs.successes, trials);
  const double se_r = 50.0 * f * proportion_se(*rep.rhs.successes, trials);
  rep.sigma = std::sqrt(se_l * se_l + se_r * se_r);
  rep.holds = rep.lhs.estimate <= rep.bound + 3.0 * rep.sigma;
  return rep;
}

// ---------------------------------------------------------------------------
// Plans

std::vector<nlohmann::json> ExperimentPlan::cells() const {
  std::vector<nlohmann::json> out{fixed.is_object() ? fixed : nlohmann::json::object()};
  for (const auto& [name, values] : grid.items()) {
    const nlohmann::json list = values.is_array() ? values : nlohmann::json::array({values});
    if (list.empty()) throw DomainError("grid parameter '" + name + "' has no values");
    std::vector<nlohmann::json> next;
    for (const auto& cell : out)
      for (const auto& v : list) {
        nlohmann::json c = cell;
        c[name] = v;
        next.push_back(std::move(c));
      }
    out = std::move(next);
  }
  return out;
}

ExperimentPlan ExperimentPlan::from_json(const nlohmann::json& j) {
  ExperimentPlan plan;
  plan.experiment = j.at("experiment").get<std::string>();
  if (j.contains("fixed")) plan.fixed = j["fixed"];
  if (j.contains("grid")) plan.grid = j["grid"];
  if (j.contains("trials")) plan.trials = j["trials"].get<std::uint64_t>();
  if (j.contains("seed")) plan.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("sink")) plan.sink = j["sink"].get<std::string>();
  if (!plan.fixed.is_object() || !plan.grid.is_object())
    throw DomainError("plan 'fixed' and 'grid' must be objects");
  return plan;
}

std::string cell_key(const std::string& experiment, const nlohmann::json& params,
                     std::uint64_t seed) {
  const std::string text = experiment + '\n' + params.dump() + '\n' + std::to_string(seed);
  std::uint64_t h = mix64(text.size());
  for (unsigned char ch : text) h = hash_combine(h, ch);
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

namespace {

template <class T>
T param(const nlohmann::json& params, const char* name) {
  if (!params.contains(name))
    throw DomainError(std::string("cell is missing parameter '") + name + "'");
  return params.at(name).get<T>();
}

std::vector<int> int_list(const nlohmann::json& params, const char* name) {
  if (!params.contains(name))
    throw DomainError(std::string("cell is missing parameter '") + name + "'");
  const auto& v = params.at(name);
  if (v.is_array()) return v.get<std::vector<int>>();
  return {v.get<int>()};
}

Vertex vertex_param(const nlohmann::json& params, const char* name) {
  const auto v = param<std::vector<int>>(params, name);
  if (v.size() != 3) throw DomainError(std::string("parameter '") + name + "' needs [x,y,z]");
  return {v[0], v[1], v[2]};
}

}  // namespace

std::vector<EstimateRecord> run_cell(const std::string& experiment, const nlohmann::json& params,
                                     std::uint64_t trials, std::uint64_t seed,
                                     const ExecOptions& exec) {
  if (experiment == "crossing")
    return {estimate_crossing(param<int>(params, "k"), param<double>(params, "p"),
                              param<int>(params, "m"), param<int>(params, "n"), trials, seed,
                              exec)};
  if (experiment == "box-crossing")
    return box_crossing_suite(param<int>(params, "k"), param<double>(params, "p"),
                              {param<double>(params, "rho")}, int_list(params, "n"), trials, seed,
                              exec);
  if (experiment == "pc-estimate")
    return {estimate_pc(param<int>(params, "k"), param<int>(params, "n"),
                        param<double>(params, "tol"), trials, seed, exec)};
  if (experiment == "one-arm") {
    OneArmResult r = one_arm_suite(param<int>(params, "k"), param<double>(params, "p"),
                                   param<int>(params, "m"), int_list(params, "radii"), trials,
                                   seed, exec);
    std::vector<EstimateRecord> out = std::move(r.per_radius);
    out.push_back(std::move(r.power_law));
    out.push_back(std::move(r.exponential));
    return out;
  }
  if (experiment == "circuit")
    return circuit_suite(param<int>(params, "k"), param<double>(params, "p"),
                         int_list(params, "n"), trials, seed, exec);
  if (experiment == "single-tree")
    return single_tree_suite(param<int>(params, "k"), vertex_param(params, "x"),
                             int_list(params, "N"), trials, seed, exec);
  if (experiment == "kesten") {
    const KestenReport rep = kesten_inequality_check(
        param<int>(params, "k"), param<double>(params, "p"), param<int>(params, "n"), trials,
        seed, exec);
    EstimateRecord r = rep.lhs;
    r.experiment = "kesten";
    r.params = {{"k", params["k"]}, {"p", params["p"]}, {"n", params["n"]},
                {"rhs_estimate", rep.rhs.estimate}, {"bound", rep.bound},
                {"sigma", rep.sigma}};
    r.checks["holds"] = rep.holds;
    return {r};
  }
  throw DomainError("unknown experiment '" + experiment + "'");
}

PlanResult run_plan(const ExperimentPlan& plan, const ExecOptions& exec,
                    const std::function<void(const EstimateRecord&)>& on_record) {
  if (plan.sink.empty()) throw DomainError("plan has no sink");
  std::set<std::string> done;
  {
    std::ifstream in(plan.sink, std::ios::binary);
    if (in) {
      std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      // A torn final line from an interrupted run is dropped before appending.
      const std::size_t complete = text.rfind('\n') == std::string::npos ? 0 : text.rfind('\n') + 1;
      std::istringstream lines(text.substr(0, complete));
      for (std::string line; std::getline(lines, line);) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line, nullptr, false);
        if (!j.is_discarded() && j.contains("cell")) done.insert(j["cell"].get<std::string>());
      }
      if (complete != text.size()) {
        std::ofstream fix(plan.sink, std::ios::binary | std::ios::trunc);
        fix << text.substr(0, complete);
        if (!fix) throw std::runtime_error("cannot rewrite sink " + plan.sink);
      }
    }
  }
  std::ofstream out(plan.sink, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot open sink " + plan.sink + " for writing");

  PlanResult result;
  for (const nlohmann::json& params : plan.cells()) {
    const std::string key = cell_key(plan.experiment, params, plan.seed);
    if (done.count(key)) {
      ++result.cells_skipped;
      continue;
    }
    std::vector<EstimateRecord> records = run_cell(plan.experiment, params, plan.trials,
                                                   plan.seed, exec);
    std::string block;
    for (auto& r : records) {
      r.cell = key;
      block += r.to_json().dump() + '\n';
    }
    out << block << std::flush;
    if (!out) throw std::runtime_error("write to sink " + plan.sink + " failed");
    done.insert(key);
    ++result.cells_run;
    result.trials_run += plan.trials;
    if (on_record)
      for (const auto& r : records) on_record(r);
  }
  return result;
}

}  // namespace slabperc
