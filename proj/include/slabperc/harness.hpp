// Monte Carlo experiments: crossing probabilities, critical-point bisection,
// box-crossing / one-arm / circuit / single-tree suites, the squared-crossing
// inequality, and resumable JSON-lines experiment plans.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "slabperc/geometry.hpp"
#include "slabperc/labels.hpp"
#include "slabperc/stats.hpp"

namespace slabperc {

inline constexpr const char* kVersion = "slabperc 0.1.0";

struct ExecOptions {
  unsigned workers = 1;
  /// Record wall time in milliseconds; off keeps records byte-reproducible.
  bool timing = false;
  /// Trials per work unit handed to a worker.
  std::size_t block = 256;
};

struct EstimateRecord {
  std::string experiment;
  nlohmann::json params = nlohmann::json::object();
  double estimate = 0.0;
  Interval ci95;
  std::uint64_t trials = 0;
  std::optional<std::uint64_t> successes;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  std::optional<double> wall_ms;
  /// Acceptance-policy checks attached by suites: name -> passed.
  nlohmann::json checks = nlohmann::json::object();
  /// Key of the plan cell that produced the record, if any.
  std::optional<std::string> cell;

  nlohmann::json to_json() const;
  static EstimateRecord from_json(const nlohmann::json& j);
};

/// Calls `body(trial, acc)` for every trial in [0, trials) across `workers`
/// threads pulling blocks of trials, then sums the per-worker accumulators
/// element-wise. Integer sums make the result independent of scheduling.
std::vector<std::uint64_t> parallel_counts(
    std::uint64_t trials, std::size_t width, const ExecOptions& exec,
    const std::function<void(std::uint64_t, std::vector<std::uint64_t>&)>& body);

/// Open bits of the field (seed, stream) thresholded at p, without
/// materializing the labels.
BondConfig sample_config(const GeometryPtr& g, std::uint64_t seed, std::uint64_t stream, double p);

/// f_p(m,n): horizontal crossing of the cylinder over [0,m] x [0,n].
EstimateRecord estimate_crossing(int k, double p, int m, int n, std::uint64_t trials,
                                 std::uint64_t seed, const ExecOptions& exec = {});

struct PcStep {
  double p;
  std::uint64_t successes;
  std::uint64_t trials;
  std::string decision;  // lower | upper | recentre
};

/// Stochastic bisection of p -> f_p(n,n) toward 1/2, starting from [0,1].
/// Each step halves the bracket: to one side when the Wilson interval at the
/// midpoint excludes 1/2, around the midpoint otherwise. Throws DomainError if
/// the final bracket touches 0 or 1.
EstimateRecord estimate_pc(int k, int n, double tol, std::uint64_t trials_per_step,
                           std::uint64_t seed, const ExecOptions& exec = {});

/// f(n, floor(rho n)) for every rho and n, flagged against [0.05, 0.95].
std::vector<EstimateRecord> box_crossing_suite(int k, double p, const std::vector<double>& rhos,
                                               const std::vector<int>& ns, std::uint64_t trials,
                                               std::uint64_t seed, const ExecOptions& exec = {});

struct OneArmResult {
  std::vector<EstimateRecord> per_radius;
  /// estimate = fitted delta from log P = c - delta log n.
  EstimateRecord power_law;
  /// estimate = fitted rate from log P = c - rate n.
  EstimateRecord exponential;
  std::vector<int> dropped;
  bool prefers_exponential() const;
};

/// P[B_m <-> boundary of B_n] for each radius n from one exploration per trial.
OneArmResult one_arm_suite(int k, double p, int m, const std::vector<int>& radii,
                           std::uint64_t trials, std::uint64_t seed, const ExecOptions& exec = {});

/// Per n: a surrounding circuit in A_{n,2n} (flag >= 0.02) and the radial
/// crossing from B_n to the boundary of B_{2n} (flag <= 0.98).
std::vector<EstimateRecord> circuit_suite(int k, double p, const std::vector<int>& ns,
                                          std::uint64_t trials, std::uint64_t seed,
                                          const ExecOptions& exec = {});

/// P[I_0^N and I_x^N intersect] per N on common label fields; one record per N.
std::vector<EstimateRecord> single_tree_suite(int k, const Vertex& x, const std::vector<int>& Ns,
                                              std::uint64_t trials, std::uint64_t seed,
                                              const ExecOptions& exec = {});

struct KestenReport {
  EstimateRecord lhs;  // f(2n,4n)
  EstimateRecord rhs;  // f(n,2n), squared and scaled by 25 in `bound`
  double bound = 0.0;
  double sigma = 0.0;
  bool holds = false;
  nlohmann::json to_json() const;
};

/// f(2n,4n) <= 25 f(n,2n)^2 at 3 sigma.
KestenReport kesten_inequality_check(int k, double p, int n, std::uint64_t trials,
                                     std::uint64_t seed, const ExecOptions& exec = {});

// ---------------------------------------------------------------------------
// Plans

struct ExperimentPlan {
  std::string experiment;
  /// Parameters shared by every cell.
  nlohmann::json fixed = nlohmann::json::object();
  /// Parameter name -> list of values; cells are the cartesian product in key order.
  nlohmann::json grid = nlohmann::json::object();
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  std::string sink;

  std::vector<nlohmann::json> cells() const;
  static ExperimentPlan from_json(const nlohmann::json& j);
};

/// Stable key of one cell: hash of experiment, parameters and seed.
std::string cell_key(const std::string& experiment, const nlohmann::json& params, std::uint64_t seed);

/// Runs one cell of a plan.
std::vector<EstimateRecord> run_cell(const std::string& experiment, const nlohmann::json& params,
                                     std::uint64_t trials, std::uint64_t seed,
                                     const ExecOptions& exec);

struct PlanResult {
  std::size_t cells_run = 0;
  std::size_t cells_skipped = 0;
  std::uint64_t trials_run = 0;
};

/// Appends one JSON line per record to plan.sink, skipping cells whose key is
/// already present. Throws std::runtime_error naming the sink if it cannot be
/// written; lines already flushed stay valid.
PlanResult run_plan(const ExperimentPlan& plan, const ExecOptions& exec,
                    const std::function<void(const EstimateRecord&)>& on_record = {});

}  // namespace slabperc
