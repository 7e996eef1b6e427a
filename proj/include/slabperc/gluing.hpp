// Local label surgeries: the plus-cylinder gluing map for invasions, and
// verifiers for the discrete and affine counting lemmas, the Harris-FKG
// inequality and the square-root trick.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "slabperc/geometry.hpp"
#include "slabperc/labels.hpp"

namespace slabperc {

using Rational = boost::multiprecision::cpp_rational;

/// Raised when an input lies outside the domain event of a surgery.
class PreconditionError : public DomainError {
 public:
  using DomainError::DomainError;
};

enum class Monotonicity { increasing, decreasing, neither };

/// An event on the edges of `support`. Either evaluator may be absent.
struct EventPredicate {
  std::string name;
  std::vector<EdgeId> support;
  Monotonicity monotonicity = Monotonicity::neither;
  std::function<bool(const BondConfig&)> on_config;
  std::function<bool(const LabelField&)> on_labels;

  bool operator()(const BondConfig& c) const;
  bool operator()(const LabelField& omega) const;
};

/// Flips edges outside the support of random configurations at density p and
/// reports whether the outcome ever changed.
bool support_respected(const EventPredicate& ev, const GeometryPtr& g, double p, std::uint64_t seed,
                       int trials);

/// Opens one closed support edge of random configurations and reports whether
/// the declared monotonicity was ever contradicted. Untagged events pass.
bool monotonicity_respected(const EventPredicate& ev, const GeometryPtr& g, double p,
                            std::uint64_t seed, int trials);

// ---------------------------------------------------------------------------
// Gluing for invasions

/// The ring A_{n,2n} about the origin carries the circuit; invasions are
/// stopped on the boundary of the ball of radius m > 2n. `p` plays the
/// critical value and `b` > p is the closing level (default (1+p)/2).
struct GlueContext {
  int n = 2;
  int m = 6;
  Vertex x{};
  double p = 0.5;
  std::optional<double> b;

  double closing_level() const { return b ? *b : 0.5 * (1.0 + p); }
};

struct GlueEvents {
  bool circuit = false;     // a p-open circuit in the ring surrounds the origin
  bool no_escape = false;   // no p-open path in B_m from B_{2n} to the boundary of B_m
  bool origin_holds = false;  // the minimal circuit lies in the stopped invasion from 0
  bool x_holds = false;       // the same for the invasion from x

  bool domain() const { return circuit && no_escape && !origin_holds && x_holds; }
  bool target() const { return circuit && no_escape && origin_holds && x_holds; }
  /// Name of the first conjunct of the domain event that fails, or empty.
  std::string failed_domain_conjunct() const;
};

GlueEvents evaluate_glue_events(const LabelField& omega, const GlueContext& ctx);

enum class EdgeChange { untouched, opened, closed };
const char* to_string(EdgeChange c);

/// Edges with both endpoints in the cylinder over the five-point plus at
/// the projection of `center`, restricted to the geometry.
std::vector<EdgeId> plus_cylinder_edges(const SlabGeometry& g, const Vertex& center);

struct GlueWitness {
  Vertex z;
  Vertex z_prime;
  /// Edges of the plus cylinder outside the circuit; every one is changed.
  std::vector<EdgeId> changed;
};

struct SurgeryReport {
  LabelField input;
  LabelField output;
  /// Sorted changed edge ids and the map applied to each.
  std::vector<EdgeId> changed;
  std::vector<EdgeChange> kinds;
  std::size_t bound = 0;  // edge count of the plus cylinder
  GlueEvents before;
  GlueEvents after;
  PathOrCircuit circuit_before;
  PathOrCircuit circuit_after;
  std::size_t circuit_clusters_before = 0;
  std::size_t circuit_clusters_after = 0;
  GlueWitness forward;
  std::vector<Vertex> gamma_z;
  std::vector<Vertex> gamma_w;
  std::optional<Vertex> w;
  /// Recovered from the output alone.
  std::optional<GlueWitness> reconstructed;

  bool untouched_identical() const;
  nlohmann::json to_json() const;
};

/// Applies the gluing map. Throws PreconditionError naming the failed
/// conjunct when omega is outside the domain event.
SurgeryReport glue_invasion(const LabelField& omega, const GlueContext& ctx);

/// Recovers z, z' and the changed edges from an output of glue_invasion.
std::optional<GlueWitness> reconstruct_glue(const LabelField& omega_prime, const GlueContext& ctx);

/// Undoes the affine maps on the witness edges: labels below p were opened,
/// the others closed.
LabelField invert_glue(const LabelField& omega_prime, const GlueWitness& witness,
                       const GlueContext& ctx);

struct GlueInstance {
  LabelField omega;
  GlueContext ctx;
};

/// Candidate for the domain event on the geometry ball_box(0,0,m) x [k], k >= 1.
/// Labels are uniform except for a planted open square circuit in the ring
/// (x is one of its vertices or a uniform vertex of B_{2n}), a closed shell outside B_{2n}, and a corridor
/// from the origin on another layer that passes under the circuit and leaves
/// through the shell over a single edge labelled just above p.
GlueInstance plant_glue_candidate(int k, const GlueContext& base, std::uint64_t seed,
                                  std::uint64_t stream);

/// Candidates in streams first_stream, first_stream + 1, ... until one lies
/// in the domain event; nullopt after max_attempts.
std::optional<GlueInstance> sample_glue_domain(int k, const GlueContext& base, std::uint64_t seed,
                                               std::uint64_t first_stream, int max_attempts,
                                               std::uint64_t* next_stream = nullptr);

// ---------------------------------------------------------------------------
// Counting lemmas

struct HypothesisResult {
  std::string name;
  bool holds = true;
  std::optional<std::string> counterexample;
};

struct LemmaReport {
  std::string lemma;
  std::vector<HypothesisResult> hypotheses;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin_sigma = 0.0;
  std::optional<std::string> lhs_exact;
  std::optional<std::string> rhs_exact;
  bool inequality_holds = false;
  nlohmann::json extra = nlohmann::json::object();

  bool hypotheses_hold() const;
  nlohmann::json to_json() const;
};

/// Phi maps a configuration of A to a set of configurations of B.
using ConfigMap = std::function<std::vector<BondConfig>(const BondConfig&)>;

/// Exhaustive check over the 2^|support| configurations (edges off the support
/// closed) of |Phi(omega)| >= t, Phi(omega) within B, the fiber condition with
/// at most s edges, and P[A] <= (1/t) (2/min(p,1-p))^s P[B] in exact rationals.
LemmaReport verify_combi0(const EventPredicate& A, const EventPredicate& B, const ConfigMap& phi,
                          int s, const Rational& t, const Rational& p, const GeometryPtr& g,
                          std::span<const EdgeId> support);

/// Output of an affine surgery: the new field and the edges it moved.
struct AffineSurgery {
  LabelField output;
  std::vector<EdgeId> changed;
  std::vector<EdgeChange> kinds;
};
using AffineMap = std::function<std::optional<AffineSurgery>(const LabelField&)>;

struct CombiOptions {
  std::size_t trials = 100000;
  std::size_t jacobian_samples = 20;
  double fd_step = 1e-7;
  std::uint64_t seed = 1;
};

/// Monte Carlo check of P[A] <= (2/(a ^ (1-b)))^s P[B] at 3 sigma, plus a
/// finite-difference Jacobian bound det >= (a ^ (1-b))^s on samples of A.
/// Throws DomainError when Phi moves an edge by anything but the two maps.
LemmaReport verify_combi(const EventPredicate& A, const EventPredicate& B, const AffineMap& phi,
                         int s, double a, double b, const GeometryPtr& g,
                         const CombiOptions& options);

struct FkgOptions {
  std::size_t trials = 100000;
  std::size_t batches = 20;
  std::uint64_t seed = 1;
  int mutation_trials = 200;
};

/// Covariances of every pair of increasing events and the square-root gap
/// max_i P[A_i] - (1 - (1 - P[union])^(1/j)), each expected >= -3 sigma.
LemmaReport fkg_and_sqrt_check(std::span<const EventPredicate> events, double p,
                               const GeometryPtr& g, const FkgOptions& options);

}  // namespace slabperc
