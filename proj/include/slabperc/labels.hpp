// Edge label fields omega: E -> [0,1], Bernoulli configurations obtained by
// thresholding, and the affine label surgeries.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "slabperc/geometry.hpp"

namespace slabperc {

using GeometryPtr = std::shared_ptr<const SlabGeometry>;

inline GeometryPtr make_geometry(int k, PlaneBox window) {
  return std::make_shared<const SlabGeometry>(k, window);
}

class LabelField {
 public:
  /// Explicit labels; every value must lie in [0,1].
  LabelField(GeometryPtr geometry, std::vector<double> labels, std::uint64_t seed = 0,
             std::uint64_t stream = 0);

  const SlabGeometry& geometry() const { return *geometry_; }
  const GeometryPtr& geometry_ptr() const { return geometry_; }
  std::span<const double> labels() const { return labels_; }
  double operator[](EdgeId e) const { return labels_[e]; }
  std::size_t size() const { return labels_.size(); }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Strict total order on edges: by label, ties broken by edge id.
  bool edge_less(EdgeId e, EdgeId f) const {
    return labels_[e] < labels_[f] || (labels_[e] == labels_[f] && e < f);
  }

  /// Copy with the labels of `edges` replaced.
  LabelField with_labels(std::span<const EdgeId> edges, std::span<const double> values) const;

  friend bool operator==(const LabelField& a, const LabelField& b) {
    return *a.geometry_ == *b.geometry_ && a.labels_ == b.labels_;
  }

 private:
  GeometryPtr geometry_;
  std::vector<double> labels_;
  std::uint64_t seed_;
  std::uint64_t stream_;
};

/// Writes the labels of (seed, stream) for every edge of `g` into `out`.
void fill_labels(const SlabGeometry& g, std::uint64_t seed, std::uint64_t stream,
                 std::span<double> out);

/// i.i.d. uniform labels, a pure function of (geometry, seed, stream).
LabelField sample_labels(GeometryPtr g, std::uint64_t seed, std::uint64_t stream);

class BondConfig {
 public:
  BondConfig(GeometryPtr geometry, std::vector<std::uint8_t> open,
             std::optional<double> density = std::nullopt);

  const SlabGeometry& geometry() const { return *geometry_; }
  const GeometryPtr& geometry_ptr() const { return geometry_; }
  bool is_open(EdgeId e) const { return open_[e] != 0; }
  std::span<const std::uint8_t> bits() const { return open_; }
  std::optional<double> density() const { return density_; }
  std::size_t size() const { return open_.size(); }
  std::size_t open_count() const;

  BondConfig with_edge(EdgeId e, bool open) const;

  static BondConfig all(GeometryPtr g, bool open);
  /// Configuration with exactly the listed edges open.
  static BondConfig from_open_edges(GeometryPtr g, std::span<const EdgeId> edges);

  friend bool operator==(const BondConfig& a, const BondConfig& b) {
    return *a.geometry_ == *b.geometry_ && a.open_ == b.open_;
  }

 private:
  GeometryPtr geometry_;
  std::vector<std::uint8_t> open_;
  std::optional<double> density_;
};

/// Edge open iff label < p.
BondConfig threshold(const LabelField& omega, double p);

/// omega(e) -> a * omega(e) on the listed edges; each becomes a-open.
LabelField affine_open(const LabelField& omega, std::span<const EdgeId> edges, double a);
/// omega(e) -> b + (1-b) * omega(e) on the listed edges; each becomes b-closed.
LabelField affine_close(const LabelField& omega, std::span<const EdgeId> edges, double b);
/// Inverse maps omega(e) -> omega(e)/a and omega(e) -> (omega(e)-b)/(1-b).
LabelField affine_open_inverse(const LabelField& omega, std::span<const EdgeId> edges, double a);
LabelField affine_close_inverse(const LabelField& omega, std::span<const EdgeId> edges, double b);

// Binary dump: "SLABLBL1", u32 version, i32 k, i32 x0,x1,y0,y1, u64 seed,
// u64 stream, u64 edge count, then little-endian IEEE-754 doubles by edge id.
void write_label_dump(std::ostream& out, const LabelField& omega);
LabelField read_label_dump(std::istream& in);

}  // namespace slabperc
