#include "slabperc/labels.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "slabperc/rng.hpp"

namespace slabperc {

LabelField::LabelField(GeometryPtr geometry, std::vector<double> labels, std::uint64_t seed,
                       std::uint64_t stream)
    : geometry_(std::move(geometry)), labels_(std::move(labels)), seed_(seed), stream_(stream) {
  if (!geometry_) throw DomainError("label field without geometry");
  if (labels_.size() != geometry_->edge_count())
    throw DomainError("label count does not match edge count");
  for (double w : labels_)
    if (!(w >= 0.0 && w <= 1.0)) throw DomainError("labels must lie in [0,1]");
}

LabelField LabelField::with_labels(std::span<const EdgeId> edges,
                                   std::span<const double> values) const {
  if (edges.size() != values.size()) throw DomainError("edge/value count mismatch");
  std::vector<double> next = labels_;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i] >= next.size()) throw DomainError("edge id outside geometry");
    next[edges[i]] = values[i];
  }
  return LabelField(geometry_, std::move(next), seed_, stream_);
}

void fill_labels(const SlabGeometry& g, std::uint64_t seed, std::uint64_t stream,
                 std::span<double> out) {
  const std::uint64_t key = stream_key(seed, stream);
  const auto edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Vertex a = g.vertex(edges[e].u);
    out[e] = edge_uniform(key, a.x, a.y, a.z, static_cast<int>(edges[e].dir));
  }
}

LabelField sample_labels(GeometryPtr g, std::uint64_t seed, std::uint64_t stream) {
  std::vector<double> labels(g->edge_count());
  fill_labels(*g, seed, stream, labels);
  return LabelField(std::move(g), std::move(labels), seed, stream);
}

// ---------------------------------------------------------------------------

BondConfig::BondConfig(GeometryPtr geometry, std::vector<std::uint8_t> open,
                       std::optional<double> density)
    : geometry_(std::move(geometry)), open_(std::move(open)), density_(density) {
  if (!geometry_) throw DomainError("configuration without geometry");
  if (open_.size() != geometry_->edge_count())
    throw DomainError("bit count does not match edge count");
}

std::size_t BondConfig::open_count() const {
  return static_cast<std::size_t>(std::count(open_.begin(), open_.end(), std::uint8_t{1}));
}

BondConfig BondConfig::with_edge(EdgeId e, bool open) const {
  std::vector<std::uint8_t> next = open_;
  next.at(e) = open ? 1 : 0;
  return BondConfig(geometry_, std::move(next));
}

BondConfig BondConfig::all(GeometryPtr g, bool open) {
  const std::size_t n = g->edge_count();
  return BondConfig(std::move(g), std::vector<std::uint8_t>(n, open ? 1 : 0),
                    open ? 1.0 : 0.0);
}

BondConfig BondConfig::from_open_edges(GeometryPtr g, std::span<const EdgeId> edges) {
  std::vector<std::uint8_t> bits(g->edge_count(), 0);
  for (EdgeId e : edges) bits.at(e) = 1;
  return BondConfig(std::move(g), std::move(bits));
}

BondConfig threshold(const LabelField& omega, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("threshold p must lie in [0,1]");
  const auto labels = omega.labels();
  std::vector<std::uint8_t> bits(labels.size());
  for (std::size_t e = 0; e < labels.size(); ++e) bits[e] = labels[e] < p ? 1 : 0;
  return BondConfig(omega.geometry_ptr(), std::move(bits), p);
}

namespace {

void check_unit_open(double a, const char* name) {
  if (!(a > 0.0 && a < 1.0)) throw DomainError(std::string(name) + " must lie in (0,1)");
}

template <class Map>
LabelField map_edges(const LabelField& omega, std::span<const EdgeId> edges, Map map) {
  std::vector<double> next(omega.labels().begin(), omega.labels().end());
  for (EdgeId e : edges) {
    if (e >= next.size()) throw DomainError("edge id outside geometry");
    next[e] = map(omega[e]);
  }
  return LabelField(omega.geometry_ptr(), std::move(next), omega.seed(), omega.stream());
}

}  // namespace

LabelField affine_open(const LabelField& omega, std::span<const EdgeId> edges, double a) {
  check_unit_open(a, "a");
  return map_edges(omega, edges, [a](double w) { return a * w; });
}

LabelField affine_close(const LabelField& omega, std::span<const EdgeId> edges, double b) {
  check_unit_open(b, "b");
  return map_edges(omega, edges, [b](double w) { return b + (1.0 - b) * w; });
}

LabelField affine_open_inverse(const LabelField& omega, std::span<const EdgeId> edges, double a) {
  check_unit_open(a, "a");
  return map_edges(omega, edges, [a](double w) { return std::min(1.0, w / a); });
}

LabelField affine_close_inverse(const LabelField& omega, std::span<const EdgeId> edges,
                                double b) {
  check_unit_open(b, "b");
  return map_edges(omega, edges, [b](double w) { return std::max(0.0, (w - b) / (1.0 - b)); });
}

// ---------------------------------------------------------------------------
// Binary dump

namespace {

constexpr std::array<char, 8> kMagic = {'S', 'L', 'A', 'B', 'L', 'B', 'L', '1'};
constexpr std::uint32_t kDumpVersion = 1;

template <class T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes{};
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
  if (!in) throw DomainError("truncated label dump");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_label_dump(std::ostream& out, const LabelField& omega) {
  const SlabGeometry& g = omega.geometry();
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kDumpVersion);
  put_le<std::int32_t>(out, g.thickness());
  put_le<std::int32_t>(out, g.window().x0);
  put_le<std::int32_t>(out, g.window().x1);
  put_le<std::int32_t>(out, g.window().y0);
  put_le<std::int32_t>(out, g.window().y1);
  put_le<std::uint64_t>(out, omega.seed());
  put_le<std::uint64_t>(out, omega.stream());
  put_le<std::uint64_t>(out, omega.size());
  for (double w : omega.labels()) put_le<double>(out, w);
}

LabelField read_label_dump(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw DomainError("not a label dump");
  if (get_le<std::uint32_t>(in) != kDumpVersion) throw DomainError("unsupported dump version");
  const int k = get_le<std::int32_t>(in);
  PlaneBox w;
  w.x0 = get_le<std::int32_t>(in);
  w.x1 = get_le<std::int32_t>(in);
  w.y0 = get_le<std::int32_t>(in);
  w.y1 = get_le<std::int32_t>(in);
  const auto seed = get_le<std::uint64_t>(in);
  const auto stream = get_le<std::uint64_t>(in);
  const auto count = get_le<std::uint64_t>(in);
  auto g = make_geometry(k, w);
  if (count != g->edge_count()) throw DomainError("dump edge count does not match geometry");
  std::vector<double> labels(count);
  for (auto& v : labels) v = get_le<double>(in);
  return LabelField(std::move(g), std::move(labels), seed, stream);
}

}  // namespace slabperc
