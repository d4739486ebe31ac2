#include "atomcover/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <tuple>

#include <Eigen/LU>

#include "atomcover/error.hpp"

namespace atomcover {
namespace {

constexpr int kMaxWidenings = 24;
// Distances equal to within this resolution (Å) are considered tied.
constexpr double kDistanceQuantum = 1e-9;

struct Candidate {
  std::int64_t quantized;
  // Ties are broken by the displacement in lattice coordinates, so
  // equivalent atoms of a crystal keep equivalent neighbor shells no matter
  // how the atoms are numbered, and a rigid rotation changes nothing.
  // Index and offset settle the rest (and all ties of aperiodic structures).
  std::array<std::int64_t, 3> direction;
  std::size_t atom;
  LatticeOffset offset;
  double distance;
  Vec3 displacement;

  friend bool operator<(const Candidate& a, const Candidate& b) {
    return std::tie(a.quantized, a.direction, a.atom, a.offset) <
           std::tie(b.quantized, b.direction, b.atom, b.offset);
  }
};

void check_radius(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw InputError("search radius must be positive and finite");
}

Vec3 offset_vector(const LatticeOffset& o, const Mat3& cell) {
  return o[0] * Vec3(cell.row(0)) + o[1] * Vec3(cell.row(1)) +
         o[2] * Vec3(cell.row(2));
}

// Integer lattice shift that brings each atom into the home cell along the
// periodic directions.
std::vector<LatticeOffset> home_cell_shifts(const Structure& s) {
  std::vector<LatticeOffset> shifts(s.size(), LatticeOffset{0, 0, 0});
  if (!s.any_periodic()) return shifts;
  const Mat3 inverse = s.cell.inverse();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Eigen::RowVector3d frac = s.positions.row(i) * inverse;
    for (int d = 0; d < 3; ++d)
      if (s.pbc[d]) shifts[i][d] = static_cast<int>(std::floor(frac[d]));
  }
  return shifts;
}

// Uniform grid over image points with cubic bins of edge `edge`.
class PointGrid {
 public:
  PointGrid(const std::vector<Vec3>& points, double edge)
      : edge_(edge) {
    origin_ = Vec3::Constant(std::numeric_limits<double>::max());
    Vec3 corner = Vec3::Constant(std::numeric_limits<double>::lowest());
    for (const auto& p : points) {
      origin_ = origin_.cwiseMin(p);
      corner = corner.cwiseMax(p);
    }
    // Keep bin indices inside the packed-key range.
    edge_ = std::max(edge_, (corner - origin_).maxCoeff() / 1e6);
    entries_.reserve(points.size());
    for (std::size_t p = 0; p < points.size(); ++p)
      entries_.push_back({key(bin_of(points[p])), p});
    std::sort(entries_.begin(), entries_.end());
  }

  template <typename Visit>
  void for_each_near(const Vec3& center, Visit&& visit) const {
    const auto c = bin_of(center);
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy)
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          const std::array<std::int64_t, 3> b{c[0] + dx, c[1] + dy, c[2] + dz};
          if (b[0] < 0 || b[1] < 0 || b[2] < 0) continue;
          const std::int64_t k = key(b);
          auto it = std::lower_bound(entries_.begin(), entries_.end(),
                                     std::pair<std::int64_t, std::size_t>{k, 0});
          for (; it != entries_.end() && it->first == k; ++it)
            visit(it->second);
        }
  }

 private:
  std::array<std::int64_t, 3> bin_of(const Vec3& p) const {
    std::array<std::int64_t, 3> b{};
    for (int d = 0; d < 3; ++d)
      b[d] = static_cast<std::int64_t>(std::floor((p[d] - origin_[d]) / edge_));
    return b;
  }

  static std::int64_t key(const std::array<std::int64_t, 3>& b) {
    constexpr std::int64_t kSpan = std::int64_t{1} << 21;
    return b[0] + kSpan * (b[1] + kSpan * b[2]);
  }

  double edge_;
  Vec3 origin_;
  std::vector<std::pair<std::int64_t, std::size_t>> entries_;
};

NeighborSet make_neighbor_set(const Structure& s, std::size_t center,
                              std::vector<Candidate>& found, std::size_t k) {
  const std::size_t take = std::min(k, found.size());
  std::partial_sort(found.begin(), found.begin() + take, found.end());

  NeighborSet out;
  out.center_index = center;
  out.valid_count = take;
  out.distances.assign(k, kMissingNeighbor);
  out.neighbor_positions.assign(k, Vec3(s.positions.row(center)));
  out.neighbor_atoms.assign(k, center);
  out.neighbor_offsets.assign(k, LatticeOffset{0, 0, 0});
  for (std::size_t n = 0; n < take; ++n) {
    const auto& c = found[n];
    out.distances[n] = c.distance;
    out.neighbor_positions[n] = Vec3(s.positions.row(center)) + c.displacement;
    out.neighbor_atoms[n] = c.atom;
    out.neighbor_offsets[n] = c.offset;
  }
  return out;
}

Candidate make_candidate(const Structure& s, const std::optional<Mat3>& to_lattice,
                         std::size_t center, std::size_t atom,
                         const LatticeOffset& offset) {
  Vec3 disp = Vec3(s.positions.row(atom)) - Vec3(s.positions.row(center));
  if (offset != LatticeOffset{0, 0, 0}) disp += offset_vector(offset, s.cell);
  const double d = disp.norm();
  std::array<std::int64_t, 3> direction{0, 0, 0};
  if (to_lattice) {
    const Eigen::RowVector3d frac = disp.transpose() * *to_lattice;
    for (int c = 0; c < 3; ++c)
      direction[c] = std::llround(frac[c] / kDistanceQuantum);
  }
  return {std::llround(d / kDistanceQuantum), direction, atom, offset, d, disp};
}

}  // namespace

ImageSet replicate_for_search(const Structure& s, double search_radius) {
  validate(s);
  check_radius(search_radius);

  ImageSet images;
  if (s.any_periodic()) {
    const Vec3 heights = cell_heights(s.cell);
    for (int d = 0; d < 3; ++d)
      if (s.pbc[d])
        images.extent[d] =
            static_cast<int>(std::ceil(search_radius / heights[d])) + 1;
  }
  const auto shifts = home_cell_shifts(s);
  const auto& e = images.extent;
  const std::size_t per_atom = static_cast<std::size_t>(2 * e[0] + 1) *
                               (2 * e[1] + 1) * (2 * e[2] + 1);
  images.points.reserve(per_atom * s.size());
  images.atoms.reserve(per_atom * s.size());
  images.offsets.reserve(per_atom * s.size());

  for (std::size_t j = 0; j < s.size(); ++j) {
    for (int a = -e[0]; a <= e[0]; ++a)
      for (int b = -e[1]; b <= e[1]; ++b)
        for (int c = -e[2]; c <= e[2]; ++c) {
          const LatticeOffset off{a - shifts[j][0], b - shifts[j][1],
                                  c - shifts[j][2]};
          images.points.push_back(Vec3(s.positions.row(j)) +
                                  offset_vector(off, s.cell));
          images.atoms.push_back(j);
          images.offsets.push_back(off);
        }
  }
  return images;
}

std::vector<NeighborSet> nearest_neighbors(const Structure& s, std::size_t k,
                                           double search_radius) {
  validate(s);
  check_radius(search_radius);
  if (k < 1) throw InputError("neighbor count k must be at least 1");

  const auto shifts = home_cell_shifts(s);
  std::vector<NeighborSet> result(s.size());
  std::vector<std::size_t> pending(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) pending[i] = i;

  std::optional<Mat3> to_lattice;
  if (s.any_periodic() && std::abs(s.cell.determinant()) > 1e-12)
    to_lattice = s.cell.inverse();

  double radius = search_radius;
  for (int round = 0; !pending.empty(); ++round) {
    if (round > kMaxWidenings)
      throw InputError("neighbor search did not converge");
    const ImageSet images = replicate_for_search(s, radius);
    const PointGrid grid(images.points, radius);
    std::vector<char> done(pending.size(), 0);

    // Schedule is irrelevant for the result: each center writes only its own
    // slot.
#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t q = 0; q < pending.size(); ++q) {
      const std::size_t i = pending[q];
      const Vec3 home = Vec3(s.positions.row(i)) -
                        offset_vector(shifts[i], s.cell);
      std::vector<Candidate> found;
      grid.for_each_near(home, [&](std::size_t p) {
        if ((images.points[p] - home).norm() > radius) return;
        LatticeOffset off = images.offsets[p];
        for (int d = 0; d < 3; ++d) off[d] += shifts[i][d];
        const std::size_t j = images.atoms[p];
        if (j == i && off == LatticeOffset{0, 0, 0}) return;
        found.push_back(make_candidate(s, to_lattice, i, j, off));
      });

      if (found.size() < k && !s.any_periodic()) {
        // Every atom is already a candidate once the radius is exhausted.
        found.clear();
        for (std::size_t j = 0; j < s.size(); ++j)
          if (j != i) found.push_back(make_candidate(s, to_lattice, i, j, {0, 0, 0}));
      }
      if (found.size() >= k || !s.any_periodic()) {
        result[i] = make_neighbor_set(s, i, found, k);
        done[q] = 1;
      }
    }

    std::vector<std::size_t> next;
    for (std::size_t q = 0; q < pending.size(); ++q)
      if (!done[q]) next.push_back(pending[q]);
    pending = std::move(next);
    radius *= 2.0;
  }
  return result;
}

}  // namespace atomcover
