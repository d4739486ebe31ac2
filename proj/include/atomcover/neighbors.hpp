#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <vector>

#include "atomcover/structure.hpp"

namespace atomcover {

using LatticeOffset = std::array<int, 3>;

/// Periodic images of a structure's atoms laid out for a radius query.
///
/// `offsets[p]` is the lattice translation applied to the *original*
/// (unwrapped) position of atom `atoms[p]`, so
/// `points[p] == positions[atoms[p]] + offsets[p] * cell` up to rounding.
struct ImageSet {
  std::vector<Vec3> points;
  std::vector<std::size_t> atoms;
  std::vector<LatticeOffset> offsets;
  /// Images per direction on each side of the home cell (0 if aperiodic).
  std::array<int, 3> extent{0, 0, 0};
};

/// Replicates the structure so every image within `search_radius` of any
/// point of the home cell is present exactly once.
ImageSet replicate_for_search(const Structure& s, double search_radius);

inline constexpr double kMissingNeighbor =
    std::numeric_limits<double>::infinity();

/// The k nearest neighbors of one atom, nearest first.
///
/// Slots at and after `valid_count` are padding: distance is
/// `kMissingNeighbor` and the position is the center's own.
struct NeighborSet {
  std::size_t center_index = 0;
  std::vector<double> distances;
  std::vector<Vec3> neighbor_positions;
  std::vector<std::size_t> neighbor_atoms;
  std::vector<LatticeOffset> neighbor_offsets;
  std::size_t valid_count = 0;
};

/// Exact k nearest periodic images for every atom of `s`.
///
/// The atom's own zero-offset image is excluded; other images of the same
/// atom count as neighbors. The search starts at `search_radius` and widens
/// for periodic structures until k images are found, so results do not
/// depend on how many images a particular cell shape happens to need.
/// Aperiodic structures with fewer than k+1 atoms yield `valid_count < k`.
/// Distances that agree to 1e-9 Å are ordered by the displacement in lattice
/// coordinates (lexicographic, periodic structures only), then atom index and
/// offset.
std::vector<NeighborSet> nearest_neighbors(const Structure& s, std::size_t k,
                                           double search_radius);

}  // namespace atomcover
