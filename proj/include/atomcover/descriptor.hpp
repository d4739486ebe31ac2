#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "atomcover/neighbors.hpp"
#include "atomcover/structure.hpp"

namespace atomcover {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct DescriptorParams {
  std::size_t k = 32;
  double cutoff = 5.0;  // Å

  void validate() const;
  std::size_t width() const { return 2 * k - 1; }
};

/// Rows [start, start + length) of a DescriptorSet belong to one structure.
struct StructureSpan {
  std::size_t start = 0;
  std::size_t length = 0;

  friend bool operator==(const StructureSpan&, const StructureSpan&) = default;
};

/// Per-environment descriptors for a whole dataset, one row per atom in
/// structure order. Units are Å⁻¹.
struct DescriptorSet {
  RowMatrix values;
  std::vector<StructureSpan> offsets;
  DescriptorParams params;

  std::size_t environment_count() const {
    return static_cast<std::size_t>(values.rows());
  }
  std::size_t structure_count() const { return offsets.size(); }

  /// Rows of structure `s`.
  auto structure_rows(std::size_t s) const {
    return values.middleRows(static_cast<Eigen::Index>(offsets.at(s).start),
                             static_cast<Eigen::Index>(offsets.at(s).length));
  }

  /// Rows of the given structures, concatenated in the given order.
  RowMatrix gather(const std::vector<std::size_t>& structures) const;

  /// The sub-dataset made of the given structures, in the given order.
  DescriptorSet subset(const std::vector<std::size_t>& structures) const;
};

/// Smooth cutoff (1 - (r/r_c)^2)^2 inside the cutoff, 0 outside.
double cutoff_weight(double r, double cutoff);

/// Two-body block: w(r)/r for each neighbor in ascending distance order.
/// Padding slots are 0.
Eigen::VectorXd compute_x1(const NeighborSet& nbrs,
                           const DescriptorParams& params);

/// Three-body block of length k-1.
///
/// For each valid neighbor j the terms sqrt(w(r_ij) w(r_il)) / r_jl over the
/// other valid neighbors l are sorted in descending order; the n-th output
/// entry is the mean of the n-th terms over all valid neighbors j. Ranks
/// that no neighbor reaches are 0. The result is non-increasing.
Eigen::VectorXd compute_x2(const NeighborSet& nbrs,
                           const DescriptorParams& params);

/// Descriptor rows (x1 followed by x2) for every atom of `s`.
RowMatrix structure_descriptors(const Structure& s,
                                const DescriptorParams& params);

/// Descriptors for every atom of every structure. Geometry errors are
/// rethrown with the structure index; the lowest failing index wins.
DescriptorSet build_descriptor_set(const Dataset& dataset,
                                   const DescriptorParams& params);

}  // namespace atomcover
