#include "atomcover/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <string>

#include "atomcover/error.hpp"

namespace atomcover {

void DescriptorParams::validate() const {
  if (k < 2) throw InputError("descriptor k must be at least 2");
  if (!(cutoff > 0.0) || !std::isfinite(cutoff))
    throw InputError("descriptor cutoff must be positive and finite");
}

RowMatrix DescriptorSet::gather(
    const std::vector<std::size_t>& structures) const {
  Eigen::Index rows = 0;
  for (auto s : structures) rows += static_cast<Eigen::Index>(offsets.at(s).length);
  RowMatrix out(rows, values.cols());
  Eigen::Index at = 0;
  for (auto s : structures) {
    const auto block = structure_rows(s);
    out.middleRows(at, block.rows()) = block;
    at += block.rows();
  }
  return out;
}

DescriptorSet DescriptorSet::subset(
    const std::vector<std::size_t>& structures) const {
  DescriptorSet out;
  out.params = params;
  out.values = gather(structures);
  std::size_t at = 0;
  for (auto s : structures) {
    out.offsets.push_back({at, offsets[s].length});
    at += offsets[s].length;
  }
  return out;
}

double cutoff_weight(double r, double cutoff) {
  if (r < 0.0 || std::isnan(r)) throw InputError("negative distance");
  if (r > cutoff) return 0.0;
  const double x = r / cutoff;
  const double t = 1.0 - x * x;
  return t * t;
}

Eigen::VectorXd compute_x1(const NeighborSet& nbrs,
                           const DescriptorParams& params) {
  Eigen::VectorXd x1 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(params.k));
  const std::size_t n = std::min(nbrs.valid_count, params.k);
  for (std::size_t j = 0; j < n; ++j) {
    const double r = nbrs.distances[j];
    if (r == 0.0)
      throw GeometryError("atom " + std::to_string(nbrs.center_index) +
                          " coincides with atom " +
                          std::to_string(nbrs.neighbor_atoms[j]));
    x1[static_cast<Eigen::Index>(j)] = cutoff_weight(r, params.cutoff) / r;
  }
  return x1;
}

Eigen::VectorXd compute_x2(const NeighborSet& nbrs,
                           const DescriptorParams& params) {
  const std::size_t k = params.k;
  Eigen::VectorXd x2 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k - 1));
  const std::size_t n = std::min(nbrs.valid_count, k);
  if (n < 2) return x2;

  std::vector<double> weights(n);
  for (std::size_t j = 0; j < n; ++j)
    weights[j] = cutoff_weight(nbrs.distances[j], params.cutoff);

  std::vector<double> terms(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t t = 0;
    for (std::size_t l = 0; l < n; ++l) {
      if (l == j) continue;
      const double r_jl =
          (nbrs.neighbor_positions[j] - nbrs.neighbor_positions[l]).norm();
      if (r_jl == 0.0)
        throw GeometryError("neighbors " + std::to_string(nbrs.neighbor_atoms[j]) +
                            " and " + std::to_string(nbrs.neighbor_atoms[l]) +
                            " of atom " + std::to_string(nbrs.center_index) +
                            " coincide");
      terms[t++] = std::sqrt(weights[j] * weights[l]) / r_jl;
    }
    std::sort(terms.begin(), terms.end(), std::greater<>());
    for (std::size_t rank = 0; rank < n - 1; ++rank)
      x2[static_cast<Eigen::Index>(rank)] += terms[rank];
  }
  x2.head(static_cast<Eigen::Index>(n - 1)) /= static_cast<double>(n);
  std::sort(x2.begin(), x2.end(), std::greater<>());
  return x2;
}

RowMatrix structure_descriptors(const Structure& s,
                                const DescriptorParams& params) {
  params.validate();
  const auto nbrs = nearest_neighbors(s, params.k, params.cutoff);
  const auto k = static_cast<Eigen::Index>(params.k);
  RowMatrix rows(static_cast<Eigen::Index>(s.size()), 2 * k - 1);
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    rows.row(r).head(k) = compute_x1(nbrs[i], params).transpose();
    rows.row(r).tail(k - 1) = compute_x2(nbrs[i], params).transpose();
  }
  return rows;
}

DescriptorSet build_descriptor_set(const Dataset& dataset,
                                   const DescriptorParams& params) {
  params.validate();
  DescriptorSet out;
  out.params = params;
  std::size_t total = 0;
  for (const auto& s : dataset.structures) {
    out.offsets.push_back({total, s.size()});
    total += s.size();
  }
  out.values.resize(static_cast<Eigen::Index>(total),
                    static_cast<Eigen::Index>(params.width()));

  std::vector<std::exception_ptr> failures(dataset.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t s = 0; s < dataset.size(); ++s) {
    try {
      out.values.middleRows(static_cast<Eigen::Index>(out.offsets[s].start),
                            static_cast<Eigen::Index>(out.offsets[s].length)) =
          structure_descriptors(dataset.structures[s], params);
    } catch (...) {
      failures[s] = std::current_exception();
    }
  }

  for (std::size_t s = 0; s < failures.size(); ++s) {
    if (!failures[s]) continue;
    const std::string where = "structure " + std::to_string(s) + ": ";
    try {
      std::rethrow_exception(failures[s]);
    } catch (const GeometryError& e) {
      throw GeometryError(where + e.what());
    } catch (const CellError& e) {
      throw CellError(where + e.what());
    } catch (const InputError& e) {
      throw InputError(where + e.what());
    }
  }
  return out;
}

}  // namespace atomcover
