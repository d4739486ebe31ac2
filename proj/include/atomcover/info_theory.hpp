#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "atomcover/descriptor.hpp"

namespace atomcover {

/// Gaussian kernel bandwidth in descriptor units (Å⁻¹).
struct KernelParams {
  double bandwidth = 0.015;

  void validate() const;
};

/// Running log(sum(exp(v))) that never overflows or underflows to -inf while
/// at least one finite term has been added.
struct LogSumExp {
  double max = -std::numeric_limits<double>::infinity();
  double scaled_sum = 0.0;  // sum of exp(v - max)

  void add(double v) {
    if (v <= max) {
      const double gap = v - max;
      if (gap > -745.0) scaled_sum += std::exp(gap);
    } else {
      scaled_sum = scaled_sum * std::exp(max - v) + 1.0;
      max = v;
    }
  }

  double value() const { return max + std::log(scaled_sum); }
};

/// Adds log K_h(q, r) for every reference row r to `acc[q]`, for every
/// query row q. References are visited in row order for each query, so the
/// result does not depend on the thread count.
void accumulate_log_kernels(const RowMatrix& queries, const RowMatrix& refs,
                            const KernelParams& kernel,
                            std::span<LogSumExp> acc);

/// Same as above for the listed rows of `set` only; `acc` is indexed by row
/// of `set` and entries of unlisted rows are left untouched.
void accumulate_log_kernels(const RowMatrix& set,
                            std::span<const std::size_t> rows,
                            const RowMatrix& refs, const KernelParams& kernel,
                            std::span<LogSumExp> acc);

/// -log sum_i exp(-|q - r_i|^2 / 2h^2), in nats.
double neg_log_kernel_sum(const Eigen::Ref<const Eigen::RowVectorXd>& query,
                          const RowMatrix& refs, const KernelParams& kernel);

/// Differential entropy of each query row with respect to `refs`.
std::vector<double> delta_entropy(const RowMatrix& queries,
                                  const RowMatrix& refs,
                                  const KernelParams& kernel);

struct EntropyResult {
  double entropy_nats = 0.0;
  std::size_t n_env = 0;
  /// dH(X_i | set) for each row, self term included.
  std::vector<double> per_point_dh;
};

/// Kernel-density information entropy of a set of rows, self term included.
EntropyResult entropy(const RowMatrix& set, const KernelParams& kernel);

/// log sum_i exp(dH(X_i | set)); approximates the support size in nats.
double diversity(const RowMatrix& set, const KernelParams& kernel);

/// Diversity from precomputed self differential entropies.
double diversity_from_self_dh(std::span<const double> self_dh);

/// Fraction of query rows with dH(query | refs) <= 0.
double overlap(const RowMatrix& queries, const RowMatrix& refs,
               const KernelParams& kernel);

/// Entropy divided by log N. Requires N >= 2.
double efficiency(const RowMatrix& set, const KernelParams& kernel);

/// Entropy of each structure's own rows, computed independently.
std::vector<double> per_structure_entropy(const DescriptorSet& descs,
                                          const KernelParams& kernel);

}  // namespace atomcover
