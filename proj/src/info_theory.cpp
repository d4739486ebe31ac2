#include "atomcover/info_theory.hpp"

#include <algorithm>
#include <cstddef>
#include <numeric>

#include "atomcover/error.hpp"

namespace atomcover {
namespace {

constexpr Eigen::Index kQueryTile = 32;
constexpr Eigen::Index kRefTile = 256;

void check_widths(const RowMatrix& a, const RowMatrix& b) {
  if (a.cols() != b.cols())
    throw InputError("descriptor widths differ: " + std::to_string(a.cols()) +
                     " vs " + std::to_string(b.cols()));
}

inline double squared_distance(const double* a, const double* b,
                               Eigen::Index width) {
  double sum = 0.0;
  for (Eigen::Index d = 0; d < width; ++d) {
    const double diff = a[d] - b[d];
    sum += diff * diff;
  }
  return sum;
}

}  // namespace

void KernelParams::validate() const {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw InputError("kernel bandwidth must be positive and finite");
}

void accumulate_log_kernels(const RowMatrix& set,
                            std::span<const std::size_t> rows,
                            const RowMatrix& refs, const KernelParams& kernel,
                            std::span<LogSumExp> acc) {
  kernel.validate();
  check_widths(set, refs);
  if (acc.size() != static_cast<std::size_t>(set.rows()))
    throw InputError("accumulator size does not match row count");

  const auto nq = static_cast<std::ptrdiff_t>(rows.size());
  const Eigen::Index nr = refs.rows();
  const Eigen::Index width = set.cols();
  const double scale = -0.5 / (kernel.bandwidth * kernel.bandwidth);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t q0 = 0; q0 < nq; q0 += kQueryTile) {
    const std::ptrdiff_t q1 = std::min<std::ptrdiff_t>(nq, q0 + kQueryTile);
    for (Eigen::Index r0 = 0; r0 < nr; r0 += kRefTile) {
      const Eigen::Index r1 = std::min(nr, r0 + kRefTile);
      for (std::ptrdiff_t q = q0; q < q1; ++q) {
        const std::size_t row = rows[static_cast<std::size_t>(q)];
        const double* qrow = set.data() + static_cast<Eigen::Index>(row) * width;
        LogSumExp& a = acc[row];
        for (Eigen::Index r = r0; r < r1; ++r)
          a.add(scale * squared_distance(qrow, refs.data() + r * width, width));
      }
    }
  }
}

void accumulate_log_kernels(const RowMatrix& queries, const RowMatrix& refs,
                            const KernelParams& kernel,
                            std::span<LogSumExp> acc) {
  std::vector<std::size_t> rows(static_cast<std::size_t>(queries.rows()));
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  accumulate_log_kernels(queries, rows, refs, kernel, acc);
}

double neg_log_kernel_sum(const Eigen::Ref<const Eigen::RowVectorXd>& query,
                          const RowMatrix& refs, const KernelParams& kernel) {
  if (refs.rows() == 0) throw InputError("empty reference set");
  RowMatrix q = query;
  LogSumExp acc;
  accumulate_log_kernels(q, refs, kernel, std::span<LogSumExp>(&acc, 1));
  return -acc.value();
}

std::vector<double> delta_entropy(const RowMatrix& queries,
                                  const RowMatrix& refs,
                                  const KernelParams& kernel) {
  if (refs.rows() == 0) throw InputError("empty reference set");
  std::vector<LogSumExp> acc(static_cast<std::size_t>(queries.rows()));
  accumulate_log_kernels(queries, refs, kernel, acc);
  std::vector<double> dh(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) dh[i] = -acc[i].value();
  return dh;
}

EntropyResult entropy(const RowMatrix& set, const KernelParams& kernel) {
  if (set.rows() == 0) throw InputError("entropy of an empty set");
  EntropyResult out;
  out.n_env = static_cast<std::size_t>(set.rows());
  out.per_point_dh = delta_entropy(set, set, kernel);
  const double log_n = std::log(static_cast<double>(out.n_env));
  double sum = 0.0;
  for (double dh : out.per_point_dh) sum += dh + log_n;
  out.entropy_nats = sum / static_cast<double>(out.n_env);
  return out;
}

double diversity_from_self_dh(std::span<const double> self_dh) {
  if (self_dh.empty()) throw InputError("diversity of an empty set");
  LogSumExp acc;
  for (double dh : self_dh) acc.add(dh);
  return acc.value();
}

double diversity(const RowMatrix& set, const KernelParams& kernel) {
  if (set.rows() == 0) throw InputError("diversity of an empty set");
  return diversity_from_self_dh(delta_entropy(set, set, kernel));
}

double overlap(const RowMatrix& queries, const RowMatrix& refs,
               const KernelParams& kernel) {
  if (queries.rows() == 0) throw InputError("overlap of an empty query set");
  const auto dh = delta_entropy(queries, refs, kernel);
  const auto contained =
      std::count_if(dh.begin(), dh.end(), [](double v) { return v <= 0.0; });
  return static_cast<double>(contained) / static_cast<double>(dh.size());
}

double efficiency(const RowMatrix& set, const KernelParams& kernel) {
  if (set.rows() < 2)
    throw InputError("efficiency needs at least two environments");
  return entropy(set, kernel).entropy_nats /
         std::log(static_cast<double>(set.rows()));
}

std::vector<double> per_structure_entropy(const DescriptorSet& descs,
                                          const KernelParams& kernel) {
  std::vector<double> out(descs.structure_count());
  for (std::size_t s = 0; s < out.size(); ++s) {
    const RowMatrix rows = descs.structure_rows(s);
    out[s] = entropy(rows, kernel).entropy_nats;
  }
  return out;
}

}  // namespace atomcover
