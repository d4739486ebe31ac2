#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "atomcover/descriptor.hpp"
#include "atomcover/info_theory.hpp"
#include "atomcover/report.hpp"
#include "atomcover/samplers.hpp"
#include "atomcover/structure.hpp"

namespace atomcover {

/// Empirical CDF of per-atom force magnitudes: cdf[t] is the fraction of
/// atoms with |F| strictly below thresholds[t].
struct ForceCdf {
  std::vector<double> thresholds;  // eV/Å, strictly ascending
  std::vector<double> cdf;
  double max_force = 0.0;  // largest |F| among the pooled atoms
  std::size_t atom_count = 0;
};

/// |F| of every atom of the selected structures, in selection order. Throws
/// InputError naming the first selected structure without forces.
std::vector<double> force_magnitudes(const Dataset& dataset,
                                     const std::vector<std::size_t>& selection);

ForceCdf force_cdf(const Dataset& dataset,
                   const std::vector<std::size_t>& selection,
                   std::span<const double> thresholds);

/// `points` thresholds evenly spaced from the 80th percentile of the
/// dataset's |F| (linear interpolation between order statistics) to its
/// maximum. Collapses to the single maximum when the two coincide.
std::vector<double> default_force_thresholds(const Dataset& dataset,
                                             std::size_t points = 256);

/// Counts of dH values in fixed-width bins over [lo, hi); values outside go
/// to the tail counters.
struct DeltaEntropyHistogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<std::size_t> counts;
  std::size_t below = 0;
  std::size_t above = 0;
};

DeltaEntropyHistogram histogram_delta_entropy(std::span<const double> dh,
                                              double lo = -20.0,
                                              double hi = 20.0,
                                              double bin_width = 0.5);

/// Figures of merit of a compressed dataset against its parent.
struct CompressionReport {
  std::size_t structures_full = 0;
  std::size_t structures_compressed = 0;
  std::size_t environments_full = 0;
  std::size_t environments_compressed = 0;
  double entropy_full = 0.0;
  double diversity_full = 0.0;
  double entropy = 0.0;
  double diversity = 0.0;
  double max_entropy = 0.0;  // log of the compressed environment count
  std::optional<double> efficiency;  // needs at least two environments
  /// Fraction of the full dataset's environments covered by the compressed
  /// set; the informative direction.
  double overlap_full_given_compressed = 0.0;
  /// Fraction of the compressed environments covered by the full set; 1 for
  /// any subset.
  double overlap_compressed_given_full = 0.0;
  DeltaEntropyHistogram delta_entropy_histogram;  // dH(full | compressed)
  std::size_t uncovered = 0;          // dH > 0
  std::size_t strongly_uncovered = 0;  // dH > 10
};

CompressionReport compression_report(const DescriptorSet& full,
                                     const std::vector<std::size_t>& selection,
                                     const KernelParams& kernel);

struct SweepRow {
  SamplerMethod method = SamplerMethod::kMsc;
  double fraction = 1.0;
  std::size_t count = 0;
  std::size_t environments = 0;
  double entropy = 0.0;
  double diversity = 0.0;
  double overlap = 0.0;  // full given compressed
  std::optional<double> efficiency;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // method-major, fractions ascending
};

/// Runs every method at every fraction with the same seed.
SweepResult compare_methods(const DescriptorSet& descs,
                            std::vector<double> fractions,
                            const std::vector<SamplerMethod>& methods,
                            std::uint64_t seed, const KernelParams& kernel);

MetricBlock to_metric_block(const CompressionReport& report,
                            const ReportParameters& params);
MetricBlock to_metric_block(const SweepResult& sweep,
                            const ReportParameters& params);
MetricBlock to_metric_block(const ForceCdf& cdf, const ReportParameters& params);

}  // namespace atomcover
