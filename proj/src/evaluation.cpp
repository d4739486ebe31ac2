#include "atomcover/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "atomcover/error.hpp"

namespace atomcover {
namespace {

using nlohmann::ordered_json;

std::vector<std::size_t> sorted_copy(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  return v;
}

void check_selection(const std::vector<std::size_t>& selection, std::size_t n) {
  if (selection.empty()) throw InputError("empty selection");
  std::vector<char> seen(n, 0);
  for (auto s : selection) {
    if (s >= n) throw InputError("selection index " + std::to_string(s) + " out of range");
    if (seen[s]) throw InputError("selection index " + std::to_string(s) + " repeated");
    seen[s] = 1;
  }
}

ordered_json optional_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

std::vector<double> force_magnitudes(const Dataset& dataset,
                                     const std::vector<std::size_t>& selection) {
  std::vector<double> out;
  for (auto s : selection) {
    if (s >= dataset.size())
      throw InputError("selection index " + std::to_string(s) + " out of range");
    const auto& st = dataset.structures[s];
    if (!st.forces)
      throw InputError("structure " + std::to_string(s) + " has no forces");
    for (Eigen::Index a = 0; a < st.forces->rows(); ++a)
      out.push_back(st.forces->row(a).norm());
  }
  return out;
}

ForceCdf force_cdf(const Dataset& dataset,
                   const std::vector<std::size_t>& selection,
                   std::span<const double> thresholds) {
  for (std::size_t t = 1; t < thresholds.size(); ++t)
    if (!(thresholds[t] > thresholds[t - 1]))
      throw InputError("force thresholds must be strictly ascending");

  auto magnitudes = force_magnitudes(dataset, selection);
  if (magnitudes.empty()) throw InputError("no atoms selected");
  std::sort(magnitudes.begin(), magnitudes.end());

  ForceCdf out;
  out.thresholds.assign(thresholds.begin(), thresholds.end());
  out.atom_count = magnitudes.size();
  out.max_force = magnitudes.back();
  for (double t : thresholds) {
    const auto below = std::lower_bound(magnitudes.begin(), magnitudes.end(), t) -
                       magnitudes.begin();
    out.cdf.push_back(static_cast<double>(below) /
                      static_cast<double>(magnitudes.size()));
  }
  return out;
}

std::vector<double> default_force_thresholds(const Dataset& dataset,
                                             std::size_t points) {
  if (points < 2) throw InputError("need at least two threshold points");
  std::vector<std::size_t> all(dataset.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  auto magnitudes = force_magnitudes(dataset, all);
  if (magnitudes.empty()) throw InputError("dataset has no atoms");
  std::sort(magnitudes.begin(), magnitudes.end());

  const double pos = 0.8 * static_cast<double>(magnitudes.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, magnitudes.size() - 1);
  const double start =
      magnitudes[lo] + (pos - static_cast<double>(lo)) * (magnitudes[hi] - magnitudes[lo]);
  const double stop = magnitudes.back();
  if (!(stop > start)) return {stop};

  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i)
    out[i] = start + (stop - start) * static_cast<double>(i) /
                         static_cast<double>(points - 1);
  out.back() = stop;
  return out;
}

DeltaEntropyHistogram histogram_delta_entropy(std::span<const double> dh,
                                              double lo, double hi,
                                              double bin_width) {
  if (!(hi > lo) || !(bin_width > 0.0)) throw InputError("bad histogram range");
  const auto bins = static_cast<std::size_t>(std::llround((hi - lo) / bin_width));
  DeltaEntropyHistogram h;
  h.counts.assign(bins, 0);
  for (std::size_t b = 0; b <= bins; ++b)
    h.edges.push_back(lo + bin_width * static_cast<double>(b));
  for (double v : dh) {
    if (v < lo) {
      ++h.below;
    } else if (v >= hi) {
      ++h.above;
    } else {
      auto b = static_cast<std::size_t>(std::floor((v - lo) / bin_width));
      b = std::min(b, bins - 1);
      // Guard against rounding putting v one bin off its edges.
      if (v < h.edges[b]) --b;
      if (b + 1 < bins && v >= h.edges[b + 1]) ++b;
      ++h.counts[b];
    }
  }
  return h;
}

CompressionReport compression_report(const DescriptorSet& full,
                                     const std::vector<std::size_t>& selection,
                                     const KernelParams& kernel) {
  check_selection(selection, full.structure_count());
  // Metrics do not depend on selection order; a canonical order makes them
  // bit-identical for equal sets.
  const RowMatrix compressed = full.gather(sorted_copy(selection));

  CompressionReport r;
  r.structures_full = full.structure_count();
  r.structures_compressed = selection.size();
  r.environments_full = full.environment_count();
  r.environments_compressed = static_cast<std::size_t>(compressed.rows());

  const auto full_entropy = entropy(full.values, kernel);
  r.entropy_full = full_entropy.entropy_nats;
  r.diversity_full = diversity_from_self_dh(full_entropy.per_point_dh);

  const auto own = entropy(compressed, kernel);
  r.entropy = own.entropy_nats;
  r.diversity = diversity_from_self_dh(own.per_point_dh);
  r.max_entropy = std::log(static_cast<double>(r.environments_compressed));
  if (r.environments_compressed >= 2) r.efficiency = r.entropy / r.max_entropy;

  const auto dh = delta_entropy(full.values, compressed, kernel);
  const auto contained = std::count_if(dh.begin(), dh.end(),
                                       [](double v) { return v <= 0.0; });
  r.overlap_full_given_compressed =
      static_cast<double>(contained) / static_cast<double>(dh.size());
  r.overlap_compressed_given_full = overlap(compressed, full.values, kernel);
  r.delta_entropy_histogram = histogram_delta_entropy(dh);
  r.uncovered = static_cast<std::size_t>(
      std::count_if(dh.begin(), dh.end(), [](double v) { return v > 0.0; }));
  r.strongly_uncovered = static_cast<std::size_t>(
      std::count_if(dh.begin(), dh.end(), [](double v) { return v > 10.0; }));
  return r;
}

SweepResult compare_methods(const DescriptorSet& descs,
                            std::vector<double> fractions,
                            const std::vector<SamplerMethod>& methods,
                            std::uint64_t seed, const KernelParams& kernel) {
  if (fractions.empty() || methods.empty())
    throw InputError("sweep needs at least one fraction and one method");
  std::sort(fractions.begin(), fractions.end());
  fractions.erase(std::unique(fractions.begin(), fractions.end()), fractions.end());

  SweepResult sweep;
  for (auto method : methods) {
    for (double fraction : fractions) {
      SamplerConfig config;
      config.method = method;
      config.target_count = fraction_to_count(fraction, descs.structure_count());
      config.seed = seed;
      config.kernel = kernel;
      config.descriptor = descs.params;
      const auto result = run_sampler(descs, config);

      const RowMatrix compressed = descs.gather(sorted_copy(result.selected));
      const auto own = entropy(compressed, kernel);
      SweepRow row;
      row.method = method;
      row.fraction = fraction;
      row.count = config.target_count;
      row.environments = static_cast<std::size_t>(compressed.rows());
      row.entropy = own.entropy_nats;
      row.diversity = diversity_from_self_dh(own.per_point_dh);
      row.overlap = overlap(descs.values, compressed, kernel);
      if (row.environments >= 2)
        row.efficiency =
            row.entropy / std::log(static_cast<double>(row.environments));
      sweep.rows.push_back(row);
    }
  }
  return sweep;
}

MetricBlock to_metric_block(const CompressionReport& r,
                            const ReportParameters& params) {
  MetricBlock block;
  block.name = "compression";
  block.parameters = params;
  auto& v = block.values;
  v["structures_full"] = r.structures_full;
  v["structures_compressed"] = r.structures_compressed;
  v["environments_full"] = r.environments_full;
  v["environments_compressed"] = r.environments_compressed;
  v["entropy_full_nats"] = r.entropy_full;
  v["diversity_full_nats"] = r.diversity_full;
  v["entropy_nats"] = r.entropy;
  v["diversity_nats"] = r.diversity;
  v["max_entropy_nats"] = r.max_entropy;
  v["efficiency"] = optional_json(r.efficiency);
  v["overlap_full_given_compressed"] = r.overlap_full_given_compressed;
  v["overlap_compressed_given_full"] = r.overlap_compressed_given_full;
  v["uncovered_environments"] = r.uncovered;
  v["environments_dh_above_10"] = r.strongly_uncovered;
  const auto& h = r.delta_entropy_histogram;
  v["delta_entropy_histogram"] = {{"edges", h.edges},
                                  {"counts", h.counts},
                                  {"below", h.below},
                                  {"above", h.above}};
  return block;
}

MetricBlock to_metric_block(const SweepResult& sweep,
                            const ReportParameters& params) {
  MetricBlock block;
  block.name = "sweep";
  block.parameters = params;
  Table t;
  t.columns = {"method",       "fraction",     "count",   "environments",
               "entropy_nats", "diversity_nats", "overlap", "efficiency"};
  for (const auto& row : sweep.rows) {
    t.rows.push_back({std::string(to_string(row.method)), row.fraction,
                      static_cast<std::int64_t>(row.count),
                      static_cast<std::int64_t>(row.environments), row.entropy,
                      row.diversity, row.overlap,
                      row.efficiency ? TableCell(*row.efficiency)
                                     : TableCell(std::string())});
  }
  block.values["rows"] = sweep.rows.size();
  block.table = std::move(t);
  return block;
}

MetricBlock to_metric_block(const ForceCdf& cdf, const ReportParameters& params) {
  MetricBlock block;
  block.name = "force_cdf";
  block.parameters = params;
  block.values["atoms"] = cdf.atom_count;
  block.values["max_force"] = cdf.max_force;
  Table t;
  t.columns = {"threshold", "cdf"};
  for (std::size_t i = 0; i < cdf.thresholds.size(); ++i)
    t.rows.push_back({cdf.thresholds[i], cdf.cdf[i]});
  block.table = std::move(t);
  return block;
}

}  // namespace atomcover
