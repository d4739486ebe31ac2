#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "atomcover/descriptor.hpp"
#include "atomcover/info_theory.hpp"

namespace atomcover {

enum class SamplerMethod { kRandom, kKMeans, kFps, kMsc };

std::string_view to_string(SamplerMethod m);
/// Accepts "random", "kmeans", "fps", "msc". Throws InputError otherwise.
SamplerMethod parse_sampler_method(std::string_view name);

/// Structure count for a fraction in (0, 1]: round half away from zero,
/// never below 1.
std::size_t fraction_to_count(double fraction, std::size_t n_structures);

struct SamplerConfig {
  SamplerMethod method = SamplerMethod::kMsc;
  std::size_t target_count = 1;
  std::uint64_t seed = 0;
  KernelParams kernel;
  DescriptorParams descriptor;
};

/// Diagnostics for one greedy step of the set-cover sampler.
struct MscStep {
  std::size_t structure = 0;
  double score = 0.0;
  /// Largest dH of the structure's environments against the selection so
  /// far; NaN for the first pick, which is made on entropy alone.
  double max_delta_entropy = 0.0;
  double structure_entropy = 0.0;
};

struct CompressionResult {
  std::vector<std::size_t> selected;  // in selection order
  std::vector<MscStep> msc_steps;     // filled by the set-cover sampler only
};

CompressionResult sample_random(std::size_t n_structures, std::size_t count,
                                std::uint64_t seed);

/// Arithmetic mean of each structure's descriptor rows.
RowMatrix structure_means(const DescriptorSet& descs);

/// Lloyd's k-means on structure means (k-means++ seeding, at most 300
/// iterations), then one random member per cluster.
CompressionResult sample_kmeans(const DescriptorSet& descs, std::size_t count,
                                std::uint64_t seed);

/// Farthest-point sampling on structure means: a seeded random first pick,
/// then repeatedly the structure with the largest summed Euclidean distance
/// to everything selected. Ties go to the lowest index.
CompressionResult sample_fps(const DescriptorSet& descs, std::size_t count,
                             std::uint64_t seed);

/// Same as sample_fps with the first pick given explicitly.
CompressionResult sample_fps_from(const RowMatrix& means, std::size_t count,
                                  std::size_t first);

/// Greedy set cover over environments.
///
/// Starts from the structure of highest entropy, then repeatedly adds the
/// unselected structure maximizing
///   max_j dH(X_j | selected environments) + H(structure),
/// with ties going to the lowest index. Kernel sums against the selection are
/// accumulated incrementally, one added structure at a time.
class MscSelector {
 public:
  MscSelector(const DescriptorSet& descs, const KernelParams& kernel);

  /// Picks the next structure and returns its diagnostics. Throws
  /// InputError when every structure is already selected.
  MscStep step();

  const std::vector<std::size_t>& selected() const { return selected_; }
  const std::vector<double>& structure_entropies() const { return entropies_; }
  bool is_selected(std::size_t s) const { return taken_[s] != 0; }

  /// dH of environment `env` (a row of the descriptor set) against all
  /// environments selected so far. Only meaningful for environments of
  /// unselected structures after the first step.
  double delta_entropy(std::size_t env) const { return -acc_[env].value(); }

 private:
  void absorb(std::size_t structure);

  const DescriptorSet& descs_;
  KernelParams kernel_;
  std::vector<double> entropies_;
  std::vector<std::size_t> selected_;
  std::vector<char> taken_;
  std::vector<LogSumExp> acc_;
};

CompressionResult sample_msc(const DescriptorSet& descs, std::size_t count,
                             const KernelParams& kernel);

/// Dispatches on `config.method`.
CompressionResult run_sampler(const DescriptorSet& descs,
                              const SamplerConfig& config);

}  // namespace atomcover
