#include "atomcover/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "atomcover/error.hpp"

namespace atomcover {
namespace {

constexpr int kKMeansMaxIterations = 300;
constexpr double kKMeansTolerance = 1e-6;

void check_count(std::size_t count, std::size_t n) {
  if (count < 1 || count > n)
    throw InputError("target count " + std::to_string(count) +
                     " outside [1, " + std::to_string(n) + "]");
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Index of the nearest center; ties go to the lowest center index.
std::size_t nearest_center(const RowMatrix& centers,
                           const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  std::size_t best = 0;
  double best_d = (centers.row(0) - x).squaredNorm();
  for (Eigen::Index c = 1; c < centers.rows(); ++c) {
    const double d = (centers.row(c) - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(c);
    }
  }
  return best;
}

class KMeans {
 public:
  KMeans(const RowMatrix& points, std::size_t k, std::mt19937_64& rng)
      : x_(points), k_(k), labels_(static_cast<std::size_t>(points.rows())) {
    seed_plus_plus(rng);
  }

  const std::vector<std::size_t>& run() {
    const Eigen::RowVectorXd mean = x_.colwise().mean();
    const double variance =
        (x_.rowwise() - mean).array().square().colwise().mean().mean();
    const double tolerance = kKMeansTolerance * variance;

    for (int it = 0; it < kKMeansMaxIterations; ++it) {
      assign();
      repair_empty();
      const RowMatrix previous = centers_;
      update_centers();
      if ((centers_ - previous).squaredNorm() <= tolerance) break;
    }
    assign();
    repair_empty();
    return labels_;
  }

 private:
  void seed_plus_plus(std::mt19937_64& rng) {
    const auto n = static_cast<std::size_t>(x_.rows());
    centers_.resize(static_cast<Eigen::Index>(k_), x_.cols());
    const std::size_t first = uniform_index(rng, 0, n - 1);
    centers_.row(0) = x_.row(static_cast<Eigen::Index>(first));
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i)
      d2[i] = (x_.row(static_cast<Eigen::Index>(i)) - centers_.row(0)).squaredNorm();

    for (std::size_t c = 1; c < k_; ++c) {
      const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
      std::size_t pick;
      if (total > 0.0) {
        std::discrete_distribution<std::size_t> dist(d2.begin(), d2.end());
        pick = dist(rng);
      } else {
        pick = uniform_index(rng, 0, n - 1);
      }
      const auto row = static_cast<Eigen::Index>(c);
      centers_.row(row) = x_.row(static_cast<Eigen::Index>(pick));
      for (std::size_t i = 0; i < n; ++i)
        d2[i] = std::min(
            d2[i],
            (x_.row(static_cast<Eigen::Index>(i)) - centers_.row(row)).squaredNorm());
    }
  }

  void assign() {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      labels_[i] = nearest_center(centers_, x_.row(static_cast<Eigen::Index>(i)));
  }

  // Empty clusters take the member farthest from its center out of the
  // largest cluster.
  void repair_empty() {
    std::vector<std::size_t> counts(k_, 0);
    for (auto l : labels_) ++counts[l];
    for (std::size_t c = 0; c < k_; ++c) {
      if (counts[c] != 0) continue;
      const auto largest = static_cast<std::size_t>(
          std::max_element(counts.begin(), counts.end()) - counts.begin());
      std::size_t farthest = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] != largest) continue;
        const double d = (x_.row(static_cast<Eigen::Index>(i)) -
                          centers_.row(static_cast<Eigen::Index>(largest)))
                             .squaredNorm();
        if (d > far_d) {
          far_d = d;
          farthest = i;
        }
      }
      labels_[farthest] = c;
      --counts[largest];
      ++counts[c];
      centers_.row(static_cast<Eigen::Index>(c)) =
          x_.row(static_cast<Eigen::Index>(farthest));
    }
  }

  void update_centers() {
    RowMatrix sums = RowMatrix::Zero(centers_.rows(), centers_.cols());
    std::vector<std::size_t> counts(k_, 0);
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      sums.row(static_cast<Eigen::Index>(labels_[i])) +=
          x_.row(static_cast<Eigen::Index>(i));
      ++counts[labels_[i]];
    }
    for (std::size_t c = 0; c < k_; ++c)
      if (counts[c] > 0)
        centers_.row(static_cast<Eigen::Index>(c)) =
            sums.row(static_cast<Eigen::Index>(c)) / static_cast<double>(counts[c]);
  }

  const RowMatrix& x_;
  std::size_t k_;
  RowMatrix centers_;
  std::vector<std::size_t> labels_;
};

}  // namespace

std::string_view to_string(SamplerMethod m) {
  switch (m) {
    case SamplerMethod::kRandom: return "random";
    case SamplerMethod::kKMeans: return "kmeans";
    case SamplerMethod::kFps: return "fps";
    case SamplerMethod::kMsc: return "msc";
  }
  return "unknown";
}

SamplerMethod parse_sampler_method(std::string_view name) {
  if (name == "random") return SamplerMethod::kRandom;
  if (name == "kmeans") return SamplerMethod::kKMeans;
  if (name == "fps") return SamplerMethod::kFps;
  if (name == "msc") return SamplerMethod::kMsc;
  throw InputError("unknown sampling method '" + std::string(name) + "'");
}

std::size_t fraction_to_count(double fraction, std::size_t n_structures) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw InputError("fraction must lie in (0, 1]");
  if (n_structures == 0) throw InputError("dataset has no structures");
  const auto k = std::lround(fraction * static_cast<double>(n_structures));
  return std::max<std::size_t>(1, static_cast<std::size_t>(k));
}

CompressionResult sample_random(std::size_t n_structures, std::size_t count,
                                std::uint64_t seed) {
  check_count(count, n_structures);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(n_structures);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i)
    std::swap(order[i], order[uniform_index(rng, i, n_structures - 1)]);
  order.resize(count);
  return {std::move(order), {}};
}

RowMatrix structure_means(const DescriptorSet& descs) {
  RowMatrix means(static_cast<Eigen::Index>(descs.structure_count()),
                  descs.values.cols());
  for (std::size_t s = 0; s < descs.structure_count(); ++s)
    means.row(static_cast<Eigen::Index>(s)) =
        descs.structure_rows(s).colwise().mean();
  return means;
}

CompressionResult sample_kmeans(const DescriptorSet& descs, std::size_t count,
                                std::uint64_t seed) {
  check_count(count, descs.structure_count());
  const RowMatrix means = structure_means(descs);
  std::mt19937_64 rng(seed);
  KMeans kmeans(means, count, rng);
  const auto& labels = kmeans.run();

  std::vector<std::vector<std::size_t>> members(count);
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
  CompressionResult out;
  for (const auto& cluster : members)
    out.selected.push_back(cluster[uniform_index(rng, 0, cluster.size() - 1)]);
  return out;
}

CompressionResult sample_fps_from(const RowMatrix& means, std::size_t count,
                                  std::size_t first) {
  const auto n = static_cast<std::size_t>(means.rows());
  check_count(count, n);
  if (first >= n) throw InputError("first pick out of range");

  std::vector<double> sums(n, 0.0);
  std::vector<char> taken(n, 0);
  CompressionResult out;
  std::size_t last = first;
  out.selected.push_back(first);
  taken[first] = 1;
  while (out.selected.size() < count) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      sums[i] += (means.row(static_cast<Eigen::Index>(i)) -
                  means.row(static_cast<Eigen::Index>(last)))
                     .norm();
      if (best == n || sums[i] > sums[best]) best = i;
    }
    out.selected.push_back(best);
    taken[best] = 1;
    last = best;
  }
  return out;
}

CompressionResult sample_fps(const DescriptorSet& descs, std::size_t count,
                             std::uint64_t seed) {
  const std::size_t n = descs.structure_count();
  check_count(count, n);
  std::mt19937_64 rng(seed);
  return sample_fps_from(structure_means(descs), count,
                         uniform_index(rng, 0, n - 1));
}

MscSelector::MscSelector(const DescriptorSet& descs, const KernelParams& kernel)
    : descs_(descs),
      kernel_(kernel),
      entropies_(per_structure_entropy(descs, kernel)),
      taken_(descs.structure_count(), 0),
      acc_(descs.environment_count()) {
  if (descs.structure_count() == 0) throw InputError("dataset has no structures");
}

MscStep MscSelector::step() {
  const std::size_t n = descs_.structure_count();
  if (selected_.size() >= n) throw InputError("every structure is selected");

  MscStep result;
  if (selected_.empty()) {
    const auto best = static_cast<std::size_t>(
        std::max_element(entropies_.begin(), entropies_.end()) -
        entropies_.begin());
    result = {best, entropies_[best], std::nan(""), entropies_[best]};
  } else {
    bool found = false;
    for (std::size_t s = 0; s < n; ++s) {
      if (taken_[s]) continue;
      const auto& span = descs_.offsets[s];
      double max_dh = -std::numeric_limits<double>::infinity();
      for (std::size_t e = span.start; e < span.start + span.length; ++e)
        max_dh = std::max(max_dh, -acc_[e].value());
      const double score = max_dh + entropies_[s];
      if (!found || score > result.score) {
        result = {s, score, max_dh, entropies_[s]};
        found = true;
      }
    }
  }
  absorb(result.structure);
  return result;
}

void MscSelector::absorb(std::size_t structure) {
  taken_[structure] = 1;
  selected_.push_back(structure);

  std::vector<std::size_t> rows;
  for (std::size_t s = 0; s < descs_.structure_count(); ++s) {
    if (taken_[s]) continue;
    const auto& span = descs_.offsets[s];
    for (std::size_t e = span.start; e < span.start + span.length; ++e)
      rows.push_back(e);
  }
  if (rows.empty()) return;
  const RowMatrix added = descs_.structure_rows(structure);
  accumulate_log_kernels(descs_.values, rows, added, kernel_, acc_);
}

CompressionResult sample_msc(const DescriptorSet& descs, std::size_t count,
                             const KernelParams& kernel) {
  check_count(count, descs.structure_count());
  MscSelector selector(descs, kernel);
  CompressionResult out;
  for (std::size_t i = 0; i < count; ++i) out.msc_steps.push_back(selector.step());
  out.selected = selector.selected();
  return out;
}

CompressionResult run_sampler(const DescriptorSet& descs,
                              const SamplerConfig& config) {
  switch (config.method) {
    case SamplerMethod::kRandom:
      return sample_random(descs.structure_count(), config.target_count,
                           config.seed);
    case SamplerMethod::kKMeans:
      return sample_kmeans(descs, config.target_count, config.seed);
    case SamplerMethod::kFps:
      return sample_fps(descs, config.target_count, config.seed);
    case SamplerMethod::kMsc:
      return sample_msc(descs, config.target_count, config.kernel);
  }
  throw InputError("unknown sampling method");
}

}  // namespace atomcover
