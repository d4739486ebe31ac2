#pragma once

// Deliberately naive reference computations. They share no code with the
// library beyond the data types.

#include <algorithm>
#include <cmath>
#include <vector>

#include "atomcover/descriptor.hpp"
#include "atomcover/structure.hpp"

namespace oracle {

using atomcover::Mat3;
using atomcover::RowMatrix;
using atomcover::Structure;
using atomcover::Vec3;

struct Neighbor {
  double r;
  Vec3 pos;
};

/// All images within `images` lattice steps in each periodic direction,
/// sorted by distance only. Correct whenever `images` covers the k-th
/// neighbor; callers pick it generously.
inline std::vector<std::vector<Neighbor>> brute_neighbors(const Structure& s,
                                                          std::size_t k,
                                                          int images) {
  const int na = s.pbc[0] ? images : 0;
  const int nb = s.pbc[1] ? images : 0;
  const int nc = s.pbc[2] ? images : 0;
  std::vector<std::vector<Neighbor>> out;
  for (Eigen::Index i = 0; i < s.positions.rows(); ++i) {
    const Vec3 c = s.positions.row(i);
    std::vector<Neighbor> all;
    for (Eigen::Index j = 0; j < s.positions.rows(); ++j)
      for (int a = -na; a <= na; ++a)
        for (int b = -nb; b <= nb; ++b)
          for (int d = -nc; d <= nc; ++d) {
            if (j == i && a == 0 && b == 0 && d == 0) continue;
            const Vec3 p = Vec3(s.positions.row(j)) + a * Vec3(s.cell.row(0)) +
                           b * Vec3(s.cell.row(1)) + d * Vec3(s.cell.row(2));
            all.push_back({(p - c).norm(), p});
          }
    std::sort(all.begin(), all.end(),
              [](const Neighbor& x, const Neighbor& y) { return x.r < y.r; });
    if (all.size() > k) all.resize(k);
    out.push_back(std::move(all));
  }
  return out;
}

inline double weight(double r, double rc) {
  if (r > rc) return 0.0;
  const double t = 1.0 - (r / rc) * (r / rc);
  return t * t;
}

/// Descriptor row of one center from its neighbor list, straight from the
/// definition: x1 = w/r in radial order; x2 = rank-wise mean over neighbors
/// of each neighbor's descending list of sqrt(w_j w_l)/r_jl.
inline std::vector<double> descriptor_row(const std::vector<Neighbor>& nb,
                                          std::size_t k, double rc) {
  std::vector<double> row(2 * k - 1, 0.0);
  for (std::size_t j = 0; j < nb.size(); ++j)
    row[j] = weight(nb[j].r, rc) / nb[j].r;
  const std::size_t m = nb.size();
  if (m >= 2) {
    std::vector<double> sums(k - 1, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<double> t;
      for (std::size_t l = 0; l < m; ++l)
        if (l != j)
          t.push_back(std::sqrt(weight(nb[j].r, rc) * weight(nb[l].r, rc)) /
                      (nb[j].pos - nb[l].pos).norm());
      std::sort(t.rbegin(), t.rend());
      for (std::size_t n = 0; n < t.size() && n < k - 1; ++n) sums[n] += t[n];
    }
    for (auto& v : sums) v /= static_cast<double>(m);
    std::sort(sums.rbegin(), sums.rend());
    std::copy(sums.begin(), sums.end(), row.begin() + static_cast<long>(k));
  }
  return row;
}

inline RowMatrix descriptors(const Structure& s, std::size_t k, double rc,
                             int images) {
  const auto nbrs = brute_neighbors(s, k, images);
  RowMatrix out(static_cast<Eigen::Index>(nbrs.size()),
                static_cast<Eigen::Index>(2 * k - 1));
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    const auto row = descriptor_row(nbrs[i], k, rc);
    for (std::size_t c = 0; c < row.size(); ++c)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = row[c];
  }
  return out;
}

/// Kernel sum in extended precision without any shifting. Inputs must keep
/// every exponent above about -11000 so nothing underflows.
inline long double kernel_sum(const RowMatrix& refs, Eigen::Index q_row,
                              const RowMatrix& queries, double h) {
  long double sum = 0.0L;
  for (Eigen::Index j = 0; j < refs.rows(); ++j) {
    long double d2 = 0.0L;
    for (Eigen::Index c = 0; c < refs.cols(); ++c) {
      const long double diff =
          static_cast<long double>(queries(q_row, c)) - refs(j, c);
      d2 += diff * diff;
    }
    sum += std::exp(-d2 / (2.0L * h * h));
  }
  return sum;
}

inline std::vector<double> delta_entropy(const RowMatrix& queries,
                                         const RowMatrix& refs, double h) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < queries.rows(); ++i)
    out.push_back(static_cast<double>(-std::log(kernel_sum(refs, i, queries, h))));
  return out;
}

/// H = -(1/N) sum_i log((1/N) sum_j K(X_i, X_j)).
inline double entropy(const RowMatrix& set, double h) {
  const long double n = static_cast<long double>(set.rows());
  long double acc = 0.0L;
  for (Eigen::Index i = 0; i < set.rows(); ++i)
    acc += std::log(kernel_sum(set, i, set, h) / n);
  return static_cast<double>(-acc / n);
}

/// D = log sum_i exp(dH(X_i | set)).
inline double diversity(const RowMatrix& set, double h) {
  long double acc = 0.0L;
  for (Eigen::Index i = 0; i < set.rows(); ++i)
    acc += 1.0L / kernel_sum(set, i, set, h);
  return static_cast<double>(std::log(acc));
}

}  // namespace oracle
