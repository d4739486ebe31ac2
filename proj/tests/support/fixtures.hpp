#pragma once

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "atomcover/descriptor.hpp"
#include "atomcover/structure.hpp"

#ifndef ATOMCOVER_TEST_DATA
#define ATOMCOVER_TEST_DATA "."
#endif

namespace fixtures {

using atomcover::Coords;
using atomcover::Dataset;
using atomcover::DescriptorSet;
using atomcover::Mat3;
using atomcover::RowMatrix;
using atomcover::Structure;
using atomcover::StructureSpan;
using atomcover::Vec3;

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(ATOMCOVER_TEST_DATA) / name;
}

inline Structure molecule(const std::vector<Vec3>& xyz,
                          const std::string& symbol = "C") {
  Structure s;
  s.positions.resize(static_cast<Eigen::Index>(xyz.size()), 3);
  for (std::size_t i = 0; i < xyz.size(); ++i)
    s.positions.row(static_cast<Eigen::Index>(i)) = xyz[i].transpose();
  s.species.assign(xyz.size(), symbol);
  return s;
}

inline Structure crystal(const Mat3& cell, const std::vector<Vec3>& cartesian,
                         const std::string& symbol = "Cu") {
  Structure s = molecule(cartesian, symbol);
  s.cell = cell;
  s.pbc = {true, true, true};
  return s;
}

inline Structure simple_cubic(double a) {
  return crystal(a * Mat3::Identity(), {Vec3::Zero()});
}

inline Structure fcc_conventional(double a) {
  return crystal(a * Mat3::Identity(), {Vec3(0, 0, 0), Vec3(0, a / 2, a / 2),
                                        Vec3(a / 2, 0, a / 2),
                                        Vec3(a / 2, a / 2, 0)});
}

/// Skewed two-atom cell with no special symmetry, so neighbor distances are
/// distinct apart from the unavoidable +/- lattice-vector pairs.
inline Structure triclinic_crystal() {
  Mat3 cell;
  cell << 3.1, 0.0, 0.0,  //
      0.73, 2.9, 0.0,     //
      -0.41, 0.52, 3.37;
  return crystal(cell, {Vec3(0.11, 0.07, 0.23), Vec3(1.63, 1.21, 1.74)});
}

/// m x m x m supercell, atoms ordered by (image, original atom).
inline Structure supercell(const Structure& s, int m) {
  std::vector<Vec3> xyz;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        for (std::size_t i = 0; i < s.size(); ++i)
          xyz.push_back(Vec3(s.positions.row(static_cast<Eigen::Index>(i))) +
                        a * Vec3(s.cell.row(0)) + b * Vec3(s.cell.row(1)) +
                        c * Vec3(s.cell.row(2)));
  Structure out = crystal(m * s.cell, xyz, s.species.front());
  out.pbc = s.pbc;
  return out;
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  q.normalize();
  return q.toRotationMatrix();
}

/// Rotates positions (and the cell, for periodic structures) as row vectors.
inline Structure rotated(Structure s, const Mat3& r) {
  s.positions = s.positions * r.transpose();
  s.cell = s.cell * r.transpose();
  return s;
}

inline Structure translated(Structure s, const Vec3& t) {
  s.positions.rowwise() += t.transpose();
  return s;
}

/// Random aperiodic cluster of `n` atoms with separations of at least
/// `min_sep` Å.
inline Structure random_cluster(std::mt19937_64& rng, std::size_t n,
                                double box = 4.0, double min_sep = 1.0) {
  std::uniform_real_distribution<double> u(0.0, box);
  std::vector<Vec3> xyz;
  while (xyz.size() < n) {
    Vec3 p(u(rng), u(rng), u(rng));
    bool ok = true;
    for (const auto& q : xyz) ok = ok && (p - q).norm() >= min_sep;
    if (ok) xyz.push_back(p);
  }
  return molecule(xyz);
}

/// Adds random forces with the given scale.
inline Structure with_forces(Structure s, std::mt19937_64& rng,
                             double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Coords f(s.positions.rows(), 3);
  for (Eigen::Index i = 0; i < f.rows(); ++i)
    for (int d = 0; d < 3; ++d) f(i, d) = g(rng);
  s.forces = f;
  return s;
}

/// Random clusters of 4 to 7 atoms whose environments, under the default
/// descriptor, all lie at least `separation` apart, within and across
/// clusters. 0.12 is 32 nats at the default bandwidth, so no two
/// environments see each other through the kernel.
inline std::vector<Structure> distinct_clusters(std::size_t count,
                                                std::uint64_t seed,
                                                double separation = 0.12) {
  std::mt19937_64 rng(seed);
  std::vector<Structure> out;
  RowMatrix accepted(0, 63);
  while (out.size() < count) {
    auto s = random_cluster(rng, 4 + out.size() % 4, 3.0);
    const RowMatrix rows = atomcover::structure_descriptors(s, {});
    bool far = true;
    for (Eigen::Index i = 0; far && i < rows.rows(); ++i) {
      for (Eigen::Index j = 0; far && j < i; ++j)
        far = (rows.row(i) - rows.row(j)).norm() >= separation;
      for (Eigen::Index j = 0; far && j < accepted.rows(); ++j)
        far = (rows.row(i) - accepted.row(j)).norm() >= separation;
    }
    if (!far) continue;
    accepted.conservativeResize(accepted.rows() + rows.rows(), Eigen::NoChange);
    accepted.bottomRows(rows.rows()) = rows;
    out.push_back(std::move(s));
  }
  return out;
}

/// `uniques` distinct clusters followed by exact copies up to `total`
/// structures, spread evenly over the uniques in shuffled order. Uniques
/// are indices 0..uniques-1.
inline Dataset duplicates_dataset(std::uint64_t seed = 5,
                                  std::size_t uniques = 20,
                                  std::size_t total = 100) {
  Dataset d;
  d.name = "duplicates";
  d.structures = distinct_clusters(uniques, seed);
  std::vector<std::size_t> copies;
  for (std::size_t i = uniques; i < total; ++i) copies.push_back(i % uniques);
  std::mt19937_64 rng(seed + 1);
  std::shuffle(copies.begin(), copies.end(), rng);
  for (auto c : copies) d.structures.push_back(d.structures[c]);
  return d;
}

/// Rows that are pairwise at least `min_dist` apart: a scaled one-hot layout.
inline RowMatrix far_rows(std::size_t n, std::size_t width, double min_dist) {
  RowMatrix m = RowMatrix::Zero(static_cast<Eigen::Index>(n),
                                static_cast<Eigen::Index>(width));
  // Each row gets a distinct integer code spread over the columns.
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t code = i;
    for (std::size_t c = 0; c < width && code; ++c, code /= 7)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          static_cast<double>(code % 7) * min_dist;
  }
  return m;
}

inline RowMatrix random_rows(std::mt19937_64& rng, std::size_t n,
                             std::size_t width, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  RowMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(width));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = g(rng);
  return m;
}

/// Wraps rows into a descriptor set whose structures have the given sizes.
inline DescriptorSet make_set(const RowMatrix& rows,
                              const std::vector<std::size_t>& lengths) {
  DescriptorSet s;
  s.values = rows;
  s.params.k = (static_cast<std::size_t>(rows.cols()) + 1) / 2;
  std::size_t start = 0;
  for (auto len : lengths) {
    s.offsets.push_back(StructureSpan{start, len});
    start += len;
  }
  return s;
}

/// One structure per row.
inline DescriptorSet singleton_set(const RowMatrix& rows) {
  return make_set(rows, std::vector<std::size_t>(
                            static_cast<std::size_t>(rows.rows()), 1));
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("atomcover-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures
