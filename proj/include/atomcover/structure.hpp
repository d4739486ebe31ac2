#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace atomcover {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Coords = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// One periodic or aperiodic collection of atoms.
///
/// Lattice vectors are the rows of `cell` (Å). Species are carried for I/O
/// only; nothing downstream of the parser looks at them.
struct Structure {
  Mat3 cell = Mat3::Zero();
  std::array<bool, 3> pbc{false, false, false};
  Coords positions;
  std::vector<std::string> species;
  std::optional<Coords> forces;  // eV/Å
  std::optional<double> energy;  // eV
  /// Extended-XYZ comment keys not interpreted by the parser, kept verbatim.
  std::vector<std::pair<std::string, std::string>> info;

  std::size_t size() const { return static_cast<std::size_t>(positions.rows()); }
  bool any_periodic() const { return pbc[0] || pbc[1] || pbc[2]; }
};

/// Throws InputError / CellError when the structure is unusable.
void validate(const Structure& s);

/// Distance between opposite faces of the cell along each lattice direction.
Vec3 cell_heights(const Mat3& cell);

struct Dataset {
  std::vector<Structure> structures;
  std::string name;

  std::size_t size() const { return structures.size(); }
  std::size_t environment_count() const;
};

}  // namespace atomcover
