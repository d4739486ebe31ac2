#include "atomcover/structure.hpp"

#include <cmath>

#include <Eigen/Geometry>

#include "atomcover/error.hpp"

namespace atomcover {

void validate(const Structure& s) {
  if (s.size() == 0) throw InputError("structure has no atoms");
  if (s.species.size() != s.size())
    throw InputError("species count " + std::to_string(s.species.size()) +
                     " does not match atom count " + std::to_string(s.size()));
  if (!s.positions.allFinite())
    throw InputError("non-finite atomic coordinates");
  if (s.forces && static_cast<std::size_t>(s.forces->rows()) != s.size())
    throw InputError("force rows do not match atom count");
  if (s.any_periodic()) {
    if (!s.cell.allFinite()) throw CellError("non-finite cell");
    const double det = s.cell.determinant();
    // Relative to the product of lattice vector lengths, so the check is
    // independent of the length unit.
    const double scale =
        s.cell.row(0).norm() * s.cell.row(1).norm() * s.cell.row(2).norm();
    if (!(scale > 0.0) || std::abs(det) <= 1e-12 * scale)
      throw CellError("periodic structure has a singular cell");
  }
}

Vec3 cell_heights(const Mat3& cell) {
  const Vec3 a = cell.row(0), b = cell.row(1), c = cell.row(2);
  const double volume = std::abs(a.dot(b.cross(c)));
  return {volume / b.cross(c).norm(), volume / c.cross(a).norm(),
          volume / a.cross(b).norm()};
}

std::size_t Dataset::environment_count() const {
  std::size_t n = 0;
  for (const auto& s : structures) n += s.size();
  return n;
}

}  // namespace atomcover
