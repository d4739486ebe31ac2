#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "atomcover/structure.hpp"

namespace atomcover {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Splits an extended-XYZ comment line into key/value pairs in file order.
/// Quoted values are unquoted; bare keys get the value "T".
KeyValues parse_comment_line(std::string_view line, std::size_t line_number = 0);

/// One `name:type:count` entry of a Properties string.
struct PropertyColumn {
  std::string name;
  char type = 'R';  // S, R, I or L
  std::size_t count = 1;
};

/// Parses e.g. "species:S:1:pos:R:3:forces:R:3".
std::vector<PropertyColumn> parse_properties(std::string_view spec,
                                             std::size_t line_number = 0);

/// Reads every frame of a multi-frame extended-XYZ stream.
///
/// Lattice rows become the cell; pbc comes from the "pbc" key, otherwise it is
/// set in all directions iff a Lattice is present. Forces are read from a
/// "forces" or "force" property, energy from the "energy" key. Other comment
/// keys are kept in Structure::info. Errors carry the offending line number.
Dataset read_extxyz(std::istream& in, std::string name = {});
Dataset read_extxyz(const std::filesystem::path& path);

/// Writes the selected structures in selection order. Coordinates use the
/// shortest representation that reads back bit-exactly.
void write_extxyz(const Dataset& dataset,
                  const std::vector<std::size_t>& selection, std::ostream& out);
void write_extxyz(const Dataset& dataset,
                  const std::vector<std::size_t>& selection,
                  const std::filesystem::path& path);

}  // namespace atomcover
