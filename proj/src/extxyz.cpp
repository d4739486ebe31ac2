#include "atomcover/extxyz.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "atomcover/error.hpp"

namespace atomcover {
namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) {
    return !std::isspace(static_cast<unsigned char>(c));
  };
  const auto b = std::find_if(s.begin(), s.end(), not_space);
  const auto e = std::find_if(s.rbegin(), s.rend(), not_space).base();
  return b < e ? std::string_view(&*b, static_cast<std::size_t>(e - b))
               : std::string_view{};
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

double parse_double(std::string_view token, std::size_t line) {
  double v = 0.0;
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw ParseError("expected a number, got '" + std::string(token) + "'", line);
  return v;
}

bool parse_logical(std::string_view token, std::size_t line) {
  if (iequals(token, "T") || iequals(token, "true") || token == "1") return true;
  if (iequals(token, "F") || iequals(token, "false") || token == "0") return false;
  throw ParseError("expected a logical value, got '" + std::string(token) + "'",
                   line);
}

bool needs_quotes(std::string_view v) {
  return v.empty() || std::any_of(v.begin(), v.end(), [](char c) {
           return std::isspace(static_cast<unsigned char>(c)) || c == '"' ||
                  c == '=';
         });
}

std::string quote_value(std::string_view v) {
  std::string out = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

struct LineReader {
  std::istream& in;
  std::size_t number = 0;

  bool next(std::string& line) {
    if (!std::getline(in, line)) return false;
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }
};

// Column layout of one frame, resolved from its Properties string.
struct Layout {
  std::size_t width = 0;
  std::size_t species = 0;
  std::size_t pos = 0;
  std::optional<std::size_t> forces;
};

Layout resolve_layout(const std::vector<PropertyColumn>& props,
                      std::size_t line) {
  Layout layout;
  std::optional<std::size_t> species, pos;
  for (const auto& p : props) {
    if (p.name == "species" && p.type == 'S' && p.count == 1) species = layout.width;
    if ((p.name == "pos" || p.name == "positions") && p.type == 'R' && p.count == 3)
      pos = layout.width;
    if ((p.name == "forces" || p.name == "force") && p.type == 'R' && p.count == 3)
      layout.forces = layout.width;
    layout.width += p.count;
  }
  if (!species) throw ParseError("Properties lacks species:S:1", line);
  if (!pos) throw ParseError("Properties lacks pos:R:3", line);
  layout.species = *species;
  layout.pos = *pos;
  return layout;
}

Structure read_frame(LineReader& reader, const std::string& count_line) {
  const std::size_t header_line = reader.number;
  const auto count_token = trim(count_line);
  std::size_t n = 0;
  const auto [ptr, ec] = std::from_chars(
      count_token.data(), count_token.data() + count_token.size(), n);
  if (ec != std::errc() || ptr != count_token.data() + count_token.size())
    throw ParseError("expected an atom count, got '" + std::string(count_token) + "'",
                     header_line);
  if (n == 0) throw ParseError("frame has zero atoms", header_line);

  std::string comment;
  if (!reader.next(comment))
    throw ParseError("missing comment line", header_line + 1);
  const std::size_t comment_line = reader.number;

  Structure s;
  std::vector<PropertyColumn> props{{"species", 'S', 1}, {"pos", 'R', 3}};
  bool has_lattice = false;
  std::optional<std::array<bool, 3>> pbc;
  for (auto& [key, value] : parse_comment_line(comment, comment_line)) {
    if (iequals(key, "Lattice")) {
      const auto parts = split_ws(value);
      if (parts.size() != 9)
        throw ParseError("Lattice needs 9 numbers", comment_line);
      for (int i = 0; i < 9; ++i)
        s.cell(i / 3, i % 3) = parse_double(parts[static_cast<std::size_t>(i)], comment_line);
      has_lattice = true;
    } else if (iequals(key, "Properties")) {
      props = parse_properties(value, comment_line);
    } else if (iequals(key, "pbc")) {
      const auto parts = split_ws(value);
      if (parts.size() != 3) throw ParseError("pbc needs 3 flags", comment_line);
      pbc = std::array<bool, 3>{parse_logical(parts[0], comment_line),
                                parse_logical(parts[1], comment_line),
                                parse_logical(parts[2], comment_line)};
    } else if (key == "energy") {
      s.energy = parse_double(value, comment_line);
    } else {
      s.info.emplace_back(std::move(key), std::move(value));
    }
  }
  s.pbc = pbc.value_or(std::array<bool, 3>{has_lattice, has_lattice, has_lattice});

  const Layout layout = resolve_layout(props, comment_line);
  s.positions.resize(static_cast<Eigen::Index>(n), 3);
  s.species.resize(n);
  if (layout.forces) s.forces = Coords(static_cast<Eigen::Index>(n), 3);

  std::string row;
  for (std::size_t i = 0; i < n; ++i) {
    if (!reader.next(row))
      throw ParseError("expected " + std::to_string(n) + " atom rows, found " +
                           std::to_string(i),
                       reader.number + 1);
    const auto tokens = split_ws(row);
    if (tokens.size() != layout.width)
      throw ParseError("expected " + std::to_string(layout.width) +
                           " columns, found " + std::to_string(tokens.size()),
                       reader.number);
    const auto r = static_cast<Eigen::Index>(i);
    s.species[i] = std::string(tokens[layout.species]);
    for (int d = 0; d < 3; ++d) {
      s.positions(r, d) = parse_double(tokens[layout.pos + static_cast<std::size_t>(d)],
                                       reader.number);
      if (layout.forces)
        (*s.forces)(r, d) = parse_double(
            tokens[*layout.forces + static_cast<std::size_t>(d)], reader.number);
    }
  }

  try {
    validate(s);
  } catch (const Error& e) {
    throw ParseError(e.what(), header_line);
  }
  return s;
}

}  // namespace

KeyValues parse_comment_line(std::string_view line, std::size_t line_number) {
  KeyValues out;
  std::size_t i = 0;
  const auto skip_ws = [&] {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  };
  const auto read_value = [&]() -> std::string {
    std::string v;
    if (i < line.size() && (line[i] == '"' || line[i] == '\'' || line[i] == '{')) {
      const char close = line[i] == '{' ? '}' : line[i];
      ++i;
      while (i < line.size() && line[i] != close) {
        if (line[i] == '\\' && i + 1 < line.size()) ++i;
        v += line[i++];
      }
      if (i >= line.size())
        throw ParseError("unterminated quoted value", line_number);
      ++i;
      return v;
    }
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
      v += line[i++];
    return v;
  };

  skip_ws();
  while (i < line.size()) {
    std::string key;
    while (i < line.size() && line[i] != '=' &&
           !std::isspace(static_cast<unsigned char>(line[i])))
      key += line[i++];
    skip_ws();
    if (i < line.size() && line[i] == '=') {
      ++i;
      skip_ws();
      out.emplace_back(std::move(key), read_value());
    } else {
      if (key.empty()) throw ParseError("malformed comment line", line_number);
      out.emplace_back(std::move(key), "T");
    }
    skip_ws();
  }
  return out;
}

std::vector<PropertyColumn> parse_properties(std::string_view spec,
                                             std::size_t line_number) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = spec.find(':', start);
    parts.push_back(spec.substr(start, colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts.size() % 3 != 0)
    throw ParseError("Properties must be name:type:count triples", line_number);

  std::vector<PropertyColumn> out;
  for (std::size_t p = 0; p < parts.size(); p += 3) {
    PropertyColumn col;
    col.name = std::string(parts[p]);
    if (parts[p + 1].size() != 1 ||
        std::string_view("SRIL").find(parts[p + 1][0]) == std::string_view::npos)
      throw ParseError("unknown property type '" + std::string(parts[p + 1]) + "'",
                       line_number);
    col.type = parts[p + 1][0];
    const auto c = parts[p + 2];
    const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), col.count);
    if (ec != std::errc() || ptr != c.data() + c.size() || col.count == 0)
      throw ParseError("bad property column count '" + std::string(c) + "'",
                       line_number);
    out.push_back(std::move(col));
  }
  return out;
}

Dataset read_extxyz(std::istream& in, std::string name) {
  Dataset dataset;
  dataset.name = std::move(name);
  LineReader reader{in};
  std::string line;
  while (reader.next(line)) {
    if (trim(line).empty()) {
      // Only trailing blank lines are tolerated.
      const std::size_t blank = reader.number;
      std::string rest;
      while (reader.next(rest))
        if (!trim(rest).empty())
          throw ParseError("blank line between frames", blank);
      break;
    }
    dataset.structures.push_back(read_frame(reader, line));
  }
  if (in.bad()) throw Error("read error");
  return dataset;
}

Dataset read_extxyz(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_extxyz(in, path.stem().string());
}

void write_extxyz(const Dataset& dataset,
                  const std::vector<std::size_t>& selection, std::ostream& out) {
  std::vector<char> seen(dataset.size(), 0);
  for (auto i : selection) {
    if (i >= dataset.size())
      throw InputError("selection index " + std::to_string(i) + " out of range");
    if (seen[i]) throw InputError("selection index " + std::to_string(i) + " repeated");
    seen[i] = 1;
  }

  for (auto i : selection) {
    const Structure& s = dataset.structures[i];
    out << s.size() << '\n';

    std::string comment;
    if (s.any_periodic() || !s.cell.isZero(0.0)) {
      comment += "Lattice=\"";
      for (int e = 0; e < 9; ++e) {
        if (e) comment += ' ';
        comment += format_double(s.cell(e / 3, e % 3));
      }
      comment += "\" ";
    }
    comment += "Properties=species:S:1:pos:R:3";
    if (s.forces) comment += ":forces:R:3";
    if (s.energy) comment += " energy=" + format_double(*s.energy);
    comment += " pbc=\"";
    for (int d = 0; d < 3; ++d) comment += (d ? " " : "") + std::string(s.pbc[d] ? "T" : "F");
    comment += '"';
    for (const auto& [key, value] : s.info)
      comment += ' ' + key + '=' + (needs_quotes(value) ? quote_value(value) : value);
    out << comment << '\n';

    for (std::size_t a = 0; a < s.size(); ++a) {
      const auto r = static_cast<Eigen::Index>(a);
      out << s.species[a];
      for (int d = 0; d < 3; ++d) out << ' ' << format_double(s.positions(r, d));
      if (s.forces)
        for (int d = 0; d < 3; ++d) out << ' ' << format_double((*s.forces)(r, d));
      out << '\n';
    }
  }
  if (!out) throw Error("write error");
}

void write_extxyz(const Dataset& dataset,
                  const std::vector<std::size_t>& selection,
                  const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_extxyz(dataset, selection, out);
  out.close();
  if (!out) throw Error("write error on " + path.string());
}

}  // namespace atomcover
