#include "atomcover/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include "atomcover/error.hpp"

namespace atomcover {
namespace {

using nlohmann::ordered_json;

std::string format_sig12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Recursively rounds every floating-point number in place.
void round_floats(ordered_json& j) {
  if (j.is_number_float()) {
    j = round_significant(j.get<double>());
  } else if (j.is_structured()) {
    for (auto& child : j) round_floats(child);
  }
}

ordered_json parameters_json(const ReportParameters& p) {
  ordered_json j;
  j["k"] = p.k;
  j["cutoff"] = p.cutoff;
  j["bandwidth"] = p.bandwidth;
  j["seed"] = p.seed;
  j["method"] = p.method;
  j["fraction"] = p.fraction ? ordered_json(*p.fraction) : ordered_json(nullptr);
  j["count"] = p.count ? ordered_json(*p.count) : ordered_json(nullptr);
  return j;
}

ordered_json cell_json(const TableCell& cell) {
  return std::visit([](const auto& v) { return ordered_json(v); }, cell);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_cell(const TableCell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_sig12(*d);
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  return csv_field(std::get<std::string>(cell));
}

std::string csv_scalar(const ordered_json& v) {
  if (v.is_number_float()) return format_sig12(v.get<double>());
  if (v.is_string()) return csv_field(v.get<std::string>());
  ordered_json rounded = v;
  round_floats(rounded);
  return csv_field(rounded.dump());
}

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  throw InputError("unknown report format '" + name + "'");
}

double round_significant(double v) {
  if (v == 0.0) return 0.0;  // drops the sign of -0.0
  if (!std::isfinite(v)) return v;
  return std::strtod(format_sig12(v).c_str(), nullptr);
}

ordered_json to_json(const ReportDocument& report) {
  ordered_json j;
  j["tool_version"] = report.tool_version;
  j["input_digest"] = report.input_digest;
  j["parameters"] = parameters_json(report.parameters);
  j["blocks"] = ordered_json::array();
  for (const auto& block : report.blocks) {
    ordered_json b;
    b["name"] = block.name;
    b["parameters"] = parameters_json(block.parameters);
    b["values"] = block.values;
    if (block.table) {
      ordered_json t;
      t["columns"] = block.table->columns;
      t["rows"] = ordered_json::array();
      for (const auto& row : block.table->rows) {
        ordered_json r = ordered_json::array();
        for (const auto& cell : row) r.push_back(cell_json(cell));
        t["rows"].push_back(std::move(r));
      }
      b["table"] = std::move(t);
    }
    j["blocks"].push_back(std::move(b));
  }
  round_floats(j);
  return j;
}

void write_report(const ReportDocument& report, ReportFormat format,
                  std::ostream& out) {
  if (format == ReportFormat::kJson) {
    out << to_json(report).dump(2) << '\n';
  } else {
    bool any_table = false;
    for (const auto& block : report.blocks) {
      if (!block.table) continue;
      if (any_table) out << '\n';
      any_table = true;
      const auto& t = *block.table;
      for (std::size_t c = 0; c < t.columns.size(); ++c)
        out << (c ? "," : "") << csv_field(t.columns[c]);
      out << '\n';
      for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
          out << (c ? "," : "") << csv_cell(row[c]);
        out << '\n';
      }
    }
    if (!any_table) {
      out << "block,key,value\n";
      for (const auto& block : report.blocks)
        for (const auto& item : block.values.items())
          out << csv_field(block.name) << ',' << csv_field(item.key()) << ','
              << csv_scalar(item.value()) << '\n';
    }
  }
  if (!out) throw Error("write error");
}

void write_report(const ReportDocument& report, ReportFormat format,
                  const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_report(report, format, out);
  out.close();
  if (!out) throw Error("write error on " + path.string());
}

}  // namespace atomcover
