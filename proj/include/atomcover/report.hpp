#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace atomcover {

inline constexpr const char* kToolVersion = "atomcover 1.0.0";

/// Parameters a metric block was computed with.
struct ReportParameters {
  std::size_t k = 32;
  double cutoff = 5.0;
  double bandwidth = 0.015;
  std::uint64_t seed = 0;
  std::string method;
  std::optional<double> fraction;
  std::optional<std::size_t> count;
};

using TableCell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<TableCell>> rows;
};

struct MetricBlock {
  std::string name;
  ReportParameters parameters;
  nlohmann::ordered_json values = nlohmann::ordered_json::object();
  std::optional<Table> table;
};

struct ReportDocument {
  std::string tool_version = kToolVersion;
  std::string input_digest;
  ReportParameters parameters;
  std::vector<MetricBlock> blocks;
};

enum class ReportFormat { kJson, kCsv };

ReportFormat parse_report_format(const std::string& name);

/// Rounds to 12 significant digits; non-finite values pass through.
double round_significant(double v);

nlohmann::ordered_json to_json(const ReportDocument& report);

/// JSON: the whole document with fields in declaration order and floats at
/// 12 significant digits. CSV: the rows of every tabular block (header per
/// table), or `block,key,value` lines when no block carries a table.
void write_report(const ReportDocument& report, ReportFormat format,
                  std::ostream& out);
void write_report(const ReportDocument& report, ReportFormat format,
                  const std::filesystem::path& path);

}  // namespace atomcover
