#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdfem/experiments.hpp"

namespace sdfem {

/// Version string compiled into the library.
std::string version();

/// Fixed CSV schema. The first 23 columns are the documented core set; the
/// trailing ones carry the accepted k, the identity residuals and row status.
const std::vector<std::string>& csv_columns();

/// Shortest round-trip decimal for a double ("%.17g"); nan/inf spelled out.
std::string format_number(double v);

/// Writes header plus one line per row. Throws InvalidArgument on an empty list.
void write_csv(std::ostream& os, const std::vector<BoundRow>& rows);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> records;

  /// Column index by name; throws InvalidArgument if absent.
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

/// Parser for the files produced by write_csv (comma separated, no quoting).
CsvTable parse_csv(std::istream& is);

nlohmann::json to_json(const BoundRow& row);
nlohmann::json to_json(const SweepConfig& cfg);
nlohmann::json to_json(const CheckResult& c);

/// Complete JSON report: version, config echo, checks and every row.
nlohmann::json sweep_report(const std::vector<BoundRow>& rows, const SweepConfig& cfg,
                            const std::vector<CheckResult>& checks);

enum class ReportFormat { Csv, Json };
ReportFormat parse_report_format(const std::string& s);

/// Renders the report fully in memory and then writes it, so an error leaves
/// no partial file behind. Throws InvalidArgument on empty rows and
/// std::runtime_error on I/O failure.
void emit_report(const std::string& path, ReportFormat format, const std::vector<BoundRow>& rows,
                 const SweepConfig& cfg, const std::vector<CheckResult>& checks);

}  // namespace sdfem
