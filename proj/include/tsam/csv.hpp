#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "tsam/diagnostics.hpp"
#include "tsam/samplers.hpp"

namespace tsam {

/// An RFC-4180 table: header plus string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws SchemaError when absent.
  std::size_t column(const std::string& name) const;
};

/// Parses quoted fields, doubled quotes and CRLF or LF line endings. Every
/// row must have as many fields as the header.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

/// Shortest round-trip-safe text for a real: 17 significant digits, '.'
/// decimal separator, independent of the locale.
std::string format_real(double v);
/// Inverse of format_real; throws ValueError on malformed text.
double parse_real(std::string_view s);

/// Writes one CSV record per call, CRLF-terminated, quoting fields only when needed.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);
  void write_row(const std::vector<std::string>& fields);
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

void write_table_csv(const CsvTable& table, const std::filesystem::path& path);

/// Columns: iter, x_1..x_d, log_pi, stage1_accept, stage2_accept, expensive_eval.
void write_trace_csv(const Trace& trace, const std::filesystem::path& path);

/// Parses a file written by write_trace_csv back into rows.
std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);

/// Columns: n, mean, sd.
void write_summary_csv(const std::vector<ReplicateSummary>& summary, const std::filesystem::path& path);

struct EdpmComparison {
  std::string projection;
  double edpm_a = 0.0;
  double edpm_b = 0.0;
  double redpm = 0.0;
};

/// Columns: projection, edpm_a, edpm_b, redpm.
void write_edpm_csv(const std::vector<EdpmComparison>& rows, const std::filesystem::path& path);

}  // namespace tsam
