#include "tsam/csv.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "tsam/errors.hpp"

namespace tsam {

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw SchemaError("missing column '" + name + "'");
}

CsvTable parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started) throw ParseError("csv line " + std::to_string(line) + ": stray quote in unquoted field");
        quoted = true;
        field_started = true;
        break;
      case ',': end_field(); break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        [[fallthrough]];
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (quoted) throw ParseError("csv: unterminated quoted field");
  if (field_started || !record.empty()) end_record();

  if (records.empty()) throw ParseError("csv: missing header row");
  CsvTable table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw ParseError("csv record " + std::to_string(r + 1) + ": expected " + std::to_string(table.header.size()) +
                       " fields, found " + std::to_string(records[r].size()));
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

double parse_real(std::string_view s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::string_view body = s;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
  if (ec != std::errc{} || ptr != body.data() + body.size() || body.empty()) {
    throw ValueError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
}

void CsvWriter::write_row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      out_ << f;
      continue;
    }
    out_ << '"';
    for (char c : f) {
      if (c == '"') out_ << '"';
      out_ << c;
    }
    out_ << '"';
  }
  out_ << "\r\n";
  if (!out_) throw IoError("write failed for '" + path_.string() + "'");
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw IoError("closing '" + path_.string() + "' failed");
}

void write_table_csv(const CsvTable& table, const std::filesystem::path& path) {
  CsvWriter w(path);
  w.write_row(table.header);
  for (const auto& r : table.rows) w.write_row(r);
  w.close();
}

void write_trace_csv(const Trace& trace, const std::filesystem::path& path) {
  CsvWriter w(path);
  std::vector<std::string> header{"iter"};
  for (Eigen::Index i = 0; i < trace.dim; ++i) header.push_back("x_" + std::to_string(i + 1));
  for (const char* h : {"log_pi", "stage1_accept", "stage2_accept", "expensive_eval"}) header.emplace_back(h);
  w.write_row(header);
  std::vector<std::string> fields;
  for (const TraceRow& r : trace.rows) {
    fields.clear();
    fields.push_back(std::to_string(r.iter));
    for (Eigen::Index i = 0; i < r.x.size(); ++i) fields.push_back(format_real(r.x(i)));
    fields.push_back(format_real(r.log_pi));
    fields.emplace_back(r.stage1_accepted ? "1" : "0");
    fields.emplace_back(r.stage2_accepted ? "1" : "0");
    fields.emplace_back(r.expensive_eval ? "1" : "0");
    w.write_row(fields);
  }
  w.close();
}

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const std::size_t cols = table.header.size();
  if (cols < 6 || table.header.front() != "iter") throw SchemaError("not a trace file: '" + path.string() + "'");
  const auto d = static_cast<Eigen::Index>(cols - 5);
  std::vector<TraceRow> rows;
  rows.reserve(table.rows.size());
  for (const auto& rec : table.rows) {
    TraceRow r;
    r.iter = static_cast<std::int64_t>(parse_real(rec[0]));
    r.x.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) r.x(i) = parse_real(rec[static_cast<std::size_t>(i) + 1]);
    r.log_pi = parse_real(rec[cols - 4]);
    r.stage1_accepted = rec[cols - 3] == "1";
    r.stage2_accepted = rec[cols - 2] == "1";
    r.expensive_eval = rec[cols - 1] == "1";
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_summary_csv(const std::vector<ReplicateSummary>& summary, const std::filesystem::path& path) {
  CsvWriter w(path);
  w.write_row({"n", "mean", "sd"});
  for (const auto& s : summary) w.write_row({std::to_string(s.n), format_real(s.mean), format_real(s.sd)});
  w.close();
}

void write_edpm_csv(const std::vector<EdpmComparison>& rows, const std::filesystem::path& path) {
  CsvWriter w(path);
  w.write_row({"projection", "edpm_a", "edpm_b", "redpm"});
  for (const auto& r : rows) {
    w.write_row({r.projection, format_real(r.edpm_a), format_real(r.edpm_b), format_real(r.redpm)});
  }
  w.close();
}

}  // namespace tsam
