#pragma once

// Input parsing (flight records, airport financials) and result writing
// (CSV tables, JSON summaries). Numbers are written locale-independently
// with 12 significant digits.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "aircap/calibration.hpp"

namespace aircap {

struct RowError {
  std::size_t line = 0;
  std::string message;
};

struct RecordSet {
  std::vector<FlightRecord> records;
  std::vector<RowError> errors;  // malformed rows, skipped
};

/// CSV with header date,hour,minute,delay_min,mtow_t[,pax] (any column order).
RecordSet parse_records(std::istream& in, const std::string& source);
RecordSet load_records(const std::filesystem::path& path);

/// key=value lines; '#' starts a comment. Keys are the AirportFinancials
/// field names; value_of_time is optional.
AirportFinancials parse_financials(std::istream& in, const std::string& source);
AirportFinancials load_financials(const std::filesystem::path& path);

/// Shortest decimal with at most 12 significant digits; "nan"/"inf" for
/// non-finite values.
std::string format_number(double value);

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

std::string to_csv(const Table& table);
/// Throws on an empty table or an I/O failure (message names the path).
void write_table(const Table& table, const std::filesystem::path& path);

struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvData read_csv(const std::filesystem::path& path);

void write_json(const nlohmann::json& doc, const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

/// Writes the whole string to path, replacing any existing file.
void write_text(const std::string& text, const std::filesystem::path& path);

}  // namespace aircap
