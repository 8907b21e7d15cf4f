#include "aircap/data_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "aircap/error.hpp"

namespace aircap {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::optional<int> parse_int(std::string_view s) {
  s = trim(s);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

bool valid_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  const int month = (s[5] - '0') * 10 + (s[6] - '0');
  const int day = (s[8] - '0') * 10 + (s[9] - '0');
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_io("cannot open '" + path.string() + "' for reading");
  return in;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace

RecordSet parse_records(std::istream& in, const std::string& source) {
  RecordSet out;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) fail_validation(source + ": missing header");
  std::map<std::string, std::size_t, std::less<>> col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string name(trim(header[i]));
    if (i == 0 && name.rfind("\xEF\xBB\xBF", 0) == 0) name.erase(0, 3);
    col[name] = i;
  }
  constexpr std::array<const char*, 5> required = {"date", "hour", "minute", "delay_min", "mtow_t"};
  for (const char* name : required) {
    if (!col.contains(name)) {
      fail_validation(source + ": missing required column '" + std::string(name) + "'");
    }
  }
  const std::optional<std::size_t> pax_col =
      col.contains("pax") ? std::optional<std::size_t>(col.at("pax")) : std::nullopt;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    auto bad = [&](const std::string& msg) { out.errors.push_back({line_no, msg}); };
    if (fields.size() != header.size()) {
      bad("expected " + std::to_string(header.size()) + " fields, got " +
          std::to_string(fields.size()));
      continue;
    }
    FlightRecord r;
    r.date = std::string(trim(fields[col.at("date")]));
    if (!valid_date(r.date)) {
      bad("invalid date '" + r.date + "'");
      continue;
    }
    const auto hour = parse_int(fields[col.at("hour")]);
    const auto minute = parse_int(fields[col.at("minute")]);
    const auto delay = parse_double(fields[col.at("delay_min")]);
    const auto mtow = parse_double(fields[col.at("mtow_t")]);
    if (!hour || *hour < 0 || *hour > 23) {
      bad("invalid hour");
      continue;
    }
    if (!minute || *minute < 0 || *minute > 59) {
      bad("invalid minute");
      continue;
    }
    if (!delay) {
      bad("invalid delay_min");
      continue;
    }
    if (!mtow || !(*mtow > 0.0)) {
      bad("invalid mtow_t");
      continue;
    }
    r.hour = *hour;
    r.minute = *minute;
    r.delay_min = *delay;
    r.mtow_t = *mtow;
    if (pax_col && !trim(fields[*pax_col]).empty()) {
      const auto pax = parse_double(fields[*pax_col]);
      if (!pax || *pax < 0.0) {
        bad("invalid pax");
        continue;
      }
      r.pax = *pax;
    }
    out.records.push_back(std::move(r));
  }
  if (out.records.empty()) fail_validation(source + ": no valid flight records");
  return out;
}

RecordSet load_records(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return parse_records(in, path.string());
}

AirportFinancials parse_financials(std::istream& in, const std::string& source) {
  AirportFinancials f;
  const std::map<std::string, double AirportFinancials::*, std::less<>> fields = {
      {"total_flights", &AirportFinancials::total_flights},
      {"total_passengers", &AirportFinancials::total_passengers},
      {"total_aero_revenue", &AirportFinancials::total_aero_revenue},
      {"total_non_aero_revenue", &AirportFinancials::total_non_aero_revenue},
      {"total_operating_cost", &AirportFinancials::total_operating_cost},
      {"period_days", &AirportFinancials::period_days},
      {"value_of_time", &AirportFinancials::value_of_time}};
  std::map<std::string, bool, std::less<>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto where = source + ":" + std::to_string(line_no);
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) fail_validation(where + ": expected key=value");
    const std::string key(trim(view.substr(0, eq)));
    const auto it = fields.find(key);
    if (it == fields.end()) fail_validation(where + ": unknown key '" + key + "'");
    if (seen[key]) fail_validation(where + ": duplicate key '" + key + "'");
    seen[key] = true;
    const auto value = parse_double(view.substr(eq + 1));
    if (!value) fail_validation(where + ": invalid number for '" + key + "'");
    f.*(it->second) = *value;
  }
  for (const auto& [key, member] : fields) {
    if (key != "value_of_time" && !seen[key]) {
      fail_validation(source + ": missing key '" + key + "'");
    }
  }
  f.validate();
  return f;
}

AirportFinancials load_financials(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return parse_financials(in, path.string());
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::general, 12);
  return std::string(buf.data(), res.ptr);
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    fail_validation("table row has " + std::to_string(row.size()) + " cells, expected " +
                    std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(table.columns[i]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              out += format_number(v);
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
              out += std::to_string(v);
            } else {
              out += csv_escape(v);
            }
          },
          row[i]);
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail_io("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) fail_io("failed writing '" + path.string() + "'");
}

void write_table(const Table& table, const std::filesystem::path& path) {
  if (table.columns.empty() || table.rows.empty()) {
    fail_validation("refusing to write empty table to '" + path.string() + "'");
  }
  write_text(to_csv(table), path);
}

CsvData read_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  CsvData out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      out.header = split_csv_line(line);
      first = false;
    } else if (!line.empty()) {
      out.rows.push_back(split_csv_line(line));
    }
  }
  return out;
}

void write_json(const nlohmann::json& doc, const std::filesystem::path& path) {
  write_text(doc.dump(2) + "\n", path);
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail_validation("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace aircap
