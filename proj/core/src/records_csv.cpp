#include "qclkg/records_csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "qclkg/errors.hpp"

namespace qclkg {

namespace {

bool needs_quoting(const std::string& cell) {
  return cell.find_first_of(",\"\r\n") != std::string::npos;
}

void write_cell(std::ostream& out, const std::string& cell) {
  if (!needs_quoting(cell)) {
    out << cell;
    return;
  }
  out << '"';
  for (char c : cell) {
    if (c == '"') out << "\"\"";
    else out << c;
  }
  out << '"';
}

void write_row(std::ostream& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    write_cell(out, row[i]);
  }
  out << '\n';
}

// Reads one logical CSV record (quoted cells may span raw lines). Returns
// false on clean EOF before any character of a new record.
bool read_row(std::istream& in, std::vector<std::string>& row, std::size_t& line_no) {
  row.clear();
  int first = in.peek();
  if (first == std::char_traits<char>::eof()) return false;
  std::string cell;
  bool in_quotes = false;
  bool row_done = false;
  bool saw_any = false;
  char c;
  while (!row_done && in.get(c)) {
    saw_any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          cell.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line_no;
        cell.push_back(c);
      }
    } else {
      switch (c) {
        case '"':
          if (cell.empty()) {
            in_quotes = true;
          } else {
            throw MalformedRow("line " + std::to_string(line_no) + ": stray quote");
          }
          break;
        case ',':
          row.push_back(std::move(cell));
          cell.clear();
          break;
        case '\r':
          if (in.peek() == '\n') in.get(c);
          [[fallthrough]];
        case '\n':
          ++line_no;
          row_done = true;
          break;
        default:
          cell.push_back(c);
      }
    }
  }
  if (in_quotes) {
    throw MalformedRow("line " + std::to_string(line_no) + ": unterminated quoted cell");
  }
  if (!saw_any) return false;
  row.push_back(std::move(cell));
  return true;
}

double parse_cell_double(const std::string& cell, const std::string& column) {
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw MalformedRow("column " + column + ": \"" + cell + "\" is not a number");
  }
  return v;
}

Unit parse_cell_unit(const std::string& cell, const std::string& column) {
  auto u = unit_from_symbol(cell);
  if (!u) throw MalformedRow("column " + column + ": unknown unit symbol \"" + cell + "\"");
  return *u;
}

}  // namespace

std::vector<std::string> record_to_csv_row(const QclDeviceRecord& r) {
  std::vector<std::string> row(kRecordCsvColumns.size());
  row[0] = r.device_id;
  if (r.heterostructure) {
    row[1] = r.heterostructure->mat_formula;
    if (r.heterostructure->design_type) row[2] = r.heterostructure->design_type->label;
  }
  if (r.working_mode) row[3] = to_string(*r.working_mode);
  if (r.temperature) row[4] = render_double(r.temperature->value);
  if (r.power) {
    row[5] = render_double(r.power->value);
    row[6] = unit_symbol(r.power->unit);
  }
  if (r.frequency) {
    row[7] = render_double(r.frequency->value);
    row[8] = unit_symbol(r.frequency->unit);
  }
  if (r.doi) row[9] = *r.doi;
  if (r.url) row[10] = *r.url;
  std::string joined;
  for (const auto& doi : r.cited_dois) {
    if (!joined.empty()) joined += ';';
    joined += doi;
  }
  row[11] = joined;
  return row;
}

QclDeviceRecord record_from_csv_row(const std::vector<std::string>& row) {
  if (row.size() != kRecordCsvColumns.size()) {
    throw MalformedRow("expected " + std::to_string(kRecordCsvColumns.size()) + " cells, got " +
                       std::to_string(row.size()));
  }
  QclDeviceRecord r;
  r.device_id = row[0];
  if (!row[1].empty() || !row[2].empty()) {
    Heterostructure hs;
    hs.mat_formula = row[1];
    if (!row[2].empty()) hs.design_type = DesignType{row[2], row[2]};
    r.heterostructure = std::move(hs);
  }
  if (!row[3].empty()) {
    auto mode = working_mode_from_string(row[3]);
    if (!mode) throw MalformedRow("column working_mode: unknown mode \"" + row[3] + "\"");
    r.working_mode = *mode;
  }
  if (!row[4].empty()) {
    // Raw field construction: invalid values (e.g. negative kelvin) load and
    // are reported by validate_record, not rejected at the I/O boundary.
    r.temperature = Quantity{parse_cell_double(row[4], "temperature_K"), Unit::Kelvin,
                             QuantityKind::Temperature, ""};
  }
  if (!row[5].empty() || !row[6].empty()) {
    if (row[5].empty() || row[6].empty()) {
      throw MalformedRow("power_value and power_unit must be populated together");
    }
    r.power = Quantity{parse_cell_double(row[5], "power_value"),
                       parse_cell_unit(row[6], "power_unit"), QuantityKind::Power, ""};
  }
  if (!row[7].empty() || !row[8].empty()) {
    if (row[7].empty() || row[8].empty()) {
      throw MalformedRow("frequency_value and frequency_unit must be populated together");
    }
    r.frequency = Quantity{parse_cell_double(row[7], "frequency_value"),
                           parse_cell_unit(row[8], "frequency_unit"), QuantityKind::Frequency, ""};
  }
  if (!row[9].empty()) r.doi = row[9];
  if (!row[10].empty()) r.url = row[10];
  if (!row[11].empty()) {
    std::size_t start = 0;
    while (start <= row[11].size()) {
      std::size_t semi = row[11].find(';', start);
      if (semi == std::string::npos) {
        r.cited_dois.push_back(row[11].substr(start));
        break;
      }
      r.cited_dois.push_back(row[11].substr(start, semi - start));
      start = semi + 1;
    }
  }
  return r;
}

void write_records_csv(std::ostream& out, const std::vector<QclDeviceRecord>& records) {
  std::vector<std::string> header(kRecordCsvColumns.begin(), kRecordCsvColumns.end());
  write_row(out, header);
  for (const auto& r : records) write_row(out, record_to_csv_row(r));
}

std::vector<QclDeviceRecord> read_records_csv(std::istream& in) {
  std::vector<std::string> row;
  std::size_t line_no = 1;
  if (!read_row(in, row, line_no)) {
    throw MalformedRow("missing header row");
  }
  for (std::size_t i = 0; i < kRecordCsvColumns.size(); ++i) {
    if (row.size() != kRecordCsvColumns.size() || row[i] != kRecordCsvColumns[i]) {
      throw MalformedRow("header does not match the canonical column set");
    }
  }
  std::vector<QclDeviceRecord> records;
  while (read_row(in, row, line_no)) {
    if (row.size() == 1 && row[0].empty()) continue;  // trailing blank line
    try {
      records.push_back(record_from_csv_row(row));
    } catch (const MalformedRow& e) {
      throw MalformedRow("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

std::string records_csv_to_string(const std::vector<QclDeviceRecord>& records) {
  std::ostringstream out;
  write_records_csv(out, records);
  return out.str();
}

std::vector<QclDeviceRecord> records_csv_from_string(const std::string& text) {
  std::istringstream in(text);
  return read_records_csv(in);
}

}  // namespace qclkg
