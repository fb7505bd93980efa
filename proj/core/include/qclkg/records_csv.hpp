#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "qclkg/properties.hpp"

namespace qclkg {

// Canonical column set, in order. cited_dois is semicolon-joined.
inline constexpr std::array<std::string_view, 12> kRecordCsvColumns = {
    "device_id",   "mat_formula",  "design_type",     "working_mode",
    "temperature_K", "power_value", "power_unit",     "frequency_value",
    "frequency_unit", "doi",        "url",            "cited_dois"};

// Projection of a record onto the canonical columns. Absent fields become
// empty cells; raw/audit annotations are dropped.
std::vector<std::string> record_to_csv_row(const QclDeviceRecord& record);

// Inverse of record_to_csv_row. Throws MalformedRow on arity or cell errors.
QclDeviceRecord record_from_csv_row(const std::vector<std::string>& row);

// RFC 4180 framing: cells containing comma, quote, CR or LF are quoted, quotes
// doubled. Lines end with '\n'. The header row is always written/expected.
void write_records_csv(std::ostream& out, const std::vector<QclDeviceRecord>& records);
std::vector<QclDeviceRecord> read_records_csv(std::istream& in);

std::string records_csv_to_string(const std::vector<QclDeviceRecord>& records);
std::vector<QclDeviceRecord> records_csv_from_string(const std::string& text);

}  // namespace qclkg
