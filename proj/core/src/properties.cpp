#include "qclkg/properties.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "qclkg/errors.hpp"

namespace qclkg {

namespace {

bool is_ascii_alnum(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::string unit_symbol(Unit unit) {
  switch (unit) {
    case Unit::Kelvin: return "K";
    case Unit::MilliWatt: return "mW";
    case Unit::Watt: return "W";
    case Unit::TeraHertz: return "THz";
    case Unit::GigaHertz: return "GHz";
  }
  throw std::logic_error("unreachable unit");
}

std::optional<Unit> unit_from_symbol(std::string_view symbol) {
  if (symbol == "K") return Unit::Kelvin;
  if (symbol == "mW") return Unit::MilliWatt;
  if (symbol == "W") return Unit::Watt;
  if (symbol == "THz") return Unit::TeraHertz;
  if (symbol == "GHz") return Unit::GigaHertz;
  return std::nullopt;
}

std::string to_string(QuantityKind kind) {
  switch (kind) {
    case QuantityKind::Temperature: return "Temperature";
    case QuantityKind::Power: return "Power";
    case QuantityKind::Frequency: return "Frequency";
  }
  throw std::logic_error("unreachable kind");
}

std::optional<QuantityKind> quantity_kind_from_string(std::string_view name) {
  if (name == "Temperature") return QuantityKind::Temperature;
  if (name == "Power") return QuantityKind::Power;
  if (name == "Frequency") return QuantityKind::Frequency;
  return std::nullopt;
}

QuantityKind kind_of_unit(Unit unit) {
  switch (unit) {
    case Unit::Kelvin: return QuantityKind::Temperature;
    case Unit::MilliWatt:
    case Unit::Watt: return QuantityKind::Power;
    case Unit::TeraHertz:
    case Unit::GigaHertz: return QuantityKind::Frequency;
  }
  throw std::logic_error("unreachable unit");
}

bool operator==(const Quantity& a, const Quantity& b) {
  return a.value == b.value && a.unit == b.unit && a.kind == b.kind;
}

bool operator!=(const Quantity& a, const Quantity& b) { return !(a == b); }

Quantity make_quantity(double value, Unit unit, QuantityKind kind, std::string raw) {
  if (kind_of_unit(unit) != kind) {
    throw KindMismatch("unit " + unit_symbol(unit) + " does not measure " + to_string(kind));
  }
  if (!std::isfinite(value)) {
    throw InvalidQuantity("non-finite value for " + to_string(kind));
  }
  if (kind == QuantityKind::Frequency) {
    if (value <= 0.0) {
      throw InvalidQuantity("frequency must be > 0, got " + render_double(value));
    }
  } else if (value < 0.0) {
    throw InvalidQuantity(to_string(kind) + " must be >= 0, got " + render_double(value));
  }
  return Quantity{value, unit, kind, std::move(raw)};
}

namespace {

struct UnitToken {
  std::size_t pos;
  Unit unit;
};

// Longest symbols first so "mW" wins over the "W" inside it.
constexpr std::array<std::string_view, 5> kUnitSymbols = {"THz", "GHz", "mW", "W", "K"};

std::vector<UnitToken> find_unit_tokens(std::string_view text) {
  std::vector<UnitToken> tokens;
  for (std::size_t i = 0; i < text.size();) {
    bool matched = false;
    for (std::string_view sym : kUnitSymbols) {
      if (text.compare(i, sym.size(), sym) != 0) continue;
      bool left_ok = (i == 0) || !is_ascii_alnum(text[i - 1]);
      std::size_t end = i + sym.size();
      bool right_ok = (end == text.size()) || !is_ascii_alnum(text[end]);
      if (left_ok && right_ok) {
        tokens.push_back({i, *unit_from_symbol(std::string(sym))});
        i = end;
        matched = true;
        break;
      }
    }
    if (!matched) ++i;
  }
  return tokens;
}

// Bare numeric tokens: optional '-', digits, optional fraction. A token whose
// preceding character is alphanumeric or '.' is part of a larger word (e.g.
// the subscripts in "Al0.15Ga0.85As") and is skipped entirely.
std::vector<double> find_numbers(std::string_view text) {
  std::vector<double> values;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    bool starts_number =
        std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])));
    if (!starts_number) {
      ++i;
      continue;
    }
    std::size_t end = i + (c == '-' ? 1 : 0);
    while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
    if (end < text.size() && text[end] == '.' && end + 1 < text.size() &&
        std::isdigit(static_cast<unsigned char>(text[end + 1]))) {
      ++end;
      while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
    }
    bool left_ok = (i == 0) || (!is_ascii_alnum(text[i - 1]) && text[i - 1] != '.');
    if (left_ok) {
      double v = 0.0;
      auto res = std::from_chars(text.data() + i, text.data() + end, v);
      if (res.ec == std::errc{}) values.push_back(v);
    }
    i = end;
  }
  return values;
}

}  // namespace

Quantity parse_quantity(std::string_view text, QuantityKind kind) {
  const auto units = find_unit_tokens(text);
  if (units.empty()) {
    throw UnparsableQuantity("no unit symbol in \"" + std::string(text) + "\"");
  }
  for (const auto& t : units) {
    if (t.unit != units.front().unit) {
      throw UnparsableQuantity("mixed units in \"" + std::string(text) + "\"");
    }
  }
  const Unit unit = units.front().unit;
  if (kind_of_unit(unit) != kind) {
    throw KindMismatch("unit " + unit_symbol(unit) + " does not measure " + to_string(kind) +
                       " in \"" + std::string(text) + "\"");
  }
  const auto numbers = find_numbers(text);
  if (numbers.empty()) {
    throw UnparsableQuantity("no numeric value in \"" + std::string(text) + "\"");
  }
  // Ranges ("2.1 to 2.7 THz", "10-20 mW") collapse to their upper bound.
  const double value = *std::max_element(numbers.begin(), numbers.end());
  return make_quantity(value, unit, kind, trim(text));
}

double to_base_value(const Quantity& q) {
  switch (q.unit) {
    case Unit::Kelvin:
    case Unit::MilliWatt:
    case Unit::TeraHertz: return q.value;
    case Unit::Watt: return q.value * 1000.0;       // -> mW
    case Unit::GigaHertz: return q.value * 0.001;   // -> THz
  }
  throw std::logic_error("unreachable unit");
}

std::string render_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string render_quantity(const Quantity& q) {
  return render_double(q.value) + " " + unit_symbol(q.unit);
}

std::string to_string(WorkingMode mode) {
  switch (mode) {
    case WorkingMode::ContinuousWave: return "continuous wave";
    case WorkingMode::Pulsed: return "pulsed";
  }
  throw std::logic_error("unreachable mode");
}

std::string normalize_design_label(std::string_view surface) {
  std::string out;
  out.reserve(surface.size());
  bool pending_space = false;
  for (char c : surface) {
    unsigned char uc = static_cast<unsigned char>(c);
    char mapped;
    if (c == '-' || c == '_' || std::isspace(uc)) {
      mapped = ' ';
    } else {
      mapped = static_cast<char>(std::tolower(uc));
    }
    if (mapped == ' ') {
      if (!out.empty()) pending_space = true;
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(mapped);
    }
  }
  return out;
}

std::optional<WorkingMode> working_mode_from_string(std::string_view text) {
  const std::string norm = normalize_design_label(text);
  if (norm.find("continuous wave") != std::string::npos) return WorkingMode::ContinuousWave;
  // Whole-word "cw".
  const std::string padded = " " + norm + " ";
  if (padded.find(" cw ") != std::string::npos) return WorkingMode::ContinuousWave;
  if (norm.find("pulse") != std::string::npos) return WorkingMode::Pulsed;
  return std::nullopt;
}

bool operator==(const DesignType& a, const DesignType& b) { return a.label == b.label; }
bool operator!=(const DesignType& a, const DesignType& b) { return !(a == b); }

DesignType make_design_type(std::string_view surface) {
  return DesignType{normalize_design_label(surface), std::string(surface)};
}

bool operator==(const Heterostructure& a, const Heterostructure& b) {
  return a.mat_formula == b.mat_formula && a.design_type == b.design_type;
}
bool operator!=(const Heterostructure& a, const Heterostructure& b) { return !(a == b); }

std::string to_string(PropertyClass cls) {
  switch (cls) {
    case PropertyClass::Power: return "Power";
    case PropertyClass::Temperature: return "Temperature";
    case PropertyClass::DesignType: return "DesignType";
    case PropertyClass::Frequency: return "Frequency";
    case PropertyClass::Heterostructure: return "Heterostructure";
  }
  throw std::logic_error("unreachable property class");
}

std::string_view envelope_key(PropertyClass cls) {
  switch (cls) {
    case PropertyClass::Power: return "power";
    case PropertyClass::Temperature: return "temperature";
    case PropertyClass::DesignType: return "design_type";
    case PropertyClass::Frequency: return "frequency";
    case PropertyClass::Heterostructure: return "heterostructure";
  }
  throw std::logic_error("unreachable property class");
}

std::optional<PropertyClass> property_class_from_envelope_key(std::string_view key) {
  for (PropertyClass cls : kAllPropertyClasses) {
    if (envelope_key(cls) == key) return cls;
  }
  return std::nullopt;
}

std::optional<PropertyClass> property_class_from_string(std::string_view name) {
  if (name == "Power") return PropertyClass::Power;
  if (name == "Temperature") return PropertyClass::Temperature;
  if (name == "DesignType") return PropertyClass::DesignType;
  if (name == "Frequency") return PropertyClass::Frequency;
  if (name == "Heterostructure") return PropertyClass::Heterostructure;
  return std::nullopt;
}

bool RecordFragment::empty() const {
  return !temperature && !power && !frequency && !design_type && !heterostructure &&
         !working_mode && surface.empty();
}

bool operator==(const QclDeviceRecord& a, const QclDeviceRecord& b) {
  return a.device_id == b.device_id && a.heterostructure == b.heterostructure &&
         a.working_mode == b.working_mode && a.temperature == b.temperature &&
         a.power == b.power && a.frequency == b.frequency && a.doi == b.doi && a.url == b.url &&
         a.cited_dois == b.cited_dois;
}

bool operator!=(const QclDeviceRecord& a, const QclDeviceRecord& b) { return !(a == b); }

bool has_any_property(const QclDeviceRecord& record) {
  if (record.temperature || record.power || record.frequency) return true;
  if (record.heterostructure) {
    if (!record.heterostructure->mat_formula.empty()) return true;
    if (record.heterostructure->design_type) return true;
  }
  return false;
}

bool is_valid_doi(std::string_view doi) {
  if (doi.size() < 7 || doi.compare(0, 3, "10.") != 0) return false;
  std::size_t slash = doi.find('/', 3);
  if (slash == std::string_view::npos || slash == 3 || slash + 1 >= doi.size()) return false;
  for (char c : doi) {
    if (std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

namespace {

void check_quantity(const std::optional<Quantity>& q, QuantityKind kind, Unit expected_unit,
                    const std::string& field, std::vector<RecordViolation>& out) {
  if (!q) return;
  if (q->kind != kind) {
    out.push_back({field, "kind is " + to_string(q->kind) + ", expected " + to_string(kind)});
  }
  if (kind == QuantityKind::Temperature && q->unit != expected_unit) {
    out.push_back({field, "unit is " + unit_symbol(q->unit) + ", expected K"});
  }
  if (q->kind == kind && kind_of_unit(q->unit) != kind) {
    out.push_back({field, "unit " + unit_symbol(q->unit) + " does not measure " + to_string(kind)});
  }
  if (!std::isfinite(q->value)) {
    out.push_back({field, "value is not finite"});
    return;
  }
  if (kind == QuantityKind::Frequency) {
    if (q->value <= 0.0) out.push_back({field, "frequency must be > 0"});
  } else if (q->value < 0.0) {
    out.push_back({field, to_string(kind) + " must be >= 0"});
  }
}

}  // namespace

std::vector<RecordViolation> validate_record(const QclDeviceRecord& record) {
  std::vector<RecordViolation> out;
  if (record.device_id.empty()) {
    out.push_back({"device_id", "must be non-empty"});
  }
  check_quantity(record.temperature, QuantityKind::Temperature, Unit::Kelvin, "temperature", out);
  check_quantity(record.power, QuantityKind::Power, Unit::MilliWatt, "power", out);
  check_quantity(record.frequency, QuantityKind::Frequency, Unit::TeraHertz, "frequency", out);
  if (record.heterostructure) {
    const auto& hs = *record.heterostructure;
    if (hs.mat_formula.empty()) {
      out.push_back({"heterostructure", "material formula must be non-empty"});
    } else if (hs.mat_formula.find('/') == std::string::npos) {
      out.push_back({"heterostructure", "material formula must name a material pair (A/B)"});
    }
    if (hs.design_type) {
      if (hs.design_type->label.empty()) {
        out.push_back({"design_type", "label must be non-empty"});
      } else if (hs.design_type->label != normalize_design_label(hs.design_type->label)) {
        out.push_back({"design_type", "label must be lowercase-normalized"});
      }
    }
  }
  if (record.doi && !is_valid_doi(*record.doi)) {
    out.push_back({"doi", "does not match 10.<registrant>/<suffix>"});
  }
  for (const auto& cited : record.cited_dois) {
    if (!is_valid_doi(cited)) {
      out.push_back({"cited_dois", "entry \"" + cited + "\" does not match 10.<registrant>/<suffix>"});
    }
  }
  if (!has_any_property(record)) {
    out.push_back({"record", "no extracted property present"});
  }
  return out;
}

}  // namespace qclkg
