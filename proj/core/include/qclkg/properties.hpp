#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qclkg {

// ---------------------------------------------------------------------------
// Units and physical quantities
// ---------------------------------------------------------------------------

enum class Unit { Kelvin, MilliWatt, Watt, TeraHertz, GigaHertz };
enum class QuantityKind { Temperature, Power, Frequency };

// Symbols are case-sensitive: K, mW, W, THz, GHz.
std::string unit_symbol(Unit unit);
std::optional<Unit> unit_from_symbol(std::string_view symbol);

std::string to_string(QuantityKind kind);
std::optional<QuantityKind> quantity_kind_from_string(std::string_view name);

// Kind a unit measures.
QuantityKind kind_of_unit(Unit unit);

struct Quantity {
  double value = 0.0;
  Unit unit = Unit::Kelvin;
  QuantityKind kind = QuantityKind::Temperature;
  // Original surface form when parsed from text. Provenance only: excluded
  // from equality and from the CSV projection.
  std::string raw;
};

// Identity is (value, unit, kind); raw is an annotation.
bool operator==(const Quantity& a, const Quantity& b);
bool operator!=(const Quantity& a, const Quantity& b);

// Throws InvalidQuantity if the value is non-finite, negative for temperature
// or power, or non-positive for frequency; KindMismatch if unit and kind
// disagree.
Quantity make_quantity(double value, Unit unit, QuantityKind kind, std::string raw = "");

// Pulls a numeric value plus unit symbol out of free text.
//   "150 K"                  -> 150 K
//   "tunable from 2.1 to 2.7 THz" -> 2.7 THz (upper bound of a range)
// Every bare number preceding the unit token contributes; the maximum wins,
// and the original text is retained in .raw. Unit symbols are matched
// case-sensitively on token boundaries. Throws UnparsableQuantity when no
// number/unit pair is found, KindMismatch when the unit does not measure
// `kind`, InvalidQuantity on range violations.
Quantity parse_quantity(std::string_view text, QuantityKind kind);

// Value converted to the base unit of its kind: K, mW, or THz.
double to_base_value(const Quantity& q);

// Shortest round-trippable decimal form of a double (std::to_chars).
std::string render_double(double value);

// "value unit", e.g. "4.7 THz". parse_quantity(render_quantity(q), q.kind) == q.
std::string render_quantity(const Quantity& q);

// ---------------------------------------------------------------------------
// Categorical properties
// ---------------------------------------------------------------------------

enum class WorkingMode { ContinuousWave, Pulsed };

std::string to_string(WorkingMode mode);
// Accepts "continuous wave", "cw", "pulsed", "pulse mode" and obvious
// punctuation/case variants; nullopt otherwise.
std::optional<WorkingMode> working_mode_from_string(std::string_view text);

// Open vocabulary with three well-known members ("lo phonon",
// "resonant phonon", "bound to continuum"). label holds the normalized form,
// raw the surface form it came from.
struct DesignType {
  std::string label;
  std::string raw;  // annotation, excluded from equality
};

bool operator==(const DesignType& a, const DesignType& b);
bool operator!=(const DesignType& a, const DesignType& b);

// Lowercases, maps '-'/'_' to spaces, collapses runs of whitespace, trims.
std::string normalize_design_label(std::string_view surface);

DesignType make_design_type(std::string_view surface);

struct Heterostructure {
  std::string mat_formula;  // e.g. "GaAs/Al0.15Ga0.85As"
  std::optional<DesignType> design_type;
};

bool operator==(const Heterostructure& a, const Heterostructure& b);
bool operator!=(const Heterostructure& a, const Heterostructure& b);

// The five extraction targets scored by the evaluation harness.
enum class PropertyClass { Power, Temperature, DesignType, Frequency, Heterostructure };

std::string to_string(PropertyClass cls);
std::optional<PropertyClass> property_class_from_string(std::string_view name);

// Lowercase JSON key used for this class in extraction envelopes, gold datasets,
// and prediction files: temperature, power, frequency, design_type, heterostructure.
std::string_view envelope_key(PropertyClass cls);
std::optional<PropertyClass> property_class_from_envelope_key(std::string_view key);

inline constexpr PropertyClass kAllPropertyClasses[] = {
    PropertyClass::Power, PropertyClass::Temperature, PropertyClass::DesignType,
    PropertyClass::Frequency, PropertyClass::Heterostructure};

// ---------------------------------------------------------------------------
// Extraction fragments and device records
// ---------------------------------------------------------------------------

// Partial extraction result for one sentence: any subset of properties, with
// the verbatim surface strings kept per class (including values that failed
// typed parsing, which matter to the evaluation).
struct RecordFragment {
  std::optional<Quantity> temperature;
  std::optional<Quantity> power;
  std::optional<Quantity> frequency;
  std::optional<DesignType> design_type;
  std::optional<std::string> heterostructure;  // material formula
  std::optional<WorkingMode> working_mode;
  std::map<PropertyClass, std::string> surface;

  bool empty() const;
};

struct QclDeviceRecord {
  std::string device_id;
  std::optional<Heterostructure> heterostructure;
  std::optional<WorkingMode> working_mode;
  std::optional<Quantity> temperature;  // kelvin
  std::optional<Quantity> power;
  std::optional<Quantity> frequency;
  std::optional<std::string> doi;
  std::optional<std::string> url;
  std::vector<std::string> cited_dois;
  // Audit trail annotations, excluded from equality and the CSV projection.
  std::string prompt_ref;
  std::string response_ref;
};

// Semantic equality over everything except prompt_ref/response_ref (and the
// raw annotations inside quantities/design types).
bool operator==(const QclDeviceRecord& a, const QclDeviceRecord& b);
bool operator!=(const QclDeviceRecord& a, const QclDeviceRecord& b);

// True when at least one extracted property is present (heterostructure,
// design type, temperature, power, or frequency). Working mode alone does not
// make a record worth keeping.
bool has_any_property(const QclDeviceRecord& record);

struct RecordViolation {
  std::string field;
  std::string message;
};

// Violations-as-data: an empty result means the record satisfies every
// invariant (unit/kind agreement, non-negative kelvin, positive frequency,
// formula contains '/', normalized design label, DOI pattern, completeness).
std::vector<RecordViolation> validate_record(const QclDeviceRecord& record);

// "10.<registrant>/<suffix>" with no whitespace.
bool is_valid_doi(std::string_view doi);

}  // namespace qclkg
