#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qclkg/properties.hpp"
#include "qclkg/rdf.hpp"

namespace qclkg {

// ---------------------------------------------------------------------------
// Ontology mapping
// ---------------------------------------------------------------------------

// Record-field -> vocabulary term table, loadable from a versioned TSV
// ("qclkg-mapping 1" header; rows: kind<TAB>key<TAB>curie-or-iri). Lookup of
// a missing key raises MappingGap, so an edited mapping fails loudly instead
// of silently dropping triples.
class MappingTable {
 public:
  static MappingTable defaults();
  static MappingTable load(std::istream& in);
  static MappingTable load_file(const std::string& path);

  const rdf::Iri& class_iri(const std::string& key) const;
  const rdf::Iri& predicate(const std::string& key) const;
  const rdf::Iri& individual(const std::string& key) const;
  bool has_individual(const std::string& key) const;

  // Checks that every key the triple emitter uses is present.
  void validate() const;

 private:
  std::map<std::string, rdf::Iri> classes_;
  std::map<std::string, rdf::Iri> predicates_;
  std::map<std::string, rdf::Iri> individuals_;
};

// Well-known mapping keys used by the emitter.
namespace mapping_keys {
inline constexpr const char* kDeviceClass = "device";
inline constexpr const char* kHeterostructureClass = "heterostructure";
inline constexpr const char* kHasHeterostructure = "has_heterostructure";
inline constexpr const char* kMatFormula = "mat_formula";
inline constexpr const char* kHasDesignType = "has_design_type";
inline constexpr const char* kDesignLabel = "design_label";
inline constexpr const char* kHasWorkingMode = "has_working_mode";
inline constexpr const char* kHasWorkingTemperature = "has_working_temperature";
inline constexpr const char* kHasOpticalPower = "has_optical_power";
inline constexpr const char* kHasLasingFrequency = "has_lasing_frequency";
inline constexpr const char* kNumericValue = "numeric_value";
inline constexpr const char* kUnit = "unit";
inline constexpr const char* kQuantityKind = "quantity_kind";
inline constexpr const char* kDerivedFrom = "derived_from";
inline constexpr const char* kDoi = "doi";
inline constexpr const char* kUri = "uri";
inline constexpr const char* kCites = "cites";
inline constexpr const char* kModeContinuousWave = "mode_continuous_wave";
inline constexpr const char* kModePulsed = "mode_pulsed";
}  // namespace mapping_keys

// ---------------------------------------------------------------------------
// IRI minting
// ---------------------------------------------------------------------------

struct DeviceIris {
  rdf::Iri device;
  rdf::Iri heterostructure;
  rdf::Iri temperature;
  rdf::Iri power;
  rdf::Iri frequency;
  rdf::Iri article;
};

inline constexpr const char* kDefaultBaseIri = "https://example.org/qclkg/";

// base must be a valid IRI ending in '/' or '#' (InvalidBase otherwise).
DeviceIris mint_iris(const std::string& device_id, const std::string& base);

// Lowercase alphanumerics, everything else collapsed to single '-'.
std::string slugify(std::string_view text);

// Well-known design labels map to ontology individuals; anything else is
// minted under <base>designtype/<slug>.
rdf::Iri design_type_iri(const DesignType& design, const MappingTable& mapping,
                         const std::string& base);

// Cited articles are named by their DOI: https://doi.org/<doi>.
rdf::Iri cited_article_iri(const std::string& doi);

rdf::Iri unit_iri(Unit unit, const MappingTable& mapping);
rdf::Iri quantity_kind_iri(QuantityKind kind, const MappingTable& mapping);

// ---------------------------------------------------------------------------
// Triple emission
// ---------------------------------------------------------------------------

// Emits the triples for one record. The record must already satisfy
// validate_record (throws qclkg::Error otherwise). A fully populated record
// with one citation yields 24 triples; see the test suite for the census.
std::vector<rdf::Triple> record_to_triples(const QclDeviceRecord& record,
                                           const MappingTable& mapping, const std::string& base);

// Union of all records' triples, with the canonical prefix table plus
// qkg -> base. Deduplication and ordering come from the graph itself.
rdf::Graph build_graph(const std::vector<QclDeviceRecord>& records, const MappingTable& mapping,
                       const std::string& base);

// ---------------------------------------------------------------------------
// Shape validation
// ---------------------------------------------------------------------------

struct ShapeRule {
  enum class TargetKind {
    InstancesOfClass,      // focus: subjects typed as target_class
    ObjectsOfAnyPredicate  // focus: IRI objects of any of target_predicates
  };
  enum class Constraint { RequiredPath, MaxCount, DatatypeOf, ValueIn };

  std::string id;
  TargetKind target_kind = TargetKind::InstancesOfClass;
  rdf::Iri target_class;
  std::vector<rdf::Iri> target_predicates;
  Constraint constraint = Constraint::RequiredPath;
  rdf::Iri path;
  std::size_t max_count = 1;              // MaxCount
  rdf::Iri datatype;                      // DatatypeOf
  std::optional<double> min_value;        // DatatypeOf: numeric lower bound
  std::vector<rdf::Iri> allowed_values;   // ValueIn
};

struct ShapeViolation {
  std::string rule_id;
  rdf::Iri focus;
  rdf::Iri path;
  std::string message;
};

struct ValidationReport {
  std::vector<ShapeViolation> violations;
  bool ok() const { return violations.empty(); }
};

// The shipped rule set: every device has at most one heterostructure and
// exactly one source article; quantity nodes carry exactly one value, unit
// and kind; temperature values are non-negative doubles; working modes come
// from the two mode individuals; source articles carry a DOI.
std::vector<ShapeRule> default_shape_rules(const MappingTable& mapping);

// Applies the rules in order; focus nodes are visited in graph order, so the
// report is deterministic. Violations are data, not exceptions.
ValidationReport validate_consistency(const rdf::Graph& graph,
                                      const std::vector<ShapeRule>& rules);

// One line per violation: "<rule-id> <focus> [via <path>]: <message>".
std::string render_report(const ValidationReport& report);

}  // namespace qclkg
