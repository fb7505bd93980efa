#include "qclkg/kg.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>

#include "qclkg/errors.hpp"

namespace qclkg {

namespace {

using rdf::Iri;
using rdf::Triple;

Iri resolve_curie_or_iri(const std::string& text) {
  // Absolute IRI already?
  if (text.find("://") != std::string::npos || text.rfind("urn:", 0) == 0) {
    return Iri(text);
  }
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos) {
    throw MappingGap("mapping value \"" + text + "\" is neither a CURIE nor an absolute IRI");
  }
  const std::string prefix = text.substr(0, colon);
  const auto& prefixes = rdf::default_prefixes();
  auto it = prefixes.find(prefix);
  if (it == prefixes.end()) {
    throw MappingGap("mapping value \"" + text + "\" uses unknown prefix \"" + prefix + "\"");
  }
  return Iri(it->second + text.substr(colon + 1));
}

constexpr const char* kMappingMagic = "qclkg-mapping 1";

const char* const kRequiredClasses[] = {
    mapping_keys::kDeviceClass,
    mapping_keys::kHeterostructureClass,
};
const char* const kRequiredPredicates[] = {
    mapping_keys::kHasHeterostructure, mapping_keys::kMatFormula,
    mapping_keys::kHasDesignType,      mapping_keys::kDesignLabel,
    mapping_keys::kHasWorkingMode,     mapping_keys::kHasWorkingTemperature,
    mapping_keys::kHasOpticalPower,    mapping_keys::kHasLasingFrequency,
    mapping_keys::kNumericValue,       mapping_keys::kUnit,
    mapping_keys::kQuantityKind,       mapping_keys::kDerivedFrom,
    mapping_keys::kDoi,                mapping_keys::kUri,
    mapping_keys::kCites,
};
const char* const kRequiredIndividuals[] = {
    mapping_keys::kModeContinuousWave,
    mapping_keys::kModePulsed,
    "unit_K",
    "unit_mW",
    "unit_W",
    "unit_THz",
    "unit_GHz",
    "kind_Temperature",
    "kind_Power",
    "kind_Frequency",
};

}  // namespace

MappingTable MappingTable::defaults() {
  static const char* kRows[][3] = {
      {"class", "device", "QpOnto:QuantumCascadeLaser"},
      {"class", "heterostructure", "QpOnto:LaserHeterostructure"},
      {"predicate", "has_heterostructure", "QpOnto:hasHeterostructure"},
      {"predicate", "mat_formula", "QpOnto:matFormula"},
      {"predicate", "has_design_type", "QpOnto:hasDesignType"},
      {"predicate", "design_label", "RDFS:label"},
      {"predicate", "has_working_mode", "QpOnto:hasWorkingMode"},
      {"predicate", "has_working_temperature", "QpOnto:hasWorkingTemperature"},
      {"predicate", "has_optical_power", "QpOnto:hasOpticalPower"},
      {"predicate", "has_lasing_frequency", "QpOnto:hasLasingFrequency"},
      {"predicate", "numeric_value", "QUDT_Properties:numericValue"},
      {"predicate", "unit", "QUDT_Properties:unit"},
      {"predicate", "quantity_kind", "QUDT_Properties:hasQuantityKind"},
      {"predicate", "derived_from", "prov:wasDerivedFrom"},
      {"predicate", "doi", "BIBO:doi"},
      {"predicate", "uri", "BIBO:uri"},
      {"predicate", "cites", "BIBO:cite"},
      {"individual", "mode_continuous_wave", "QpOnto:ContinuousWaveMode"},
      {"individual", "mode_pulsed", "QpOnto:PulsedMode"},
      {"individual", "design_lo_phonon", "QpOnto:LOPhononDesignType"},
      {"individual", "design_resonant_phonon", "QpOnto:ResonantPhononDesignType"},
      {"individual", "design_bound_to_continuum", "QpOnto:BoundToContinuumDesignType"},
      {"individual", "unit_K", "QUDT_Units:K"},
      {"individual", "unit_mW", "QUDT_Units:MilliW"},
      {"individual", "unit_W", "QUDT_Units:W"},
      {"individual", "unit_THz", "QUDT_Units:TeraHZ"},
      {"individual", "unit_GHz", "QUDT_Units:GigaHZ"},
      {"individual", "kind_Temperature", "QUDT_QuantityKinds:Temperature"},
      {"individual", "kind_Power", "QUDT_QuantityKinds:Power"},
      {"individual", "kind_Frequency", "QUDT_QuantityKinds:Frequency"},
  };
  MappingTable table;
  for (const auto& row : kRows) {
    const std::string kind = row[0];
    const std::string key = row[1];
    const Iri iri = resolve_curie_or_iri(row[2]);
    if (kind == "class") {
      table.classes_.emplace(key, iri);
    } else if (kind == "predicate") {
      table.predicates_.emplace(key, iri);
    } else {
      table.individuals_.emplace(key, iri);
    }
  }
  return table;
}

MappingTable MappingTable::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMappingMagic) {
    throw MappingGap(std::string("mapping file must start with \"") + kMappingMagic + "\"");
  }
  MappingTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string kind, key, value;
    if (!std::getline(row, kind, '\t') || !std::getline(row, key, '\t') ||
        !std::getline(row, value, '\t') || kind.empty() || key.empty() || value.empty()) {
      throw MappingGap("mapping line " + std::to_string(line_no) +
                       ": expected kind<TAB>key<TAB>iri");
    }
    const Iri iri = resolve_curie_or_iri(value);
    if (kind == "class") {
      table.classes_[key] = iri;
    } else if (kind == "predicate") {
      table.predicates_[key] = iri;
    } else if (kind == "individual") {
      table.individuals_[key] = iri;
    } else {
      throw MappingGap("mapping line " + std::to_string(line_no) + ": unknown kind \"" + kind +
                       "\"");
    }
  }
  return table;
}

MappingTable MappingTable::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mapping file: " + path);
  return load(in);
}

const Iri& MappingTable::class_iri(const std::string& key) const {
  auto it = classes_.find(key);
  if (it == classes_.end()) throw MappingGap("no class mapping for \"" + key + "\"");
  return it->second;
}

const Iri& MappingTable::predicate(const std::string& key) const {
  auto it = predicates_.find(key);
  if (it == predicates_.end()) throw MappingGap("no predicate mapping for \"" + key + "\"");
  return it->second;
}

const Iri& MappingTable::individual(const std::string& key) const {
  auto it = individuals_.find(key);
  if (it == individuals_.end()) throw MappingGap("no individual mapping for \"" + key + "\"");
  return it->second;
}

bool MappingTable::has_individual(const std::string& key) const {
  return individuals_.count(key) != 0;
}

void MappingTable::validate() const {
  for (const char* key : kRequiredClasses) class_iri(key);
  for (const char* key : kRequiredPredicates) predicate(key);
  for (const char* key : kRequiredIndividuals) individual(key);
}

DeviceIris mint_iris(const std::string& device_id, const std::string& base) {
  if (base.empty() || (base.back() != '/' && base.back() != '#')) {
    throw InvalidBase("base IRI must end with '/' or '#': \"" + base + "\"");
  }
  try {
    Iri probe(base + "probe");
    (void)probe;
  } catch (const InvalidIri& e) {
    throw InvalidBase(e.what());
  }
  if (device_id.empty()) throw Error("cannot mint IRIs for an empty device id");
  DeviceIris iris;
  iris.device = Iri(base + "device/" + device_id);
  iris.heterostructure = Iri(base + "hs/" + device_id);
  iris.temperature = Iri(base + "qty/" + device_id + "/temperature");
  iris.power = Iri(base + "qty/" + device_id + "/power");
  iris.frequency = Iri(base + "qty/" + device_id + "/frequency");
  iris.article = Iri(base + "article/" + device_id);
  return iris;
}

std::string slugify(std::string_view text) {
  std::string out;
  bool pending_dash = false;
  for (char c : text) {
    const unsigned char uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc)) {
      if (pending_dash && !out.empty()) out.push_back('-');
      pending_dash = false;
      out.push_back(static_cast<char>(std::tolower(uc)));
    } else {
      pending_dash = true;
    }
  }
  return out;
}

rdf::Iri design_type_iri(const DesignType& design, const MappingTable& mapping,
                         const std::string& base) {
  const std::string key = "design_" + [&] {
    std::string k;
    for (char c : design.label) k.push_back(c == ' ' ? '_' : c);
    return k;
  }();
  if (mapping.has_individual(key)) return mapping.individual(key);
  return Iri(base + "designtype/" + slugify(design.label));
}

rdf::Iri cited_article_iri(const std::string& doi) { return Iri("https://doi.org/" + doi); }

rdf::Iri unit_iri(Unit unit, const MappingTable& mapping) {
  switch (unit) {
    case Unit::Kelvin: return mapping.individual("unit_K");
    case Unit::MilliWatt: return mapping.individual("unit_mW");
    case Unit::Watt: return mapping.individual("unit_W");
    case Unit::TeraHertz: return mapping.individual("unit_THz");
    case Unit::GigaHertz: return mapping.individual("unit_GHz");
  }
  throw std::logic_error("unreachable unit");
}

rdf::Iri quantity_kind_iri(QuantityKind kind, const MappingTable& mapping) {
  switch (kind) {
    case QuantityKind::Temperature: return mapping.individual("kind_Temperature");
    case QuantityKind::Power: return mapping.individual("kind_Power");
    case QuantityKind::Frequency: return mapping.individual("kind_Frequency");
  }
  throw std::logic_error("unreachable kind");
}

std::vector<rdf::Triple> record_to_triples(const QclDeviceRecord& record,
                                           const MappingTable& mapping, const std::string& base) {
  const auto violations = validate_record(record);
  if (!violations.empty()) {
    throw Error("record \"" + record.device_id + "\" fails validation (" + violations[0].field +
                ": " + violations[0].message + "); refusing to emit triples");
  }
  const DeviceIris iris = mint_iris(record.device_id, base);
  std::vector<Triple> out;

  out.push_back({iris.device, rdf::rdf_type(), mapping.class_iri(mapping_keys::kDeviceClass)});

  if (record.heterostructure) {
    const auto& hs = *record.heterostructure;
    out.push_back({iris.heterostructure, rdf::rdf_type(),
                   mapping.class_iri(mapping_keys::kHeterostructureClass)});
    out.push_back(
        {iris.device, mapping.predicate(mapping_keys::kHasHeterostructure), iris.heterostructure});
    out.push_back({iris.heterostructure, mapping.predicate(mapping_keys::kMatFormula),
                   rdf::string_literal(hs.mat_formula)});
    if (hs.design_type) {
      const Iri design = design_type_iri(*hs.design_type, mapping, base);
      out.push_back({iris.heterostructure, mapping.predicate(mapping_keys::kHasDesignType), design});
      out.push_back({design, mapping.predicate(mapping_keys::kDesignLabel),
                     rdf::string_literal(hs.design_type->label)});
    }
  }

  if (record.working_mode) {
    const char* key = *record.working_mode == WorkingMode::ContinuousWave
                          ? mapping_keys::kModeContinuousWave
                          : mapping_keys::kModePulsed;
    out.push_back(
        {iris.device, mapping.predicate(mapping_keys::kHasWorkingMode), mapping.individual(key)});
  }

  const auto emit_quantity = [&](const std::optional<Quantity>& q, const Iri& node,
                                 const char* property_key) {
    if (!q) return;
    out.push_back({iris.device, mapping.predicate(property_key), node});
    out.push_back(
        {node, mapping.predicate(mapping_keys::kNumericValue), rdf::double_literal(q->value)});
    out.push_back({node, mapping.predicate(mapping_keys::kUnit), unit_iri(q->unit, mapping)});
    out.push_back({node, mapping.predicate(mapping_keys::kQuantityKind),
                   quantity_kind_iri(q->kind, mapping)});
  };
  emit_quantity(record.temperature, iris.temperature, mapping_keys::kHasWorkingTemperature);
  emit_quantity(record.power, iris.power, mapping_keys::kHasOpticalPower);
  emit_quantity(record.frequency, iris.frequency, mapping_keys::kHasLasingFrequency);

  if (record.doi || record.url || !record.cited_dois.empty()) {
    out.push_back({iris.device, mapping.predicate(mapping_keys::kDerivedFrom), iris.article});
    if (record.doi) {
      out.push_back(
          {iris.article, mapping.predicate(mapping_keys::kDoi), rdf::string_literal(*record.doi)});
    }
    if (record.url) {
      out.push_back(
          {iris.article, mapping.predicate(mapping_keys::kUri), rdf::any_uri_literal(*record.url)});
    }
    for (const auto& cited : record.cited_dois) {
      const Iri cited_iri = cited_article_iri(cited);
      out.push_back({iris.article, mapping.predicate(mapping_keys::kCites), cited_iri});
      out.push_back(
          {cited_iri, mapping.predicate(mapping_keys::kDoi), rdf::string_literal(cited)});
    }
  }
  return out;
}

rdf::Graph build_graph(const std::vector<QclDeviceRecord>& records, const MappingTable& mapping,
                       const std::string& base) {
  rdf::Graph graph;
  for (const auto& [prefix, iri] : rdf::default_prefixes()) {
    graph.add_namespace(prefix, iri);
  }
  graph.add_namespace("qkg", base);
  for (const auto& record : records) {
    for (auto& triple : record_to_triples(record, mapping, base)) {
      graph.insert(std::move(triple));
    }
  }
  return graph;
}

}  // namespace qclkg
