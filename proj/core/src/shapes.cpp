#include <charconv>
#include <set>
#include <sstream>

#include "qclkg/errors.hpp"
#include "qclkg/kg.hpp"

namespace qclkg {

namespace {

using rdf::Iri;
using rdf::Literal;
using rdf::Term;

// Focus nodes in graph order, without duplicates.
std::vector<Iri> focus_nodes(const rdf::Graph& graph, const ShapeRule& rule) {
  std::vector<Iri> focus;
  std::set<std::string> seen;
  const auto add = [&](const Iri& node) {
    if (seen.insert(node.value).second) focus.push_back(node);
  };
  if (rule.target_kind == ShapeRule::TargetKind::InstancesOfClass) {
    const Iri type = rdf::rdf_type();
    for (const auto& t : graph.triples()) {
      if (t.predicate == type && std::holds_alternative<Iri>(t.object) &&
          std::get<Iri>(t.object) == rule.target_class) {
        add(t.subject);
      }
    }
  } else {
    for (const auto& t : graph.triples()) {
      for (const auto& p : rule.target_predicates) {
        if (t.predicate == p && std::holds_alternative<Iri>(t.object)) {
          add(std::get<Iri>(t.object));
        }
      }
    }
  }
  return focus;
}

void check_focus(const rdf::Graph& graph, const ShapeRule& rule, const Iri& focus,
                 std::vector<ShapeViolation>& out) {
  const auto objects = graph.objects_of(focus, rule.path);
  switch (rule.constraint) {
    case ShapeRule::Constraint::RequiredPath:
      if (objects.empty()) {
        out.push_back({rule.id, focus, rule.path, "required value is missing"});
      }
      break;
    case ShapeRule::Constraint::MaxCount:
      if (objects.size() > rule.max_count) {
        out.push_back({rule.id, focus, rule.path,
                       "found " + std::to_string(objects.size()) + " values, at most " +
                           std::to_string(rule.max_count) + " allowed"});
      }
      break;
    case ShapeRule::Constraint::DatatypeOf:
      for (const auto& obj : objects) {
        if (!std::holds_alternative<Literal>(obj)) {
          out.push_back({rule.id, focus, rule.path, "value is not a literal"});
          continue;
        }
        const auto& lit = std::get<Literal>(obj);
        if (!(lit.datatype == rule.datatype)) {
          out.push_back({rule.id, focus, rule.path,
                         "datatype is <" + lit.datatype.value + ">, expected <" +
                             rule.datatype.value + ">"});
          continue;
        }
        if (rule.min_value) {
          double v = 0.0;
          const char* begin = lit.lexical.data();
          auto res = std::from_chars(begin, begin + lit.lexical.size(), v);
          if (res.ec != std::errc{} || v < *rule.min_value) {
            out.push_back({rule.id, focus, rule.path,
                           "value \"" + lit.lexical + "\" is below the minimum of " +
                               render_double(*rule.min_value)});
          }
        }
      }
      break;
    case ShapeRule::Constraint::ValueIn:
      for (const auto& obj : objects) {
        bool allowed = false;
        if (std::holds_alternative<Iri>(obj)) {
          for (const auto& a : rule.allowed_values) {
            if (std::get<Iri>(obj) == a) {
              allowed = true;
              break;
            }
          }
        }
        if (!allowed) {
          const std::string shown = std::holds_alternative<rdf::Iri>(obj)
                                        ? "<" + std::get<rdf::Iri>(obj).value + ">"
                                        : "\"" + std::get<rdf::Literal>(obj).lexical + "\"";
          out.push_back({rule.id, focus, rule.path, "value " + shown + " is not in the allowed set"});
        }
      }
      break;
  }
}

}  // namespace

std::vector<ShapeRule> default_shape_rules(const MappingTable& mapping) {
  using TK = ShapeRule::TargetKind;
  using C = ShapeRule::Constraint;
  const std::vector<Iri> quantity_predicates = {
      mapping.predicate(mapping_keys::kHasWorkingTemperature),
      mapping.predicate(mapping_keys::kHasOpticalPower),
      mapping.predicate(mapping_keys::kHasLasingFrequency),
  };
  const Iri device_class = mapping.class_iri(mapping_keys::kDeviceClass);

  std::vector<ShapeRule> rules;
  {
    ShapeRule r;
    r.id = "device-hs-maxcount";
    r.target_kind = TK::InstancesOfClass;
    r.target_class = device_class;
    r.constraint = C::MaxCount;
    r.path = mapping.predicate(mapping_keys::kHasHeterostructure);
    r.max_count = 1;
    rules.push_back(r);
  }
  const auto quantity_rule = [&](const char* id, C constraint, const char* path_key) {
    ShapeRule r;
    r.id = id;
    r.target_kind = TK::ObjectsOfAnyPredicate;
    r.target_predicates = quantity_predicates;
    r.constraint = constraint;
    r.path = mapping.predicate(path_key);
    r.max_count = 1;
    return r;
  };
  rules.push_back(quantity_rule("qty-value-required", C::RequiredPath, mapping_keys::kNumericValue));
  rules.push_back(quantity_rule("qty-value-maxcount", C::MaxCount, mapping_keys::kNumericValue));
  rules.push_back(quantity_rule("qty-unit-required", C::RequiredPath, mapping_keys::kUnit));
  rules.push_back(quantity_rule("qty-unit-maxcount", C::MaxCount, mapping_keys::kUnit));
  rules.push_back(quantity_rule("qty-kind-required", C::RequiredPath, mapping_keys::kQuantityKind));
  rules.push_back(quantity_rule("qty-kind-maxcount", C::MaxCount, mapping_keys::kQuantityKind));
  {
    ShapeRule r;
    r.id = "temp-value-datatype";
    r.target_kind = TK::ObjectsOfAnyPredicate;
    r.target_predicates = {mapping.predicate(mapping_keys::kHasWorkingTemperature)};
    r.constraint = C::DatatypeOf;
    r.path = mapping.predicate(mapping_keys::kNumericValue);
    r.datatype = rdf::xsd::double_type();
    r.min_value = 0.0;
    rules.push_back(r);
  }
  {
    ShapeRule r;
    r.id = "mode-value-in";
    r.target_kind = TK::InstancesOfClass;
    r.target_class = device_class;
    r.constraint = C::ValueIn;
    r.path = mapping.predicate(mapping_keys::kHasWorkingMode);
    r.allowed_values = {mapping.individual(mapping_keys::kModeContinuousWave),
                        mapping.individual(mapping_keys::kModePulsed)};
    rules.push_back(r);
  }
  {
    ShapeRule r;
    r.id = "device-article-required";
    r.target_kind = TK::InstancesOfClass;
    r.target_class = device_class;
    r.constraint = C::RequiredPath;
    r.path = mapping.predicate(mapping_keys::kDerivedFrom);
    rules.push_back(r);
  }
  {
    ShapeRule r;
    r.id = "device-article-maxcount";
    r.target_kind = TK::InstancesOfClass;
    r.target_class = device_class;
    r.constraint = C::MaxCount;
    r.path = mapping.predicate(mapping_keys::kDerivedFrom);
    r.max_count = 1;
    rules.push_back(r);
  }
  {
    ShapeRule r;
    r.id = "article-doi-required";
    r.target_kind = TK::ObjectsOfAnyPredicate;
    r.target_predicates = {mapping.predicate(mapping_keys::kDerivedFrom)};
    r.constraint = C::RequiredPath;
    r.path = mapping.predicate(mapping_keys::kDoi);
    rules.push_back(r);
  }
  return rules;
}

ValidationReport validate_consistency(const rdf::Graph& graph,
                                      const std::vector<ShapeRule>& rules) {
  ValidationReport report;
  for (const auto& rule : rules) {
    for (const auto& focus : focus_nodes(graph, rule)) {
      check_focus(graph, rule, focus, report.violations);
    }
  }
  return report;
}

std::string render_report(const ValidationReport& report) {
  std::ostringstream out;
  if (report.ok()) {
    out << "consistency: ok (0 violations)\n";
    return out.str();
  }
  out << "consistency: " << report.violations.size() << " violation(s)\n";
  for (const auto& v : report.violations) {
    out << v.rule_id << " <" << v.focus.value << "> via <" << v.path.value << ">: " << v.message
        << "\n";
  }
  return out.str();
}

}  // namespace qclkg
