#include "qclkg/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qclkg/errors.hpp"

namespace qclkg {

namespace {

QuantityKind kind_for(PropertyClass cls) {
  switch (cls) {
    case PropertyClass::Temperature: return QuantityKind::Temperature;
    case PropertyClass::Power: return QuantityKind::Power;
    case PropertyClass::Frequency: return QuantityKind::Frequency;
    default: throw std::logic_error("not a quantity class");
  }
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::TruePositive: return "tp";
    case Verdict::FalsePositive: return "fp";
    case Verdict::FalseNegative: return "fn";
  }
  throw std::logic_error("unreachable verdict");
}

std::optional<double> ClassCounts::precision() const {
  const std::size_t denom = tp + fp;
  if (denom == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(denom);
}

std::optional<double> ClassCounts::recall() const {
  const std::size_t denom = tp + fn;
  if (denom == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(denom);
}

MatchOutcome judge_sample(const InstructionSample& gold, const std::string& predicted_surface) {
  MatchOutcome out;
  out.sample_id = gold.id;
  out.property_class = gold.property_class;
  out.predicted_surface = predicted_surface;
  auto gs = gold.expected.surface.find(gold.property_class);
  out.gold_surface = gs != gold.expected.surface.end() ? gs->second : std::string();

  if (predicted_surface.empty()) {
    out.verdict = Verdict::FalseNegative;
    out.note = "no prediction";
    return out;
  }

  switch (gold.property_class) {
    case PropertyClass::Temperature:
    case PropertyClass::Power:
    case PropertyClass::Frequency: {
      const QuantityKind kind = kind_for(gold.property_class);
      Quantity gold_q = parse_quantity(out.gold_surface, kind);
      Quantity pred_q;
      try {
        pred_q = parse_quantity(predicted_surface, kind);
      } catch (const Error& e) {
        out.verdict = Verdict::FalsePositive;
        out.wrong_on_gold = true;
        out.note = std::string("prediction is not a usable quantity: ") + e.what();
        return out;
      }
      if (to_base_value(pred_q) == to_base_value(gold_q)) {
        out.verdict = Verdict::TruePositive;
      } else {
        out.verdict = Verdict::FalsePositive;
        out.wrong_on_gold = true;
        out.note = "value differs from gold after base-unit conversion";
      }
      return out;
    }
    case PropertyClass::DesignType: {
      const std::string gold_label = normalize_design_label(out.gold_surface);
      const std::string pred_label = normalize_design_label(predicted_surface);
      if (!pred_label.empty() && pred_label == gold_label) {
        out.verdict = Verdict::TruePositive;
      } else {
        out.verdict = Verdict::FalsePositive;
        out.wrong_on_gold = true;
        out.note = "design label differs from gold after normalization";
      }
      return out;
    }
    case PropertyClass::Heterostructure: {
      if (trim(predicted_surface) == trim(out.gold_surface)) {
        out.verdict = Verdict::TruePositive;
      } else {
        out.verdict = Verdict::FalsePositive;
        out.wrong_on_gold = true;
        out.note = "material formula differs from gold";
      }
      return out;
    }
  }
  throw std::logic_error("unreachable property class");
}

EvalReport evaluate(const std::vector<InstructionSample>& gold,
                    const std::vector<Prediction>& predictions) {
  EvalReport report;
  for (PropertyClass cls : kAllPropertyClasses) report.per_class[cls];

  std::map<std::string, const Prediction*> by_id;
  for (const auto& p : predictions) {
    if (!by_id.emplace(p.sample_id, &p).second) {
      throw Error("duplicate prediction for sample \"" + p.sample_id + "\"");
    }
  }
  std::set<std::string> gold_ids;

  for (const auto& sample : gold) {
    gold_ids.insert(sample.id);
    std::string predicted;
    if (auto it = by_id.find(sample.id); it != by_id.end()) {
      if (auto vit = it->second->values.find(sample.property_class);
          vit != it->second->values.end()) {
        predicted = vit->second;
      }
    }
    report.outcomes.push_back(judge_sample(sample, predicted));
  }

  // Predictions for sentences outside the gold set are spurious.
  for (const auto& p : predictions) {
    if (gold_ids.count(p.sample_id)) continue;
    for (const auto& [cls, surface] : p.values) {
      if (surface.empty()) continue;
      MatchOutcome out;
      out.sample_id = p.sample_id;
      out.property_class = cls;
      out.verdict = Verdict::FalsePositive;
      out.predicted_surface = surface;
      out.note = "no gold sample for this sentence";
      report.outcomes.push_back(std::move(out));
    }
  }

  for (const auto& out : report.outcomes) {
    ClassCounts& counts = report.per_class[out.property_class];
    switch (out.verdict) {
      case Verdict::TruePositive: ++counts.tp; break;
      case Verdict::FalseNegative: ++counts.fn; break;
      case Verdict::FalsePositive:
        ++counts.fp;
        if (out.wrong_on_gold) ++counts.fn;  // the gold value was also missed
        break;
    }
  }

  double precision_sum = 0.0, recall_sum = 0.0;
  std::size_t precision_n = 0, recall_n = 0;
  for (const auto& [cls, counts] : report.per_class) {
    report.micro.tp += counts.tp;
    report.micro.fp += counts.fp;
    report.micro.fn += counts.fn;
    if (auto p = counts.precision()) {
      precision_sum += *p;
      ++precision_n;
    }
    if (auto r = counts.recall()) {
      recall_sum += *r;
      ++recall_n;
    }
  }
  if (precision_n > 0) report.macro_precision = precision_sum / precision_n;
  if (recall_n > 0) report.macro_recall = recall_sum / recall_n;
  return report;
}

std::vector<Prediction> predictions_from_run(const ExtractionRun& run) {
  std::vector<Prediction> out;
  out.reserve(run.results.size());
  for (const auto& ex : run.results) {
    Prediction p;
    p.sample_id = ex.sentence_id;
    p.values = ex.fragment.surface;
    out.push_back(std::move(p));
  }
  return out;
}

EvalReport evaluate_run(const std::vector<InstructionSample>& gold, const ExtractionRun& run) {
  return evaluate(gold, predictions_from_run(run));
}

std::vector<Prediction> load_predictions_jsonl(std::istream& in) {
  std::vector<Prediction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      throw SchemaError(line_no, "malformed JSON object");
    }
    Prediction p;
    if (!obj.contains("sample_id") || !obj["sample_id"].is_string()) {
      throw SchemaError(line_no, "missing or non-string field \"sample_id\"");
    }
    p.sample_id = obj["sample_id"].get<std::string>();
    if (!obj.contains("values") || !obj["values"].is_object()) {
      throw SchemaError(line_no, "missing or non-object field \"values\"");
    }
    for (const auto& [key, value] : obj["values"].items()) {
      auto cls = property_class_from_envelope_key(key);
      if (!cls) throw SchemaError(line_no, "unknown property key \"" + key + "\"");
      if (value.is_null()) continue;
      if (!value.is_string()) {
        throw SchemaError(line_no, "value for \"" + key + "\" must be a string or null");
      }
      const std::string surface = value.get<std::string>();
      if (!surface.empty()) p.values[*cls] = surface;
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Prediction> load_predictions_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open predictions file: " + path);
  return load_predictions_jsonl(in);
}

void save_predictions_jsonl(std::ostream& out, const std::vector<Prediction>& predictions) {
  for (const auto& p : predictions) {
    nlohmann::ordered_json obj;
    obj["sample_id"] = p.sample_id;
    nlohmann::ordered_json values = nlohmann::ordered_json::object();
    for (PropertyClass cls : kAllPropertyClasses) {
      auto it = p.values.find(cls);
      if (it != p.values.end() && !it->second.empty()) {
        values[std::string(envelope_key(cls))] = it->second;
      }
    }
    obj["values"] = std::move(values);
    out << obj.dump() << '\n';
  }
}

std::string render_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", fraction * 100.0);
  return buf;
}

namespace {

std::string percent_or_dash(const std::optional<double>& value) {
  return value ? render_percent(*value) + "%" : std::string("-");
}

}  // namespace

std::string render_metrics_text(const EvalReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(16) << "class" << std::right << std::setw(5) << "tp"
      << std::setw(5) << "fp" << std::setw(5) << "fn" << std::setw(12) << "precision"
      << std::setw(10) << "recall" << '\n';
  for (const auto& [cls, counts] : report.per_class) {
    out << std::left << std::setw(16) << to_string(cls) << std::right << std::setw(5) << counts.tp
        << std::setw(5) << counts.fp << std::setw(5) << counts.fn << std::setw(12)
        << percent_or_dash(counts.precision()) << std::setw(10)
        << percent_or_dash(counts.recall()) << '\n';
  }
  out << std::left << std::setw(16) << "micro" << std::right << std::setw(5) << report.micro.tp
      << std::setw(5) << report.micro.fp << std::setw(5) << report.micro.fn << std::setw(12)
      << percent_or_dash(report.micro.precision()) << std::setw(10)
      << percent_or_dash(report.micro.recall()) << '\n';
  out << std::left << std::setw(16) << "macro" << std::right << std::setw(5) << "" << std::setw(5)
      << "" << std::setw(5) << "" << std::setw(12) << percent_or_dash(report.macro_precision)
      << std::setw(10) << percent_or_dash(report.macro_recall) << '\n';
  return out.str();
}

std::string metrics_to_json(const EvalReport& report) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json classes = nlohmann::ordered_json::object();
  for (const auto& [cls, counts] : report.per_class) {
    nlohmann::ordered_json entry;
    entry["tp"] = counts.tp;
    entry["fp"] = counts.fp;
    entry["fn"] = counts.fn;
    entry["precision_pct"] =
        counts.precision() ? nlohmann::ordered_json(render_percent(*counts.precision()))
                           : nlohmann::ordered_json(nullptr);
    entry["recall_pct"] = counts.recall()
                              ? nlohmann::ordered_json(render_percent(*counts.recall()))
                              : nlohmann::ordered_json(nullptr);
    classes[to_string(cls)] = std::move(entry);
  }
  doc["classes"] = std::move(classes);
  nlohmann::ordered_json micro;
  micro["tp"] = report.micro.tp;
  micro["fp"] = report.micro.fp;
  micro["fn"] = report.micro.fn;
  micro["precision_pct"] =
      report.micro.precision() ? nlohmann::ordered_json(render_percent(*report.micro.precision()))
                               : nlohmann::ordered_json(nullptr);
  micro["recall_pct"] =
      report.micro.recall() ? nlohmann::ordered_json(render_percent(*report.micro.recall()))
                            : nlohmann::ordered_json(nullptr);
  doc["micro"] = std::move(micro);
  nlohmann::ordered_json macro;
  macro["precision_pct"] = report.macro_precision
                               ? nlohmann::ordered_json(render_percent(*report.macro_precision))
                               : nlohmann::ordered_json(nullptr);
  macro["recall_pct"] = report.macro_recall
                            ? nlohmann::ordered_json(render_percent(*report.macro_recall))
                            : nlohmann::ordered_json(nullptr);
  doc["macro"] = std::move(macro);
  nlohmann::ordered_json outcomes = nlohmann::ordered_json::array();
  for (const auto& o : report.outcomes) {
    nlohmann::ordered_json entry;
    entry["sample_id"] = o.sample_id;
    entry["class"] = to_string(o.property_class);
    entry["verdict"] = to_string(o.verdict);
    entry["wrong_on_gold"] = o.wrong_on_gold;
    entry["gold"] = o.gold_surface;
    entry["predicted"] = o.predicted_surface;
    entry["note"] = o.note;
    outcomes.push_back(std::move(entry));
  }
  doc["outcomes"] = std::move(outcomes);
  return doc.dump(2) + "\n";
}

}  // namespace qclkg
