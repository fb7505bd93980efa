#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qclkg/corpus.hpp"
#include "qclkg/extractor.hpp"
#include "qclkg/properties.hpp"

namespace qclkg {

// Extraction quality is scored per gold sample: each sample asks for exactly one
// property class, and only the prediction for that class is judged.
enum class Verdict { TruePositive, FalsePositive, FalseNegative };

std::string to_string(Verdict v);

struct MatchOutcome {
  std::string sample_id;
  PropertyClass property_class = PropertyClass::Temperature;
  Verdict verdict = Verdict::FalseNegative;
  // True when the system predicted a value but the gold value differs; such a
  // miss is counted against both precision (fp) and recall (fn).
  bool wrong_on_gold = false;
  std::string gold_surface;       // empty only for spurious predictions
  std::string predicted_surface;  // empty when the system stayed silent
  std::string note;
};

struct ClassCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  // Undefined (nullopt) when the denominator is zero.
  std::optional<double> precision() const;
  std::optional<double> recall() const;
};

struct EvalReport {
  std::map<PropertyClass, ClassCounts> per_class;  // every class present
  std::vector<MatchOutcome> outcomes;
  ClassCounts micro;  // counts summed over classes
  std::optional<double> macro_precision;  // mean over classes where defined
  std::optional<double> macro_recall;
};

// One extraction per sentence, keyed by the gold sample id; values are raw
// surface strings per property class as produced by the extractor.
struct Prediction {
  std::string sample_id;
  std::map<PropertyClass, std::string> values;
};

// Judge one gold sample against the predicted surface for its property class.
// Empty prediction => false negative. A prediction that disagrees with gold
// (unparsable quantities and unitless numbers included) => false positive with
// wrong_on_gold set.
MatchOutcome judge_sample(const InstructionSample& gold, const std::string& predicted_surface);

// Score all gold samples; predictions with a sample_id absent from the gold set
// contribute one false positive per non-empty predicted value.
EvalReport evaluate(const std::vector<InstructionSample>& gold,
                    const std::vector<Prediction>& predictions);

// Bridge from an extraction run: sentence ids become sample ids.
std::vector<Prediction> predictions_from_run(const ExtractionRun& run);
EvalReport evaluate_run(const std::vector<InstructionSample>& gold, const ExtractionRun& run);

// JSONL: {"sample_id": "...", "values": {"temperature": "120 K", ...}} per line.
std::vector<Prediction> load_predictions_jsonl(std::istream& in);
std::vector<Prediction> load_predictions_file(const std::string& path);
void save_predictions_jsonl(std::ostream& out, const std::vector<Prediction>& predictions);

// Renders a fraction as a percentage with four significant digits, e.g. 0.971428
// becomes "97.14" and 1.0 becomes "100".
std::string render_percent(double fraction);

std::string render_metrics_text(const EvalReport& report);
std::string metrics_to_json(const EvalReport& report);

}  // namespace qclkg
