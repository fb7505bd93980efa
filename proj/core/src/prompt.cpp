#include "qclkg/prompt.hpp"

#include <nlohmann/json.hpp>

#include "qclkg/errors.hpp"

namespace qclkg {

namespace {

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

std::string fill_slot(std::string text, const std::string& slot, const std::string& value) {
  const std::size_t pos = text.find(slot);
  if (pos != std::string::npos) text.replace(pos, slot.size(), value);
  return text;
}

}  // namespace

PromptTemplate default_prompt_template() {
  PromptTemplate tpl;
  tpl.preamble =
      "You extract quantum cascade laser properties from sentences taken from scientific "
      "articles. Follow the worked examples, then answer for the final sentence.";
  tpl.example_block =
      "Instruction: {instruction}\n"
      "Sentence: {sentence}\n"
      "Extraction: {extraction}\n";
  tpl.query_block =
      "Instruction: {instruction}\n"
      "Sentence: {sentence}\n"
      "Extraction:";
  tpl.output_spec =
      "Reply with one JSON object whose keys are temperature, power, frequency, design_type, "
      "heterostructure and working_mode. Use null for anything the sentence does not state, "
      "and copy stated values verbatim, including their units.";
  return tpl;
}

void validate_template(const PromptTemplate& tpl) {
  const auto check = [](const std::string& block, const char* block_name, const char* slot,
                        std::size_t want) {
    const std::size_t n = count_occurrences(block, slot);
    if (n != want) {
      throw TemplateError(std::string(block_name) + " must use " + slot + " exactly " +
                          std::to_string(want) + " time(s), found " + std::to_string(n));
    }
  };
  check(tpl.example_block, "example_block", "{instruction}", 1);
  check(tpl.example_block, "example_block", "{sentence}", 1);
  check(tpl.example_block, "example_block", "{extraction}", 1);
  check(tpl.query_block, "query_block", "{instruction}", 1);
  check(tpl.query_block, "query_block", "{sentence}", 1);
  check(tpl.query_block, "query_block", "{extraction}", 0);
}

std::string render_envelope(const RecordFragment& fragment) {
  nlohmann::ordered_json obj;
  const auto surface_or = [&](PropertyClass cls,
                              const std::string& fallback) -> nlohmann::ordered_json {
    auto it = fragment.surface.find(cls);
    if (it != fragment.surface.end()) return it->second;
    if (!fallback.empty()) return fallback;
    return nullptr;
  };
  obj["temperature"] = surface_or(PropertyClass::Temperature,
                                  fragment.temperature ? render_quantity(*fragment.temperature) : "");
  obj["power"] = surface_or(PropertyClass::Power,
                            fragment.power ? render_quantity(*fragment.power) : "");
  obj["frequency"] = surface_or(PropertyClass::Frequency,
                                fragment.frequency ? render_quantity(*fragment.frequency) : "");
  obj["design_type"] = surface_or(PropertyClass::DesignType,
                                  fragment.design_type ? fragment.design_type->label : "");
  obj["heterostructure"] = surface_or(PropertyClass::Heterostructure,
                                      fragment.heterostructure ? *fragment.heterostructure : "");
  obj["working_mode"] =
      fragment.working_mode ? nlohmann::ordered_json(to_string(*fragment.working_mode))
                            : nlohmann::ordered_json(nullptr);
  return obj.dump();
}

GeneratedPrompt build_prompt(const PromptTemplate& tpl, const std::string& instruction,
                             const std::string& sentence,
                             const std::vector<RetrievalHit>& examples, std::string prompt_id) {
  validate_template(tpl);
  GeneratedPrompt prompt;
  prompt.id = std::move(prompt_id);
  prompt.k = examples.size();
  std::string text = tpl.preamble + "\n" + tpl.output_spec + "\n\n";
  for (const auto& hit : examples) {
    prompt.example_ids.push_back(hit.sample.id);
    std::string block = tpl.example_block;
    block = fill_slot(block, "{instruction}", hit.sample.instruction);
    block = fill_slot(block, "{sentence}", hit.sample.sentence);
    block = fill_slot(block, "{extraction}", render_envelope(hit.sample.expected));
    text += block + "\n";
  }
  std::string query = tpl.query_block;
  query = fill_slot(query, "{instruction}", instruction);
  query = fill_slot(query, "{sentence}", sentence);
  text += query;
  prompt.text = std::move(text);
  return prompt;
}

std::string default_instruction() {
  return "Extract the quantum cascade laser properties stated in the sentence.";
}

std::string default_instruction(PropertyClass cls) {
  switch (cls) {
    case PropertyClass::Temperature:
      return "Extract the working temperature of the laser from the sentence.";
    case PropertyClass::Power:
      return "Extract the optical output power of the laser from the sentence.";
    case PropertyClass::Frequency:
      return "Extract the lasing frequency of the laser from the sentence.";
    case PropertyClass::DesignType:
      return "Extract the active region design type of the laser from the sentence.";
    case PropertyClass::Heterostructure:
      return "Extract the heterostructure material formula of the laser from the sentence.";
  }
  throw std::logic_error("unreachable property class");
}

}  // namespace qclkg
