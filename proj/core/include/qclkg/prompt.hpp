#pragma once

#include <string>
#include <vector>

#include "qclkg/properties.hpp"
#include "qclkg/retrieval.hpp"

namespace qclkg {

// Few-shot prompt skeleton. example_block must use each of {instruction},
// {sentence}, {extraction} exactly once; query_block uses {instruction} and
// {sentence} exactly once and no {extraction}.
struct PromptTemplate {
  std::string preamble;
  std::string example_block;
  std::string query_block;
  std::string output_spec;
};

PromptTemplate default_prompt_template();

// Throws TemplateError on slot-count violations.
void validate_template(const PromptTemplate& tpl);

// Canonical JSON envelope rendered from a fragment, used both to show worked
// examples inside prompts and as the format backends are asked to produce:
//   {"temperature": ..., "power": ..., "frequency": ..., "design_type": ...,
//    "heterostructure": ..., "working_mode": ...}
// with null for absent values. Surface strings win over re-rendered values.
std::string render_envelope(const RecordFragment& fragment);

struct GeneratedPrompt {
  std::string id;
  std::string text;
  std::vector<std::string> example_ids;  // retrieval-rank order
  std::size_t k = 0;                     // examples requested
};

// Assembles preamble + output format, the example blocks in the order given,
// then the query block. Deterministic: same inputs, same text.
GeneratedPrompt build_prompt(const PromptTemplate& tpl, const std::string& instruction,
                             const std::string& sentence,
                             const std::vector<RetrievalHit>& examples, std::string prompt_id);

// Instruction used when extracting every property at once.
std::string default_instruction();
// Instruction used in per-property mode.
std::string default_instruction(PropertyClass cls);

}  // namespace qclkg
