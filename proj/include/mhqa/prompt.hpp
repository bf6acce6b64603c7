#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mhqa/data.hpp"

namespace mhqa {

struct RenderedPrompt {
    std::string input;
    std::string output; // output template; label slots stay symbolic where unknown
};

// Text-to-text conversion templates, byte-exact:
//   BQA  in:  "A claim to be verified is that {x} We have following facts: {z}"
//        out: "The claim is thus {supported/refuted}."
//   MCQ  in:  "Question: {x} [SEP] {z}"
//        out: "Answer: {y1} ({correct/wrong}) [SEP] Answer: {y2} ..." (choices filled)
//   EQA  in:  "{x} [SEP] {z}"
//        out: "{y}"
// MCQ requires choices; passing none is an error.
RenderedPrompt render_prompt(Task task, const std::string& question, const std::string& rationale,
                             const std::vector<std::pair<std::string, bool>>* choices = nullptr);

// Concrete output strings scored by the answer model.
std::string bqa_output(bool supported);
std::string mcq_choice_output(const std::string& choice_text, bool correct);

} // namespace mhqa
