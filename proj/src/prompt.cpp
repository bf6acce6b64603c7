#include "mhqa/prompt.hpp"

#include <stdexcept>

namespace mhqa {

RenderedPrompt render_prompt(Task task, const std::string& question, const std::string& rationale,
                             const std::vector<std::pair<std::string, bool>>* choices) {
    RenderedPrompt r;
    switch (task) {
        case Task::BQA:
            r.input = "A claim to be verified is that " + question + " We have following facts: " + rationale;
            r.output = "The claim is thus {supported/refuted}.";
            break;
        case Task::MCQ: {
            if (choices == nullptr || choices->empty()) {
                throw std::invalid_argument("render_prompt: mcq requires answer choices");
            }
            r.input = "Question: " + question + " [SEP] " + rationale;
            for (std::size_t i = 0; i < choices->size(); ++i) {
                if (i) r.output += " [SEP] ";
                r.output += mcq_choice_output((*choices)[i].first, (*choices)[i].second);
            }
            break;
        }
        case Task::EQA:
            r.input = question + " [SEP] " + rationale;
            r.output = "{y}";
            break;
    }
    return r;
}

std::string bqa_output(bool supported) {
    return std::string("The claim is thus ") + (supported ? "supported" : "refuted") + ".";
}

std::string mcq_choice_output(const std::string& choice_text, bool correct) {
    return "Answer: " + choice_text + " (" + (correct ? "correct" : "wrong") + ")";
}

} // namespace mhqa
