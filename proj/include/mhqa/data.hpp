#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mhqa {

enum class Task { BQA, MCQ, EQA };

std::string task_name(Task t);
Task task_from_name(const std::string& name);

// One candidate document: a title plus tokenized sentences.
struct Document {
    std::string title;
    std::vector<std::vector<std::string>> sentences;
};

struct BqaAnswer {
    bool supported = false; // label: supported vs refuted
};

struct McqChoice {
    std::vector<std::string> text;
    bool correct = false;
};

struct McqAnswer {
    std::vector<McqChoice> choices; // at least two
};

struct EqaAnswer {
    std::vector<std::string> text; // non-empty token sequence
};

using AnswerSpec = std::variant<BqaAnswer, McqAnswer, EqaAnswer>;

// One QA instance. Gold fields are carried for evaluation only; training
// code paths see a view without them (see trainer).
struct Example {
    std::string id;
    std::vector<std::string> question;
    std::vector<Document> documents;
    Task task = Task::EQA;
    AnswerSpec answer = EqaAnswer{};
    std::optional<std::set<int>> gold_docs;
    std::optional<std::set<std::pair<int, int>>> gold_rationale; // (doc, sentence)
    std::optional<std::string> reasoning_tag;                    // "bridge" | "comparison"

    void validate() const; // throws std::invalid_argument naming the field
};

enum class DatasetFormat { HotpotDistractor, Eraser };

DatasetFormat dataset_format_from_name(const std::string& name);

// Reads a dataset file. Both formats accept the native JSON schema; the
// hotpot_distractor loader additionally accepts the public HotpotQA
// distractor field names ("context", "supporting_facts", ...).
std::vector<Example> load_dataset(const std::string& path, DatasetFormat format);

// Writes the native JSON schema; load_dataset(save_dataset(x)) round-trips.
void save_dataset(const std::string& path, const std::vector<Example>& examples);

} // namespace mhqa
