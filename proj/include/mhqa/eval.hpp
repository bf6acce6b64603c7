#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mhqa/external.hpp"
#include "mhqa/pipeline.hpp"

namespace mhqa {

struct PredictOptions {
    // When set, extractive answers come from the generation service instead
    // of local greedy decoding.
    std::optional<ExternalConfig> external;
};

struct Prediction {
    std::string example_id;
    Task task = Task::EQA;
    Subset doc_set;
    std::set<std::pair<int, int>> rationale; // (document, sentence)
    std::vector<std::string> answer_tokens;  // EQA
    bool bqa_supported = false;
    int choice_index = -1; // MCQ
    bool truncated = false;
    double doc_logp = 0.0;
    double rationale_logp = 0.0;
    double answer_logp = 0.0;
};

// Argmax document set, then argmax rationale, then greedy decoding or
// per-choice normalization depending on the task.
Prediction predict(const Model& model, const Example& ex, const PredictOptions& opt = {});

struct MetricsGroup {
    int count = 0;
    int with_gold_docs = 0;
    int with_gold_rationale = 0;
    double sentence_f1 = 0.0;
    double doc_f1 = 0.0;
    double answer_f1 = 0.0;
    double answer_em = 0.0;
};

struct MetricsReport {
    MetricsGroup overall;
    std::map<std::string, MetricsGroup> by_tag; // groups with zero examples are omitted
};

MetricsReport evaluate(const Model& model, const std::vector<Example>& examples,
                       const PredictOptions& opt = {});

std::string metrics_to_json(const MetricsReport& report);
std::string predictions_to_json(const std::vector<Prediction>& preds);

// Factorized document selection: a per-document categorical from singleton
// scores, with set probability renormalized over valid sets of the given
// size. Selection picks the top-set_size individual documents.
SetDistribution indep_doc_distribution(const ParamStore& params, const std::vector<int>& question,
                                       const std::vector<std::vector<std::vector<int>>>& documents,
                                       int set_size);

struct ShortcutRecord {
    std::string example_id;
    Subset predicted_docs;
    std::set<std::pair<int, int>> predicted_rationale;
    std::string note;
};

struct ShortcutReport {
    std::vector<ShortcutRecord> flagged;
    int skipped_missing_gold = 0;
};

// Flags examples answered exactly right while the predicted rationale is
// wrong and exactly one predicted document is annotated.
ShortcutReport find_shortcuts(const Model& model, const std::vector<Example>& examples,
                              const PredictOptions& opt = {});

std::string shortcuts_to_json(const ShortcutReport& report);

} // namespace mhqa
