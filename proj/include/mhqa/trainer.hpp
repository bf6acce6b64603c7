#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mhqa/pipeline.hpp"

namespace mhqa {

struct TrainConfig {
    double learning_rate = 0.05;
    double warmup_fraction = 0.10; // fraction of steps ramping 0 -> learning_rate
    int epochs = 10;
    int batch_size = 8;
    int k_doc = 10;
    int k_sent = 9;
    int max_rationale_sentences = 4;
    std::uint64_t seed = 0;
    int checkpoint_every = 100; // steps

    void validate() const;
};

// Linear ramp over the first warmup_fraction * total_steps steps, constant
// learning_rate afterwards.
double lr_at(long step, long total_steps, const TrainConfig& cfg);

struct CheckpointMeta {
    int format_version = 1;
    std::string config_hash;
    long step = 0;
    std::uint64_t seed = 0;
    std::uint64_t vocab_hash = 0;
    double dev_answer_f1 = 0.0;
    double dev_answer_em = 0.0;
    double dev_nll = 0.0;
};

// Snapshot whose arrays are exactly representable as 32-bit floats; the file
// round-trips bit for bit.
struct Checkpoint {
    CheckpointMeta meta;
    ParamStore params;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

struct StepRecord {
    long step = 0;
    double objective = 0.0; // batch loss: -(mean marginal log-likelihood)
};

struct CheckpointRecord {
    long step = 0;
    double answer_f1 = 0.0;
    double answer_em = 0.0;
    double nll = 0.0;
};

struct TrainHistory {
    std::vector<StepRecord> steps;
    std::vector<CheckpointRecord> checkpoints;
    bool diverged = false;
};

std::string history_to_json(const TrainHistory& history);

enum class SelectionCriterion { AnswerF1, AnswerEM, Nll };
SelectionCriterion selection_criterion_from_name(const std::string& name);

// Argmax for F1/EM, argmin for NLL; earliest step on ties.
std::size_t select_checkpoint(const std::vector<CheckpointRecord>& checkpoints,
                              SelectionCriterion criterion);

// Zeroes the gradient buffers, accumulates the gradient of
// -(1/|batch|) * sum approx_marginal_ll, and returns that loss.
// Candidate-set membership is treated as constant. Throws naming the
// parameter array if any gradient entry is non-finite.
double compute_gradients(Model& model, const std::vector<EncodedExample>& batch,
                         const MarginalOptions& opt);

struct TrainResult {
    TrainHistory history;
    Checkpoint best;
};

// Plain gradient descent over seeded shuffled batches with warmup, periodic
// dev-scored checkpoints, and best-checkpoint selection by dev answer F1.
// A non-finite objective aborts, leaving the model at the last checkpoint.
TrainResult train_model(Model& model, const std::vector<Example>& train_set,
                        const std::vector<Example>& dev_set, const TrainConfig& cfg);

// Central-difference verification of compute_gradients on the given batch;
// the relative error uses |a - n| / max(1, |a|, |n|).
struct GradCheckResult {
    struct ArrayResult {
        std::string name;
        double max_rel_err = 0.0;
    };
    std::vector<ArrayResult> arrays;
    double max_rel_err = 0.0;
};

GradCheckResult finite_difference_check(Model& model, const std::vector<EncodedExample>& batch,
                                        const MarginalOptions& opt, double step_size = 1e-4);

} // namespace mhqa
