#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mhqa/answer.hpp"
#include "mhqa/data.hpp"
#include "mhqa/params.hpp"
#include "mhqa/scorer.hpp"
#include "mhqa/subsets.hpp"
#include "mhqa/text.hpp"

namespace mhqa {

struct ModelConfig {
    EncoderConfig enc;
    int doc_min_size = 2; // valid document-set sizes for the task
    int doc_max_size = 2;
    int max_rationale = 4; // per-document sentence subset size cap
    bool contiguous = false;
    bool independent_docs = false; // factorized document selection baseline
    int max_answer_len = 8;

    void validate() const;
};

struct Model {
    ParamStore params;
    Vocab vocab;
    ModelConfig cfg;
};

SubsetSpace doc_space_for(const ModelConfig& cfg, int n_docs);
SubsetSpace sentence_space_for(const ModelConfig& cfg, int n_sentences);

// Closed vocabulary over everything scoring touches: question and document
// tokens, answer and label renderings, and the prompt template tokens.
Vocab build_vocab(const std::vector<const std::vector<Example>*>& datasets);

// Id-resolved view of an example used by training and scoring. Gold
// annotations are deliberately not carried here.
struct EncodedExample {
    std::string id;
    Task task = Task::EQA;
    std::vector<int> question;
    std::vector<std::vector<std::vector<int>>> docs; // [doc][sentence][token]
    std::vector<int> eqa_answer;
    bool bqa_supported = false;
    std::vector<std::pair<std::vector<int>, bool>> mcq_choices;
};

EncodedExample encode_example(const Example& ex, const Vocab& vocab);

// Decoder target sequences.
std::vector<int> bqa_target_ids(const Vocab& vocab, bool supported);
std::vector<int> mcq_target_ids(const Vocab& vocab, const std::vector<int>& choice_tokens, bool correct);
// All sequences teacher-forced for the gold answer (one per MCQ choice).
std::vector<std::vector<int>> gold_answer_targets(const Vocab& vocab, const EncodedExample& ex);

struct MarginalOptions {
    int k_doc = 10;
    int k_sent = 9;
    bool exact = false;            // enumerate every (d, z) instead of top-k
    std::size_t exact_cap = 10000; // max (d, z) count for the exact path
};

// Forward pass over the latent structure with every intermediate needed for
// the hand-written backward pass.
struct SentStage {
    SetDistribution dist;
    std::vector<Embedding> markers;
};

struct CandidateEval {
    std::size_t doc_set_index;
    std::vector<std::size_t> subset_index; // per member document
    double lat_logp = 0.0;                 // document + sentence stages
    double ans_logp = 0.0;
    std::vector<AnswerCache> ans_caches; // one per scored target sequence
    double total = 0.0;
};

struct MarginalForward {
    SubsetSpace doc_space;
    std::vector<DocEmbCache> doc_embs;
    std::vector<Subset> doc_sets;
    std::vector<double> doc_set_scores;
    std::vector<double> doc_set_logps;
    std::vector<MlpCache> doc_set_mlp;   // joint selection
    std::vector<double> singleton_scores; // independent selection
    std::vector<MlpCache> singleton_mlp;
    std::vector<std::optional<SentStage>> sent; // per document, built on demand
    std::vector<CandidateEval> cands;
    double value = 0.0;
};

MarginalForward marginal_forward(const Model& model, const EncodedExample& ex,
                                 const MarginalOptions& opt);

// Accumulates gradients of scale * forward value into the parameter store.
void marginal_backward(const MarginalForward& fwd, const Model& model, const EncodedExample& ex,
                       double scale, ParamStore& params);

// log p(d, z, y | x): document stage + sentence stages + answer stage, with
// the candidate structure given explicitly.
double joint_logprob(const Model& model, const EncodedExample& ex, const Subset& doc_set,
                     const std::vector<Subset>& rationale);

double approx_marginal_ll(const Model& model, const EncodedExample& ex, const MarginalOptions& opt);
double exact_marginal_ll(const Model& model, const EncodedExample& ex, std::size_t cap = 10000);

} // namespace mhqa
