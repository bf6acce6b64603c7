#pragma once

#include <utility>
#include <vector>

#include "mhqa/data.hpp"
#include "mhqa/params.hpp"
#include "mhqa/scorer.hpp"
#include "mhqa/text.hpp"

namespace mhqa {

// Next-token model: logits = dec_u . tanh(dec_w . [context; emb(prev)]).
// Position 0 conditions on a zero "begin" embedding; the output vocabulary
// has one extra end-of-sequence entry (id == vocab_size).

// Token ids of the rendered prompt input for a task, built so that it equals
// tokenize(render_prompt(...).input) for the same arguments.
std::vector<int> assemble_context_ids(const Vocab& vocab, Task task, const std::vector<int>& question,
                                      const std::vector<std::vector<int>>& rationale_sentences);

struct DecStepCache {
    int prev_id = -1; // -1 marks the begin state
    std::vector<double> hidden; // post-tanh
    std::vector<double> probs;  // softmax over vocab+1
    int gold_id = -1;
};

struct AnswerCache {
    std::vector<int> ctx_tokens;
    Embedding ctx;
    std::vector<DecStepCache> steps;
};

// Raw next-token logits for one step; prev_id == -1 is the begin state.
std::vector<double> answer_step_logits(const ParamStore& params, const Embedding& ctx, int prev_id);

// Teacher-forced log-likelihood of target_ids ++ EOS given a fixed context
// embedding. Cache is optional and only needed for backprop.
double answer_seq_logprob(const ParamStore& params, const Embedding& ctx,
                          const std::vector<int>& target_ids, AnswerCache* cache = nullptr);

// Teacher-forced log p(answer | rationale, question) with the context built
// from the rendered prompt input. Empty rationale or answer is an error.
double answer_logprob(const ParamStore& params, const Vocab& vocab, Task task,
                      const std::vector<int>& question,
                      const std::vector<std::vector<int>>& rationale_sentences,
                      const std::vector<int>& answer_tokens);

struct DecodeResult {
    std::vector<int> tokens; // without EOS
    bool truncated = false;
    double logprob = 0.0; // sum of chosen-token log-probs, EOS included when emitted
};

// Argmax decoding, ties to the lowest token id, stops at EOS or max_len.
DecodeResult greedy_decode(const ParamStore& params, const Vocab& vocab, Task task,
                           const std::vector<int>& question,
                           const std::vector<std::vector<int>>& rationale_sentences, int max_len);

// Softmax over per-choice log-probs; argmax with lowest-index tie-break.
std::pair<std::vector<double>, int> choice_normalize(const std::vector<double>& choice_logprobs);

} // namespace mhqa
