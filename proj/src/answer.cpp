#include "mhqa/answer.hpp"

#include <cmath>
#include <stdexcept>

#include "mhqa/subsets.hpp"

namespace mhqa {

namespace {

std::vector<int> template_ids(const Vocab& vocab, const std::string& text) {
    return vocab.ids(tokenize(text));
}

void append(std::vector<int>& out, const std::vector<int>& part) {
    out.insert(out.end(), part.begin(), part.end());
}

// One decoder step; returns unnormalized logits and fills hidden. Token
// logits carry a tied-embedding readout on top of the hidden state so
// copying a token out of the context is first-order trainable; the readout
// query subtracts the previous token's embedding so an already-emitted token
// stops competing with the end-of-sequence decision:
//   logits[t] = dec_u[t] . tanh(dec_w . [ctx; emb(prev)]) + emb(t) . (ctx - emb(prev))
// The end-of-sequence logit has no embedding row and uses the hidden state
// alone.
std::vector<double> decoder_logits(const ParamStore& params, const Embedding& ctx, int prev_id,
                                   std::vector<double>& hidden) {
    const auto n = static_cast<std::size_t>(params.cfg.embedding_dim);
    const auto h = static_cast<std::size_t>(params.cfg.mlp_hidden);
    std::vector<double> x(2 * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) x[i] = ctx[i];
    if (prev_id >= 0) {
        if (prev_id >= params.vocab_size) throw std::out_of_range("decoder: previous token id out of range");
        const double* row = params.token_embeddings.row(static_cast<std::size_t>(prev_id));
        for (std::size_t i = 0; i < n; ++i) x[n + i] = row[i];
    }
    hidden.assign(h, 0.0);
    for (std::size_t r = 0; r < h; ++r) {
        const double* w = params.dec_w.row(r);
        double acc = 0.0;
        for (std::size_t c = 0; c < x.size(); ++c) acc += w[c] * x[c];
        hidden[r] = std::tanh(acc);
    }
    const std::size_t out_vocab = static_cast<std::size_t>(params.vocab_size) + 1;
    std::vector<double> logits(out_vocab, 0.0);
    for (std::size_t t = 0; t < out_vocab; ++t) {
        const double* u = params.dec_u.row(t);
        double acc = 0.0;
        for (std::size_t r = 0; r < h; ++r) acc += u[r] * hidden[r];
        logits[t] = acc;
    }
    // readout query: ctx - emb(prev), reusing the prev block of x
    for (std::size_t t = 0; t + 1 < out_vocab; ++t) {
        const double* e = params.token_embeddings.row(t);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += e[i] * (ctx[i] - x[n + i]);
        logits[t] += acc;
    }
    return logits;
}

} // namespace

std::vector<double> answer_step_logits(const ParamStore& params, const Embedding& ctx, int prev_id) {
    std::vector<double> hidden;
    return decoder_logits(params, ctx, prev_id, hidden);
}

std::vector<int> assemble_context_ids(const Vocab& vocab, Task task, const std::vector<int>& question,
                                      const std::vector<std::vector<int>>& rationale_sentences) {
    std::vector<int> out;
    const std::vector<int> sep = template_ids(vocab, "[SEP]");
    switch (task) {
        case Task::BQA:
            append(out, template_ids(vocab, "A claim to be verified is that"));
            append(out, question);
            append(out, template_ids(vocab, "We have following facts:"));
            break;
        case Task::MCQ:
            append(out, template_ids(vocab, "Question:"));
            append(out, question);
            append(out, sep);
            break;
        case Task::EQA:
            append(out, question);
            append(out, sep);
            break;
    }
    for (const auto& sent : rationale_sentences) append(out, sent);
    return out;
}

double answer_seq_logprob(const ParamStore& params, const Embedding& ctx,
                          const std::vector<int>& target_ids, AnswerCache* cache) {
    if (target_ids.empty()) throw std::invalid_argument("answer_seq_logprob: empty target");
    std::vector<int> targets = target_ids;
    targets.push_back(params.eos_id());

    double total = 0.0;
    int prev = -1;
    for (int gold : targets) {
        if (gold < 0 || gold > params.vocab_size) {
            throw std::out_of_range("answer_seq_logprob: target token id out of range");
        }
        std::vector<double> hidden;
        std::vector<double> logits = decoder_logits(params, ctx, prev, hidden);
        const double lse = log_sum_exp(logits);
        total += logits[static_cast<std::size_t>(gold)] - lse;
        if (cache) {
            DecStepCache step;
            step.prev_id = prev;
            step.hidden = std::move(hidden);
            step.probs.resize(logits.size());
            for (std::size_t t = 0; t < logits.size(); ++t) {
                step.probs[t] = std::exp(logits[t] - lse);
            }
            step.gold_id = gold;
            cache->steps.push_back(std::move(step));
        }
        prev = (gold == params.eos_id()) ? -1 : gold; // EOS is final; prev never becomes EOS
    }
    return total;
}

double answer_logprob(const ParamStore& params, const Vocab& vocab, Task task,
                      const std::vector<int>& question,
                      const std::vector<std::vector<int>>& rationale_sentences,
                      const std::vector<int>& answer_tokens) {
    if (rationale_sentences.empty()) {
        throw std::invalid_argument("answer_logprob: rationale must be non-empty");
    }
    if (answer_tokens.empty()) throw std::invalid_argument("answer_logprob: empty answer");
    const std::vector<int> ctx_ids = assemble_context_ids(vocab, task, question, rationale_sentences);
    const Embedding ctx = embed_tokens(params, ctx_ids);
    return answer_seq_logprob(params, ctx, answer_tokens);
}

DecodeResult greedy_decode(const ParamStore& params, const Vocab& vocab, Task task,
                           const std::vector<int>& question,
                           const std::vector<std::vector<int>>& rationale_sentences, int max_len) {
    if (max_len < 1) throw std::invalid_argument("greedy_decode: max_len must be >= 1");
    if (rationale_sentences.empty()) {
        throw std::invalid_argument("greedy_decode: rationale must be non-empty");
    }
    const std::vector<int> ctx_ids = assemble_context_ids(vocab, task, question, rationale_sentences);
    const Embedding ctx = embed_tokens(params, ctx_ids);

    DecodeResult result;
    int prev = -1;
    for (int step = 0; step < max_len; ++step) {
        std::vector<double> hidden;
        std::vector<double> logits = decoder_logits(params, ctx, prev, hidden);
        std::size_t best = 0;
        for (std::size_t t = 1; t < logits.size(); ++t) {
            if (logits[t] > logits[best]) best = t; // ties keep the lowest id
        }
        result.logprob += logits[best] - log_sum_exp(logits);
        if (static_cast<int>(best) == params.eos_id()) return result;
        result.tokens.push_back(static_cast<int>(best));
        prev = static_cast<int>(best);
    }
    result.truncated = true;
    return result;
}

std::pair<std::vector<double>, int> choice_normalize(const std::vector<double>& choice_logprobs) {
    if (choice_logprobs.size() < 2) {
        throw std::invalid_argument("choice_normalize: need at least two choices");
    }
    for (double lp : choice_logprobs) {
        if (!std::isfinite(lp)) throw std::invalid_argument("choice_normalize: non-finite log-prob");
    }
    const double lse = log_sum_exp(choice_logprobs);
    std::vector<double> probs(choice_logprobs.size());
    int best = 0;
    for (std::size_t i = 0; i < choice_logprobs.size(); ++i) {
        probs[i] = std::exp(choice_logprobs[i] - lse);
        if (choice_logprobs[i] > choice_logprobs[static_cast<std::size_t>(best)]) {
            best = static_cast<int>(i);
        }
    }
    return {probs, best};
}

} // namespace mhqa
