#pragma once

#include <vector>

#include "mhqa/params.hpp"
#include "mhqa/subsets.hpp"

namespace mhqa {

using Embedding = std::vector<double>;

// Mean of the token embedding rows; an empty sequence maps to the zero
// vector. Ids must be < vocab_size (the vocabulary is closed).
Embedding embed_tokens(const ParamStore& params, const std::vector<int>& token_ids);

// Question-conditioned per-sentence representations:
// marker[j] = embed_tokens(question) + embed_tokens(sentence j).
std::vector<Embedding> sentence_marker_embeddings(const ParamStore& params,
                                                  const std::vector<int>& question,
                                                  const std::vector<std::vector<int>>& sentences);

// v . mean of the subset's marker embeddings. Empty subsets are an error.
double subset_score(const ParamStore& params, const std::vector<Embedding>& markers,
                    const Subset& subset);

// Document embedding with long-document slicing: consecutive slice_len
// sentence windows (stride slice_len, last may be short), each embedded as
// embed_tokens(question ++ slice tokens); the document embedding is the mean
// over slice embeddings.
struct DocEmbCache {
    Embedding emb;
    std::vector<std::vector<int>> slice_tokens; // per slice: question ++ slice, for backprop
};
DocEmbCache doc_embedding_cached(const ParamStore& params, const std::vector<int>& question,
                                 const std::vector<std::vector<int>>& sentences);
Embedding doc_embedding(const ParamStore& params, const std::vector<int>& question,
                        const std::vector<std::vector<int>>& sentences);

// One-hidden-layer scorer without biases: w2 . relu(w1 . x).
struct MlpCache {
    std::vector<double> input;
    std::vector<double> hidden; // pre-activation
};
double mlp_score(const ParamStore& params, const std::vector<double>& input, MlpCache* cache = nullptr);

// Scorer input for a document set over per-document embeddings:
//   {i}     -> [e_i, e_i, 0]
//   {i, j}  -> [e_i, e_j, |e_i - e_j|] with i < j (canonical order)
//   larger  -> [sum of member embeddings, 0, 0]
std::vector<double> doc_set_input(const std::vector<Embedding>& doc_embs, const Subset& set);

// Globally normalized distribution over all valid document sets, scored by
// the pair MLP on doc_set_input.
SetDistribution doc_set_distribution(const ParamStore& params, const std::vector<int>& question,
                                     const std::vector<std::vector<std::vector<int>>>& documents,
                                     const SubsetSpace& space);

// Per-document scores MLP([e, e, 0]) used by the independent selection model.
std::vector<double> doc_singleton_scores(const ParamStore& params,
                                         const std::vector<Embedding>& doc_embs);

// Globally normalized distribution over sentence subsets of one document.
SetDistribution sentence_set_distribution(const ParamStore& params, const std::vector<int>& question,
                                          const std::vector<std::vector<int>>& sentences,
                                          const SubsetSpace& space);

} // namespace mhqa
