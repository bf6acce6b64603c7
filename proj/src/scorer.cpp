#include "mhqa/scorer.hpp"

#include <cmath>
#include <stdexcept>

namespace mhqa {

Embedding embed_tokens(const ParamStore& params, const std::vector<int>& token_ids) {
    const auto n = static_cast<std::size_t>(params.cfg.embedding_dim);
    Embedding out(n, 0.0);
    if (token_ids.empty()) return out;
    for (int id : token_ids) {
        if (id < 0 || id >= params.vocab_size) {
            throw std::out_of_range("embed_tokens: token id " + std::to_string(id) +
                                    " outside closed vocabulary of size " +
                                    std::to_string(params.vocab_size));
        }
        const double* row = params.token_embeddings.row(static_cast<std::size_t>(id));
        for (std::size_t i = 0; i < n; ++i) out[i] += row[i];
    }
    const double inv = 1.0 / static_cast<double>(token_ids.size());
    for (double& x : out) x *= inv;
    return out;
}

std::vector<Embedding> sentence_marker_embeddings(const ParamStore& params,
                                                  const std::vector<int>& question,
                                                  const std::vector<std::vector<int>>& sentences) {
    if (sentences.empty()) throw std::invalid_argument("sentence_marker_embeddings: document is empty");
    const Embedding q = embed_tokens(params, question);
    std::vector<Embedding> out;
    out.reserve(sentences.size());
    for (const auto& sent : sentences) {
        Embedding e = embed_tokens(params, sent);
        for (std::size_t i = 0; i < e.size(); ++i) e[i] += q[i];
        out.push_back(std::move(e));
    }
    return out;
}

double subset_score(const ParamStore& params, const std::vector<Embedding>& markers,
                    const Subset& subset) {
    if (subset.empty()) throw std::invalid_argument("subset_score: empty subset");
    const auto n = static_cast<std::size_t>(params.cfg.embedding_dim);
    Embedding mean(n, 0.0);
    for (int j : subset) {
        if (j < 0 || static_cast<std::size_t>(j) >= markers.size()) {
            throw std::out_of_range("subset_score: sentence index out of range");
        }
        const Embedding& m = markers[static_cast<std::size_t>(j)];
        for (std::size_t i = 0; i < n; ++i) mean[i] += m[i];
    }
    const double inv = 1.0 / static_cast<double>(subset.size());
    double score = 0.0;
    const double* v = params.sent_score_v.row(0);
    for (std::size_t i = 0; i < n; ++i) score += v[i] * mean[i] * inv;
    return score;
}

DocEmbCache doc_embedding_cached(const ParamStore& params, const std::vector<int>& question,
                                 const std::vector<std::vector<int>>& sentences) {
    if (sentences.empty()) throw std::invalid_argument("doc_embedding: document is empty");
    const auto n = static_cast<std::size_t>(params.cfg.embedding_dim);
    const int m = params.cfg.slice_len;
    DocEmbCache cache;
    cache.emb.assign(n, 0.0);
    for (std::size_t start = 0; start < sentences.size(); start += static_cast<std::size_t>(m)) {
        std::vector<int> slice = question;
        const std::size_t end = std::min(sentences.size(), start + static_cast<std::size_t>(m));
        for (std::size_t s = start; s < end; ++s) {
            slice.insert(slice.end(), sentences[s].begin(), sentences[s].end());
        }
        const Embedding e = embed_tokens(params, slice);
        for (std::size_t i = 0; i < n; ++i) cache.emb[i] += e[i];
        cache.slice_tokens.push_back(std::move(slice));
    }
    const double inv = 1.0 / static_cast<double>(cache.slice_tokens.size());
    for (double& x : cache.emb) x *= inv;
    return cache;
}

Embedding doc_embedding(const ParamStore& params, const std::vector<int>& question,
                        const std::vector<std::vector<int>>& sentences) {
    return doc_embedding_cached(params, question, sentences).emb;
}

double mlp_score(const ParamStore& params, const std::vector<double>& input, MlpCache* cache) {
    const auto h = static_cast<std::size_t>(params.cfg.mlp_hidden);
    if (input.size() != params.mlp_w1.cols) {
        throw std::invalid_argument("mlp_score: input size mismatch");
    }
    std::vector<double> hidden(h, 0.0);
    for (std::size_t r = 0; r < h; ++r) {
        const double* w = params.mlp_w1.row(r);
        double acc = 0.0;
        for (std::size_t c = 0; c < input.size(); ++c) acc += w[c] * input[c];
        hidden[r] = acc;
    }
    double score = 0.0;
    const double* w2 = params.mlp_w2.row(0);
    for (std::size_t r = 0; r < h; ++r) score += w2[r] * std::max(0.0, hidden[r]);
    if (cache) {
        cache->input = input;
        cache->hidden = std::move(hidden);
    }
    return score;
}

std::vector<double> doc_set_input(const std::vector<Embedding>& doc_embs, const Subset& set) {
    if (set.empty()) throw std::invalid_argument("doc_set_input: empty set");
    const std::size_t n = doc_embs.at(0).size();
    std::vector<double> x(3 * n, 0.0);
    if (set.size() == 1) {
        const Embedding& e = doc_embs.at(static_cast<std::size_t>(set[0]));
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = e[i];
            x[n + i] = e[i];
        }
    } else if (set.size() == 2) {
        const Embedding& e1 = doc_embs.at(static_cast<std::size_t>(set[0]));
        const Embedding& e2 = doc_embs.at(static_cast<std::size_t>(set[1]));
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = e1[i];
            x[n + i] = e2[i];
            x[2 * n + i] = std::abs(e1[i] - e2[i]);
        }
    } else {
        for (int d : set) {
            const Embedding& e = doc_embs.at(static_cast<std::size_t>(d));
            for (std::size_t i = 0; i < n; ++i) x[i] += e[i];
        }
    }
    return x;
}

SetDistribution doc_set_distribution(const ParamStore& params, const std::vector<int>& question,
                                     const std::vector<std::vector<std::vector<int>>>& documents,
                                     const SubsetSpace& space) {
    space.validate();
    if (space.universe_size != static_cast<int>(documents.size())) {
        throw std::invalid_argument("doc_set_distribution: space does not match document count");
    }
    std::vector<Embedding> embs;
    embs.reserve(documents.size());
    for (const auto& doc : documents) embs.push_back(doc_embedding(params, question, doc));

    std::vector<Subset> sets = enumerate_subsets(space);
    std::vector<double> scores;
    scores.reserve(sets.size());
    for (const auto& s : sets) scores.push_back(mlp_score(params, doc_set_input(embs, s)));
    return SetDistribution::from_scores(space, std::move(sets), scores);
}

std::vector<double> doc_singleton_scores(const ParamStore& params,
                                         const std::vector<Embedding>& doc_embs) {
    std::vector<double> scores;
    scores.reserve(doc_embs.size());
    for (std::size_t d = 0; d < doc_embs.size(); ++d) {
        scores.push_back(mlp_score(params, doc_set_input(doc_embs, Subset{static_cast<int>(d)})));
    }
    return scores;
}

SetDistribution sentence_set_distribution(const ParamStore& params, const std::vector<int>& question,
                                          const std::vector<std::vector<int>>& sentences,
                                          const SubsetSpace& space) {
    space.validate();
    if (space.universe_size != static_cast<int>(sentences.size())) {
        throw std::invalid_argument("sentence_set_distribution: space does not match sentence count");
    }
    const auto markers = sentence_marker_embeddings(params, question, sentences);
    std::vector<Subset> sets = enumerate_subsets(space);
    std::vector<double> scores;
    scores.reserve(sets.size());
    for (const auto& s : sets) scores.push_back(subset_score(params, markers, s));
    return SetDistribution::from_scores(space, std::move(sets), scores);
}

} // namespace mhqa
