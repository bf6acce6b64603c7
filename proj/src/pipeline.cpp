#include "mhqa/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mhqa/prompt.hpp"

namespace mhqa {

void ModelConfig::validate() const {
    enc.validate();
    if (doc_min_size < 1 || doc_min_size > doc_max_size) {
        throw std::invalid_argument("ModelConfig: need 1 <= doc_min_size <= doc_max_size");
    }
    if (max_rationale < 1) throw std::invalid_argument("ModelConfig: max_rationale must be >= 1");
    if (max_answer_len < 1) throw std::invalid_argument("ModelConfig: max_answer_len must be >= 1");
}

SubsetSpace doc_space_for(const ModelConfig& cfg, int n_docs) {
    SubsetSpace space;
    space.universe_size = n_docs;
    space.min_size = cfg.doc_min_size;
    space.max_size = std::min(cfg.doc_max_size, n_docs);
    space.contiguous_only = false;
    space.validate();
    return space;
}

SubsetSpace sentence_space_for(const ModelConfig& cfg, int n_sentences) {
    SubsetSpace space;
    space.universe_size = n_sentences;
    space.min_size = 1;
    space.max_size = std::min(cfg.max_rationale, n_sentences);
    space.contiguous_only = cfg.contiguous;
    space.validate();
    return space;
}

namespace {

const char* kTemplateStrings[] = {
    "A claim to be verified is that",
    "We have following facts:",
    "Question:",
    "[SEP]",
};

void collect_tokens(std::vector<std::string>& out, const std::vector<std::string>& toks) {
    out.insert(out.end(), toks.begin(), toks.end());
}

} // namespace

Vocab build_vocab(const std::vector<const std::vector<Example>*>& datasets) {
    std::vector<std::string> all;
    for (const char* t : kTemplateStrings) collect_tokens(all, tokenize(t));
    collect_tokens(all, tokenize(bqa_output(true)));
    collect_tokens(all, tokenize(bqa_output(false)));
    collect_tokens(all, tokenize(mcq_choice_output("", true)));
    collect_tokens(all, tokenize(mcq_choice_output("", false)));
    for (const auto* ds : datasets) {
        for (const auto& ex : *ds) {
            collect_tokens(all, ex.question);
            for (const auto& doc : ex.documents) {
                for (const auto& sent : doc.sentences) collect_tokens(all, sent);
            }
            if (ex.task == Task::BQA) {
                // labels already covered by the rendered outputs
            } else if (ex.task == Task::MCQ) {
                for (const auto& c : std::get<McqAnswer>(ex.answer).choices) collect_tokens(all, c.text);
            } else {
                collect_tokens(all, std::get<EqaAnswer>(ex.answer).text);
            }
        }
    }
    return Vocab::from_tokens(all);
}

EncodedExample encode_example(const Example& ex, const Vocab& vocab) {
    EncodedExample e;
    e.id = ex.id;
    e.task = ex.task;
    e.question = vocab.ids(ex.question);
    e.docs.reserve(ex.documents.size());
    for (const auto& doc : ex.documents) {
        std::vector<std::vector<int>> sents;
        sents.reserve(doc.sentences.size());
        for (const auto& s : doc.sentences) sents.push_back(vocab.ids(s));
        e.docs.push_back(std::move(sents));
    }
    if (ex.task == Task::BQA) {
        e.bqa_supported = std::get<BqaAnswer>(ex.answer).supported;
    } else if (ex.task == Task::MCQ) {
        for (const auto& c : std::get<McqAnswer>(ex.answer).choices) {
            e.mcq_choices.emplace_back(vocab.ids(c.text), c.correct);
        }
    } else {
        e.eqa_answer = vocab.ids(std::get<EqaAnswer>(ex.answer).text);
    }
    return e;
}

std::vector<int> bqa_target_ids(const Vocab& vocab, bool supported) {
    return vocab.ids(tokenize(bqa_output(supported)));
}

std::vector<int> mcq_target_ids(const Vocab& vocab, const std::vector<int>& choice_tokens, bool correct) {
    std::vector<int> out = vocab.ids(tokenize("Answer:"));
    out.insert(out.end(), choice_tokens.begin(), choice_tokens.end());
    const std::vector<int> tail = vocab.ids(tokenize(correct ? "(correct)" : "(wrong)"));
    out.insert(out.end(), tail.begin(), tail.end());
    return out;
}

std::vector<std::vector<int>> gold_answer_targets(const Vocab& vocab, const EncodedExample& ex) {
    std::vector<std::vector<int>> targets;
    switch (ex.task) {
        case Task::BQA:
            targets.push_back(bqa_target_ids(vocab, ex.bqa_supported));
            break;
        case Task::MCQ:
            for (const auto& [choice, correct] : ex.mcq_choices) {
                targets.push_back(mcq_target_ids(vocab, choice, correct));
            }
            break;
        case Task::EQA:
            targets.push_back(ex.eqa_answer);
            break;
    }
    return targets;
}

namespace {

std::size_t index_of_subset(const std::vector<Subset>& canonical, const Subset& s,
                            const char* what) {
    auto it = std::lower_bound(canonical.begin(), canonical.end(), s, subset_canonical_less);
    if (it == canonical.end() || *it != s) {
        throw std::invalid_argument(std::string(what) + ": structure not in the valid space");
    }
    return static_cast<std::size_t>(it - canonical.begin());
}

void build_doc_stage(const Model& model, const EncodedExample& ex, MarginalForward& f) {
    const auto& params = model.params;
    f.doc_space = doc_space_for(model.cfg, static_cast<int>(ex.docs.size()));
    f.doc_embs.reserve(ex.docs.size());
    for (const auto& doc : ex.docs) {
        f.doc_embs.push_back(doc_embedding_cached(params, ex.question, doc));
    }
    std::vector<Embedding> embs;
    embs.reserve(f.doc_embs.size());
    for (const auto& c : f.doc_embs) embs.push_back(c.emb);

    f.doc_sets = enumerate_subsets(f.doc_space);
    f.doc_set_scores.reserve(f.doc_sets.size());
    if (!model.cfg.independent_docs) {
        f.doc_set_mlp.resize(f.doc_sets.size());
        for (std::size_t s = 0; s < f.doc_sets.size(); ++s) {
            f.doc_set_scores.push_back(
                mlp_score(params, doc_set_input(embs, f.doc_sets[s]), &f.doc_set_mlp[s]));
        }
    } else {
        f.singleton_mlp.resize(ex.docs.size());
        for (std::size_t d = 0; d < ex.docs.size(); ++d) {
            f.singleton_scores.push_back(
                mlp_score(params, doc_set_input(embs, Subset{static_cast<int>(d)}), &f.singleton_mlp[d]));
        }
        const double lse = log_sum_exp(f.singleton_scores);
        for (const auto& set : f.doc_sets) {
            double score = 0.0;
            for (int d : set) score += f.singleton_scores[static_cast<std::size_t>(d)] - lse;
            f.doc_set_scores.push_back(score);
        }
    }
    f.doc_set_logps = log_normalize(f.doc_set_scores);
}

const SentStage& ensure_sent_stage(const Model& model, const EncodedExample& ex, MarginalForward& f,
                                   int doc) {
    auto& slot = f.sent[static_cast<std::size_t>(doc)];
    if (!slot) {
        const auto& sentences = ex.docs[static_cast<std::size_t>(doc)];
        SentStage stage;
        stage.markers = sentence_marker_embeddings(model.params, ex.question, sentences);
        const SubsetSpace space = sentence_space_for(model.cfg, static_cast<int>(sentences.size()));
        std::vector<Subset> subsets = enumerate_subsets(space);
        std::vector<double> scores;
        scores.reserve(subsets.size());
        for (const auto& z : subsets) scores.push_back(subset_score(model.params, stage.markers, z));
        stage.dist = SetDistribution::from_scores(space, std::move(subsets), scores);
        slot = std::move(stage);
    }
    return *slot;
}

// Rationale sentences in (document, sentence) order for the answer context.
std::vector<std::vector<int>> rationale_sentences(const EncodedExample& ex, const Subset& doc_set,
                                                  const std::vector<Subset>& tuple) {
    std::vector<std::vector<int>> out;
    for (std::size_t m = 0; m < doc_set.size(); ++m) {
        const auto& doc = ex.docs[static_cast<std::size_t>(doc_set[m])];
        for (int j : tuple[m]) out.push_back(doc[static_cast<std::size_t>(j)]);
    }
    return out;
}

void eval_candidate_answer(const Model& model, const EncodedExample& ex,
                           const std::vector<std::vector<int>>& targets, const Subset& doc_set,
                           const std::vector<Subset>& tuple, CandidateEval& cand) {
    const auto sents = rationale_sentences(ex, doc_set, tuple);
    const std::vector<int> ctx_ids = assemble_context_ids(model.vocab, ex.task, ex.question, sents);
    const Embedding ctx = embed_tokens(model.params, ctx_ids);
    cand.ans_logp = 0.0;
    for (const auto& target : targets) {
        AnswerCache cache;
        cache.ctx_tokens = ctx_ids;
        cache.ctx = ctx;
        cand.ans_logp += answer_seq_logprob(model.params, ctx, target, &cache);
        cand.ans_caches.push_back(std::move(cache));
    }
}

} // namespace

MarginalForward marginal_forward(const Model& model, const EncodedExample& ex,
                                 const MarginalOptions& opt) {
    model.cfg.validate();
    if (opt.k_doc < 1 || opt.k_sent < 1) {
        throw std::invalid_argument("marginal_forward: k_doc and k_sent must be >= 1");
    }
    MarginalForward f;
    build_doc_stage(model, ex, f);
    f.sent.resize(ex.docs.size());

    if (opt.exact) {
        // cap the total (d, z) count before enumerating anything
        std::size_t total = 0;
        std::vector<std::size_t> sent_counts(ex.docs.size());
        for (std::size_t d = 0; d < ex.docs.size(); ++d) {
            sent_counts[d] =
                sentence_space_for(model.cfg, static_cast<int>(ex.docs[d].size())).count();
        }
        for (const auto& set : f.doc_sets) {
            std::size_t prod = 1;
            for (int d : set) prod *= sent_counts[static_cast<std::size_t>(d)];
            total += prod;
            if (total > opt.exact_cap) {
                throw std::invalid_argument("exact marginal: configuration count exceeds cap of " +
                                            std::to_string(opt.exact_cap));
            }
        }
    }

    std::vector<std::size_t> doc_candidates;
    if (opt.exact) {
        doc_candidates.resize(f.doc_sets.size());
        for (std::size_t i = 0; i < doc_candidates.size(); ++i) doc_candidates[i] = i;
    } else {
        SetDistribution doc_dist;
        doc_dist.space = f.doc_space;
        doc_dist.subsets = f.doc_sets;
        doc_dist.log_probs = f.doc_set_logps;
        const SubsetCandidates top = top_k(doc_dist, static_cast<std::size_t>(opt.k_doc));
        for (const auto& [set, lp] : top.items) {
            doc_candidates.push_back(index_of_subset(f.doc_sets, set, "marginal_forward"));
        }
    }

    const auto targets = gold_answer_targets(model.vocab, ex);
    std::vector<double> totals;
    for (std::size_t ds_idx : doc_candidates) {
        const Subset& doc_set = f.doc_sets[ds_idx];
        std::vector<SetDistribution> member_dists;
        member_dists.reserve(doc_set.size());
        for (int d : doc_set) member_dists.push_back(ensure_sent_stage(model, ex, f, d).dist);

        TupleCandidates tuples;
        if (opt.exact) {
            std::size_t prod = 1;
            for (const auto& md : member_dists) prod *= md.subsets.size();
            tuples = brute_force_product(member_dists, prod, opt.exact_cap);
        } else {
            tuples = top_k_product(member_dists, static_cast<std::size_t>(opt.k_sent));
        }

        for (const auto& [tuple, tuple_lp] : tuples.items) {
            CandidateEval cand;
            cand.doc_set_index = ds_idx;
            cand.subset_index.reserve(tuple.size());
            for (std::size_t m = 0; m < tuple.size(); ++m) {
                cand.subset_index.push_back(
                    index_of_subset(member_dists[m].subsets, tuple[m], "marginal_forward"));
            }
            cand.lat_logp = f.doc_set_logps[ds_idx] + tuple_lp;
            eval_candidate_answer(model, ex, targets, doc_set, tuple, cand);
            cand.total = cand.lat_logp + cand.ans_logp;
            totals.push_back(cand.total);
            f.cands.push_back(std::move(cand));
        }
    }
    if (f.cands.empty()) throw std::runtime_error("marginal_forward: no valid candidates");
    f.value = log_sum_exp(totals);
    return f;
}

namespace {

void mlp_backward(const ParamStore& params, const MlpCache& cache, double dy, ParamStore& grads,
                  std::vector<double>& dx) {
    const auto h = static_cast<std::size_t>(params.cfg.mlp_hidden);
    dx.assign(cache.input.size(), 0.0);
    double* gw2 = grads.g_mlp_w2.row(0);
    const double* w2 = params.mlp_w2.row(0);
    for (std::size_t r = 0; r < h; ++r) {
        const double a = cache.hidden[r];
        gw2[r] += dy * std::max(0.0, a);
        if (a <= 0.0) continue;
        const double da = dy * w2[r];
        double* gw1 = grads.g_mlp_w1.row(r);
        const double* w1 = params.mlp_w1.row(r);
        for (std::size_t c = 0; c < cache.input.size(); ++c) {
            gw1[c] += da * cache.input[c];
            dx[c] += w1[c] * da;
        }
    }
}

void scatter_embedding_grad(ParamStore& grads, const std::vector<int>& token_ids,
                            const std::vector<double>& dvec, double coeff) {
    if (token_ids.empty()) return;
    const double inv = coeff / static_cast<double>(token_ids.size());
    for (int id : token_ids) {
        double* row = grads.g_token_embeddings.row(static_cast<std::size_t>(id));
        for (std::size_t i = 0; i < dvec.size(); ++i) row[i] += inv * dvec[i];
    }
}

void answer_backward(const ParamStore& params, const AnswerCache& cache, double g,
                     ParamStore& grads) {
    const auto n = static_cast<std::size_t>(params.cfg.embedding_dim);
    const auto h = static_cast<std::size_t>(params.cfg.mlp_hidden);
    const std::size_t out_vocab = static_cast<std::size_t>(params.vocab_size) + 1;

    std::vector<double> dctx(n, 0.0);
    std::vector<double> x(2 * n, 0.0);
    std::vector<double> dh(h), da(h);

    for (const auto& step : cache.steps) {
        // x = [ctx; emb(prev)] as in the forward pass
        for (std::size_t i = 0; i < n; ++i) x[i] = cache.ctx[i];
        if (step.prev_id >= 0) {
            const double* row = params.token_embeddings.row(static_cast<std::size_t>(step.prev_id));
            for (std::size_t i = 0; i < n; ++i) x[n + i] = row[i];
        } else {
            for (std::size_t i = 0; i < n; ++i) x[n + i] = 0.0;
        }

        std::fill(dh.begin(), dh.end(), 0.0);
        for (std::size_t t = 0; t < out_vocab; ++t) {
            const double dlogit =
                g * ((static_cast<int>(t) == step.gold_id ? 1.0 : 0.0) - step.probs[t]);
            double* gu = grads.g_dec_u.row(t);
            const double* u = params.dec_u.row(t);
            for (std::size_t r = 0; r < h; ++r) {
                gu[r] += dlogit * step.hidden[r];
                dh[r] += dlogit * u[r];
            }
            if (t + 1 < out_vocab) {
                // tied-embedding readout: logits[t] += emb(t) . (ctx - emb(prev))
                double* ge = grads.g_token_embeddings.row(t);
                const double* e = params.token_embeddings.row(t);
                for (std::size_t i = 0; i < n; ++i) {
                    ge[i] += dlogit * (cache.ctx[i] - x[n + i]);
                    dctx[i] += dlogit * e[i];
                }
                if (step.prev_id >= 0) {
                    double* gp = grads.g_token_embeddings.row(static_cast<std::size_t>(step.prev_id));
                    for (std::size_t i = 0; i < n; ++i) gp[i] -= dlogit * e[i];
                }
            }
        }
        for (std::size_t r = 0; r < h; ++r) {
            da[r] = (1.0 - step.hidden[r] * step.hidden[r]) * dh[r];
        }
        for (std::size_t r = 0; r < h; ++r) {
            if (da[r] == 0.0) continue;
            double* gw = grads.g_dec_w.row(r);
            const double* w = params.dec_w.row(r);
            for (std::size_t c = 0; c < 2 * n; ++c) gw[c] += da[r] * x[c];
            for (std::size_t i = 0; i < n; ++i) dctx[i] += w[i] * da[r];
            if (step.prev_id >= 0) {
                double* ge = grads.g_token_embeddings.row(static_cast<std::size_t>(step.prev_id));
                for (std::size_t i = 0; i < n; ++i) ge[i] += w[n + i] * da[r];
            }
        }
    }
    scatter_embedding_grad(grads, cache.ctx_tokens, dctx, 1.0);
}

} // namespace

void marginal_backward(const MarginalForward& f, const Model& model, const EncodedExample& ex,
                       double scale, ParamStore& params) {
    const auto n = static_cast<std::size_t>(model.cfg.enc.embedding_dim);
    const std::size_t n_docs = ex.docs.size();

    std::vector<double> g_cand(f.cands.size());
    for (std::size_t c = 0; c < f.cands.size(); ++c) {
        g_cand[c] = scale * std::exp(f.cands[c].total - f.value);
    }

    // answer stage
    for (std::size_t c = 0; c < f.cands.size(); ++c) {
        for (const auto& cache : f.cands[c].ans_caches) {
            answer_backward(model.params, cache, g_cand[c], params);
        }
    }

    // sentence stage
    std::vector<std::vector<double>> dlp(n_docs);
    std::vector<double> presence(n_docs, 0.0);
    for (std::size_t d = 0; d < n_docs; ++d) {
        if (f.sent[d]) dlp[d].assign(f.sent[d]->dist.subsets.size(), 0.0);
    }
    for (std::size_t c = 0; c < f.cands.size(); ++c) {
        const auto& cand = f.cands[c];
        const Subset& doc_set = f.doc_sets[cand.doc_set_index];
        for (std::size_t m = 0; m < doc_set.size(); ++m) {
            const auto d = static_cast<std::size_t>(doc_set[m]);
            dlp[d][cand.subset_index[m]] += g_cand[c];
            presence[d] += g_cand[c];
        }
    }
    const double* v = model.params.sent_score_v.row(0);
    for (std::size_t d = 0; d < n_docs; ++d) {
        if (!f.sent[d]) continue;
        const SentStage& stage = *f.sent[d];
        const std::size_t n_subsets = stage.dist.subsets.size();
        const std::size_t n_sents = ex.docs[d].size();
        std::vector<double> coef_sent(n_sents, 0.0);
        for (std::size_t z = 0; z < n_subsets; ++z) {
            const double gamma = dlp[d][z] - presence[d] * std::exp(stage.dist.log_probs[z]);
            if (gamma == 0.0) continue;
            const double share = gamma / static_cast<double>(stage.dist.subsets[z].size());
            for (int j : stage.dist.subsets[z]) coef_sent[static_cast<std::size_t>(j)] += share;
        }
        double* gv = params.g_sent_score_v.row(0);
        double coef_total = 0.0;
        std::vector<double> dmarker(n);
        for (std::size_t j = 0; j < n_sents; ++j) {
            const double coef = coef_sent[j];
            if (coef == 0.0) continue;
            coef_total += coef;
            const Embedding& marker = stage.markers[j];
            for (std::size_t i = 0; i < n; ++i) gv[i] += coef * marker[i];
            for (std::size_t i = 0; i < n; ++i) dmarker[i] = coef * v[i];
            scatter_embedding_grad(params, ex.docs[d][j], dmarker, 1.0);
        }
        if (coef_total != 0.0) {
            std::vector<double> dq(n);
            for (std::size_t i = 0; i < n; ++i) dq[i] = coef_total * v[i];
            scatter_embedding_grad(params, ex.question, dq, 1.0);
        }
    }

    // document stage
    std::vector<double> dset(f.doc_sets.size(), 0.0);
    double g_total = 0.0;
    for (std::size_t c = 0; c < f.cands.size(); ++c) {
        dset[f.cands[c].doc_set_index] += g_cand[c];
        g_total += g_cand[c];
    }
    std::vector<double> dscore(f.doc_sets.size());
    for (std::size_t s = 0; s < f.doc_sets.size(); ++s) {
        dscore[s] = dset[s] - g_total * std::exp(f.doc_set_logps[s]);
    }

    std::vector<std::vector<double>> de(n_docs, std::vector<double>(n, 0.0));
    std::vector<double> dx;
    if (!model.cfg.independent_docs) {
        for (std::size_t s = 0; s < f.doc_sets.size(); ++s) {
            mlp_backward(model.params, f.doc_set_mlp[s], dscore[s], params, dx);
            const Subset& set = f.doc_sets[s];
            if (set.size() == 1) {
                auto& dei = de[static_cast<std::size_t>(set[0])];
                for (std::size_t i = 0; i < n; ++i) dei[i] += dx[i] + dx[n + i];
            } else if (set.size() == 2) {
                const auto a = static_cast<std::size_t>(set[0]);
                const auto b = static_cast<std::size_t>(set[1]);
                const Embedding& ea = f.doc_embs[a].emb;
                const Embedding& eb = f.doc_embs[b].emb;
                for (std::size_t i = 0; i < n; ++i) {
                    const double diff = ea[i] - eb[i];
                    const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
                    de[a][i] += dx[i] + sign * dx[2 * n + i];
                    de[b][i] += dx[n + i] - sign * dx[2 * n + i];
                }
            } else {
                for (int d : set) {
                    auto& dei = de[static_cast<std::size_t>(d)];
                    for (std::size_t i = 0; i < n; ++i) dei[i] += dx[i];
                }
            }
        }
    } else {
        std::vector<double> dsingle(n_docs, 0.0);
        double weighted = 0.0;
        for (std::size_t s = 0; s < f.doc_sets.size(); ++s) {
            for (int d : f.doc_sets[s]) dsingle[static_cast<std::size_t>(d)] += dscore[s];
            weighted += dscore[s] * static_cast<double>(f.doc_sets[s].size());
        }
        const double lse = log_sum_exp(f.singleton_scores);
        for (std::size_t d = 0; d < n_docs; ++d) {
            dsingle[d] -= weighted * std::exp(f.singleton_scores[d] - lse);
        }
        for (std::size_t d = 0; d < n_docs; ++d) {
            mlp_backward(model.params, f.singleton_mlp[d], dsingle[d], params, dx);
            for (std::size_t i = 0; i < n; ++i) de[d][i] += dx[i] + dx[n + i];
        }
    }

    for (std::size_t d = 0; d < n_docs; ++d) {
        const auto& cache = f.doc_embs[d];
        const double inv_slices = 1.0 / static_cast<double>(cache.slice_tokens.size());
        for (const auto& slice : cache.slice_tokens) {
            scatter_embedding_grad(params, slice, de[d], inv_slices);
        }
    }
}

double joint_logprob(const Model& model, const EncodedExample& ex, const Subset& doc_set,
                     const std::vector<Subset>& rationale) {
    model.cfg.validate();
    const SubsetSpace doc_space = doc_space_for(model.cfg, static_cast<int>(ex.docs.size()));
    if (!subset_valid(doc_space, doc_set)) {
        throw std::invalid_argument("joint_logprob: document set not valid for this example");
    }
    if (rationale.size() != doc_set.size()) {
        throw std::invalid_argument("joint_logprob: rationale must assign one subset per document");
    }

    MarginalForward f;
    build_doc_stage(model, ex, f);
    double total = f.doc_set_logps[index_of_subset(f.doc_sets, doc_set, "joint_logprob")];

    f.sent.resize(ex.docs.size());
    for (std::size_t m = 0; m < doc_set.size(); ++m) {
        const SentStage& stage = ensure_sent_stage(model, ex, f, doc_set[m]);
        if (!subset_valid(stage.dist.space, rationale[m])) {
            throw std::invalid_argument("joint_logprob: rationale subset not valid for document " +
                                        std::to_string(doc_set[m]));
        }
        total += stage.dist.log_probs[index_of_subset(stage.dist.subsets, rationale[m], "joint_logprob")];
    }

    const auto targets = gold_answer_targets(model.vocab, ex);
    const auto sents = rationale_sentences(ex, doc_set, rationale);
    const std::vector<int> ctx_ids = assemble_context_ids(model.vocab, ex.task, ex.question, sents);
    const Embedding ctx = embed_tokens(model.params, ctx_ids);
    for (const auto& target : targets) total += answer_seq_logprob(model.params, ctx, target);
    return total;
}

double approx_marginal_ll(const Model& model, const EncodedExample& ex, const MarginalOptions& opt) {
    MarginalOptions o = opt;
    o.exact = false;
    return marginal_forward(model, ex, o).value;
}

double exact_marginal_ll(const Model& model, const EncodedExample& ex, std::size_t cap) {
    MarginalOptions o;
    o.exact = true;
    o.exact_cap = cap;
    return marginal_forward(model, ex, o).value;
}

} // namespace mhqa
