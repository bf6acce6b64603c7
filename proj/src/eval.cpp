#include "mhqa/eval.hpp"

#include <algorithm>
#include <cmath>

#include "mhqa/metrics.hpp"
#include "mhqa/prompt.hpp"
#include <json.hpp>

namespace mhqa {

using ordered_json = nlohmann::ordered_json;

namespace {

// Top set_size documents by singleton score, ties to the lower index.
Subset top_singleton_docs(const std::vector<double>& scores, int set_size) {
    std::vector<int> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
    });
    Subset out(order.begin(), order.begin() + set_size);
    std::sort(out.begin(), out.end());
    return out;
}

std::string prompt_input_for(const Model& model, const EncodedExample& ex,
                             const std::vector<std::vector<int>>& rationale_sents) {
    std::vector<std::string> rat_tokens;
    for (const auto& sent : rationale_sents) {
        for (int id : sent) rat_tokens.push_back(model.vocab.token(id));
    }
    std::vector<std::string> q_tokens;
    for (int id : ex.question) q_tokens.push_back(model.vocab.token(id));
    std::vector<std::pair<std::string, bool>> choices;
    const std::vector<std::pair<std::string, bool>>* choices_ptr = nullptr;
    if (ex.task == Task::MCQ) {
        for (const auto& [toks, correct] : ex.mcq_choices) {
            std::vector<std::string> ct;
            for (int id : toks) ct.push_back(model.vocab.token(id));
            choices.emplace_back(join_tokens(ct), correct);
        }
        choices_ptr = &choices;
    }
    return render_prompt(ex.task, join_tokens(q_tokens), join_tokens(rat_tokens), choices_ptr).input;
}

} // namespace

SetDistribution indep_doc_distribution(const ParamStore& params, const std::vector<int>& question,
                                       const std::vector<std::vector<std::vector<int>>>& documents,
                                       int set_size) {
    if (set_size < 1 || set_size > static_cast<int>(documents.size())) {
        throw std::invalid_argument("indep_doc_distribution: set_size out of range");
    }
    std::vector<Embedding> embs;
    embs.reserve(documents.size());
    for (const auto& doc : documents) embs.push_back(doc_embedding(params, question, doc));
    const std::vector<double> singles = doc_singleton_scores(params, embs);
    const double lse = log_sum_exp(singles);

    SubsetSpace space;
    space.universe_size = static_cast<int>(documents.size());
    space.min_size = set_size;
    space.max_size = set_size;
    std::vector<Subset> sets = enumerate_subsets(space);
    std::vector<double> scores;
    scores.reserve(sets.size());
    for (const auto& s : sets) {
        double acc = 0.0;
        for (int d : s) acc += singles[static_cast<std::size_t>(d)] - lse;
        scores.push_back(acc);
    }
    return SetDistribution::from_scores(space, std::move(sets), scores);
}

Prediction predict(const Model& model, const Example& example, const PredictOptions& opt) {
    const EncodedExample ex = encode_example(example, model.vocab);
    Prediction pred;
    pred.example_id = ex.id;
    pred.task = ex.task;

    const SubsetSpace doc_space = doc_space_for(model.cfg, static_cast<int>(ex.docs.size()));
    std::vector<Embedding> embs;
    embs.reserve(ex.docs.size());
    for (const auto& doc : ex.docs) embs.push_back(doc_embedding(model.params, ex.question, doc));

    if (model.cfg.independent_docs) {
        const std::vector<double> singles = doc_singleton_scores(model.params, embs);
        pred.doc_set = top_singleton_docs(singles, doc_space.max_size);
        const SetDistribution dist = indep_doc_distribution(model.params, ex.question, ex.docs,
                                                            doc_space.max_size);
        auto it = std::lower_bound(dist.subsets.begin(), dist.subsets.end(), pred.doc_set,
                                   subset_canonical_less);
        pred.doc_logp = dist.log_probs[static_cast<std::size_t>(it - dist.subsets.begin())];
    } else {
        std::vector<Subset> sets = enumerate_subsets(doc_space);
        std::vector<double> scores;
        scores.reserve(sets.size());
        for (const auto& s : sets) {
            scores.push_back(mlp_score(model.params, doc_set_input(embs, s)));
        }
        const SetDistribution dist = SetDistribution::from_scores(doc_space, std::move(sets), scores);
        const SubsetCandidates best = top_k(dist, 1);
        pred.doc_set = best.items[0].first;
        pred.doc_logp = best.items[0].second;
    }

    std::vector<SetDistribution> member_dists;
    member_dists.reserve(pred.doc_set.size());
    for (int d : pred.doc_set) {
        const auto& sentences = ex.docs[static_cast<std::size_t>(d)];
        member_dists.push_back(sentence_set_distribution(
            model.params, ex.question, sentences,
            sentence_space_for(model.cfg, static_cast<int>(sentences.size()))));
    }
    const TupleCandidates best_tuple = top_k_product(member_dists, 1);
    pred.rationale_logp = best_tuple.items[0].second;
    std::vector<std::vector<int>> rationale_sents;
    for (std::size_t m = 0; m < pred.doc_set.size(); ++m) {
        const int d = pred.doc_set[m];
        for (int j : best_tuple.items[0].first[m]) {
            pred.rationale.emplace(d, j);
            rationale_sents.push_back(ex.docs[static_cast<std::size_t>(d)][static_cast<std::size_t>(j)]);
        }
    }

    if (ex.task == Task::EQA) {
        if (opt.external) {
            const std::string prompt = prompt_input_for(model, ex, rationale_sents);
            const GenerationResult gen =
                external_generate(*opt.external, prompt, model.cfg.max_answer_len);
            pred.answer_tokens = tokenize(gen.text);
            if (gen.token_logprobs) {
                double total = 0.0;
                for (double lp : *gen.token_logprobs) total += lp;
                pred.answer_logp = total;
            }
        } else {
            const DecodeResult dec = greedy_decode(model.params, model.vocab, ex.task, ex.question,
                                                   rationale_sents, model.cfg.max_answer_len);
            for (int id : dec.tokens) pred.answer_tokens.push_back(model.vocab.token(id));
            pred.answer_logp = dec.logprob;
            pred.truncated = dec.truncated;
        }
    } else {
        const std::vector<int> ctx_ids =
            assemble_context_ids(model.vocab, ex.task, ex.question, rationale_sents);
        const Embedding ctx = embed_tokens(model.params, ctx_ids);
        std::vector<double> logps;
        if (ex.task == Task::BQA) {
            logps.push_back(answer_seq_logprob(model.params, ctx, bqa_target_ids(model.vocab, true)));
            logps.push_back(answer_seq_logprob(model.params, ctx, bqa_target_ids(model.vocab, false)));
        } else {
            for (const auto& [choice, correct] : ex.mcq_choices) {
                (void)correct;
                logps.push_back(answer_seq_logprob(
                    model.params, ctx, mcq_target_ids(model.vocab, choice, true)));
            }
        }
        const auto [probs, arg] = choice_normalize(logps);
        pred.choice_index = arg;
        pred.answer_logp = std::log(probs[static_cast<std::size_t>(arg)]);
        if (ex.task == Task::BQA) pred.bqa_supported = (arg == 0);
    }
    return pred;
}

namespace {

struct ExampleScores {
    double sent_f1 = 0.0;
    double doc_f1 = 0.0;
    double ans_f1 = 0.0;
    int ans_em = 0;
    bool has_gold_docs = false;
    bool has_gold_rationale = false;
};

ExampleScores score_example(const Example& ex, const Prediction& pred) {
    ExampleScores s;
    if (ex.gold_rationale) {
        s.has_gold_rationale = true;
        s.sent_f1 = sentence_f1(pred.rationale, *ex.gold_rationale);
    }
    if (ex.gold_docs) {
        s.has_gold_docs = true;
        s.doc_f1 = document_f1(std::set<int>(pred.doc_set.begin(), pred.doc_set.end()), *ex.gold_docs);
    }
    if (ex.task == Task::EQA) {
        const auto& gold = std::get<EqaAnswer>(ex.answer).text;
        const auto [f1, em] = answer_token_f1_em(pred.answer_tokens, gold);
        s.ans_f1 = f1;
        s.ans_em = em;
    } else if (ex.task == Task::BQA) {
        const bool gold = std::get<BqaAnswer>(ex.answer).supported;
        s.ans_em = (pred.bqa_supported == gold) ? 1 : 0;
        s.ans_f1 = s.ans_em;
    } else {
        const auto& choices = std::get<McqAnswer>(ex.answer).choices;
        const bool hit = pred.choice_index >= 0 &&
                         pred.choice_index < static_cast<int>(choices.size()) &&
                         choices[static_cast<std::size_t>(pred.choice_index)].correct;
        s.ans_em = hit ? 1 : 0;
        s.ans_f1 = s.ans_em;
    }
    return s;
}

void accumulate(MetricsGroup& g, const ExampleScores& s) {
    g.count += 1;
    if (s.has_gold_rationale) {
        g.with_gold_rationale += 1;
        g.sentence_f1 += s.sent_f1;
    }
    if (s.has_gold_docs) {
        g.with_gold_docs += 1;
        g.doc_f1 += s.doc_f1;
    }
    g.answer_f1 += s.ans_f1;
    g.answer_em += s.ans_em;
}

void finalize(MetricsGroup& g) {
    if (g.with_gold_rationale > 0) g.sentence_f1 /= g.with_gold_rationale;
    if (g.with_gold_docs > 0) g.doc_f1 /= g.with_gold_docs;
    if (g.count > 0) {
        g.answer_f1 /= g.count;
        g.answer_em /= g.count;
    }
}

ordered_json group_to_json(const MetricsGroup& g) {
    ordered_json j;
    j["count"] = g.count;
    j["with_gold_docs"] = g.with_gold_docs;
    j["with_gold_rationale"] = g.with_gold_rationale;
    j["sentence_f1"] = g.sentence_f1;
    j["doc_f1"] = g.doc_f1;
    j["answer_f1"] = g.answer_f1;
    j["answer_em"] = g.answer_em;
    return j;
}

} // namespace

MetricsReport evaluate(const Model& model, const std::vector<Example>& examples,
                       const PredictOptions& opt) {
    if (examples.empty()) throw std::invalid_argument("evaluate: no examples");
    MetricsReport report;
    for (const auto& ex : examples) {
        const Prediction pred = predict(model, ex, opt);
        const ExampleScores s = score_example(ex, pred);
        accumulate(report.overall, s);
        if (ex.reasoning_tag) accumulate(report.by_tag[*ex.reasoning_tag], s);
    }
    finalize(report.overall);
    for (auto& [tag, group] : report.by_tag) {
        (void)tag;
        finalize(group);
    }
    return report;
}

std::string metrics_to_json(const MetricsReport& report) {
    ordered_json j;
    j["overall"] = group_to_json(report.overall);
    ordered_json tags = ordered_json::object();
    for (const auto& [tag, group] : report.by_tag) tags[tag] = group_to_json(group);
    j["by_tag"] = std::move(tags);
    return j.dump(2) + "\n";
}

std::string predictions_to_json(const std::vector<Prediction>& preds) {
    ordered_json root = ordered_json::array();
    for (const auto& p : preds) {
        ordered_json j;
        j["id"] = p.example_id;
        j["task"] = task_name(p.task);
        j["doc_set"] = p.doc_set;
        ordered_json rat = ordered_json::array();
        for (const auto& [d, s] : p.rationale) rat.push_back(ordered_json::array({d, s}));
        j["rationale"] = std::move(rat);
        if (p.task == Task::EQA) {
            j["answer"] = join_tokens(p.answer_tokens);
            j["truncated"] = p.truncated;
        } else if (p.task == Task::BQA) {
            j["answer"] = p.bqa_supported ? "supported" : "refuted";
        } else {
            j["answer_choice"] = p.choice_index;
        }
        ordered_json lps;
        lps["doc"] = p.doc_logp;
        lps["rationale"] = p.rationale_logp;
        lps["answer"] = p.answer_logp;
        j["stage_logprobs"] = std::move(lps);
        root.push_back(std::move(j));
    }
    return root.dump(2) + "\n";
}

ShortcutReport find_shortcuts(const Model& model, const std::vector<Example>& examples,
                              const PredictOptions& opt) {
    ShortcutReport report;
    for (const auto& ex : examples) {
        if (!ex.gold_docs || !ex.gold_rationale) {
            report.skipped_missing_gold += 1;
            continue;
        }
        const Prediction pred = predict(model, ex, opt);
        const ExampleScores s = score_example(ex, pred);
        if (s.ans_em != 1) continue;
        if (pred.rationale == *ex.gold_rationale) continue;
        int gold_hits = 0;
        for (int d : pred.doc_set) gold_hits += ex.gold_docs->count(d);
        if (gold_hits != 1) continue;
        ShortcutRecord rec;
        rec.example_id = ex.id;
        rec.predicted_docs = pred.doc_set;
        rec.predicted_rationale = pred.rationale;
        rec.note = "answer exactly matched, rationale differs from the annotation, and only one "
                   "selected document is annotated; the answer is likely reachable without the "
                   "full chain";
        report.flagged.push_back(std::move(rec));
    }
    return report;
}

std::string shortcuts_to_json(const ShortcutReport& report) {
    ordered_json j;
    j["flagged_count"] = report.flagged.size();
    j["skipped_missing_gold"] = report.skipped_missing_gold;
    ordered_json arr = ordered_json::array();
    for (const auto& rec : report.flagged) {
        ordered_json r;
        r["id"] = rec.example_id;
        r["predicted_docs"] = rec.predicted_docs;
        ordered_json rat = ordered_json::array();
        for (const auto& [d, s] : rec.predicted_rationale) rat.push_back(ordered_json::array({d, s}));
        r["predicted_rationale"] = std::move(rat);
        r["note"] = rec.note;
        arr.push_back(std::move(r));
    }
    j["flagged"] = std::move(arr);
    return j.dump(2) + "\n";
}

} // namespace mhqa
