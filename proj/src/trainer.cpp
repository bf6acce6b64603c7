#include "mhqa/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mhqa/eval.hpp"
#include "mhqa/rng.hpp"
#include <json.hpp>

namespace mhqa {

using ordered_json = nlohmann::ordered_json;

void TrainConfig::validate() const {
    if (learning_rate <= 0.0) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
    if (warmup_fraction < 0.0 || warmup_fraction > 1.0) {
        throw std::invalid_argument("TrainConfig: warmup_fraction must be in [0, 1]");
    }
    if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (k_doc < 1 || k_sent < 1) throw std::invalid_argument("TrainConfig: k values must be >= 1");
    if (max_rationale_sentences < 1) {
        throw std::invalid_argument("TrainConfig: max_rationale_sentences must be >= 1");
    }
    if (checkpoint_every < 1) throw std::invalid_argument("TrainConfig: checkpoint_every must be >= 1");
}

double lr_at(long step, long total_steps, const TrainConfig& cfg) {
    if (step < 0 || step > total_steps) throw std::invalid_argument("lr_at: step out of range");
    const double warmup_steps = cfg.warmup_fraction * static_cast<double>(total_steps);
    if (warmup_steps <= 0.0 || static_cast<double>(step) >= warmup_steps) return cfg.learning_rate;
    return cfg.learning_rate * static_cast<double>(step) / warmup_steps;
}

std::string history_to_json(const TrainHistory& history) {
    ordered_json j;
    j["diverged"] = history.diverged;
    ordered_json steps = ordered_json::array();
    for (const auto& s : history.steps) {
        steps.push_back(ordered_json{{"step", s.step}, {"objective", s.objective}});
    }
    j["steps"] = std::move(steps);
    ordered_json cks = ordered_json::array();
    for (const auto& c : history.checkpoints) {
        cks.push_back(ordered_json{{"step", c.step},
                                   {"answer_f1", c.answer_f1},
                                   {"answer_em", c.answer_em},
                                   {"nll", c.nll}});
    }
    j["checkpoints"] = std::move(cks);
    return j.dump(2) + "\n";
}

SelectionCriterion selection_criterion_from_name(const std::string& name) {
    if (name == "answer_f1") return SelectionCriterion::AnswerF1;
    if (name == "answer_em") return SelectionCriterion::AnswerEM;
    if (name == "nll") return SelectionCriterion::Nll;
    throw std::invalid_argument("unknown selection criterion: '" + name + "'");
}

std::size_t select_checkpoint(const std::vector<CheckpointRecord>& checkpoints,
                              SelectionCriterion criterion) {
    if (checkpoints.empty()) throw std::invalid_argument("select_checkpoint: no checkpoints");
    std::size_t best = 0;
    for (std::size_t i = 1; i < checkpoints.size(); ++i) {
        const auto& a = checkpoints[i];
        const auto& b = checkpoints[best];
        bool better = false;
        switch (criterion) {
            case SelectionCriterion::AnswerF1: better = a.answer_f1 > b.answer_f1; break;
            case SelectionCriterion::AnswerEM: better = a.answer_em > b.answer_em; break;
            case SelectionCriterion::Nll: better = a.nll < b.nll; break;
        }
        if (better) best = i;
    }
    return best;
}

double compute_gradients(Model& model, const std::vector<EncodedExample>& batch,
                         const MarginalOptions& opt) {
    if (batch.empty()) throw std::invalid_argument("compute_gradients: empty batch");
    model.params.zero_grads();
    const double scale = -1.0 / static_cast<double>(batch.size());
    double loss = 0.0;
    for (const auto& ex : batch) {
        const MarginalForward fwd = marginal_forward(model, ex, opt);
        loss += scale * fwd.value;
        marginal_backward(fwd, model, ex, scale, model.params);
    }
    for (auto& e : model.params.entries()) {
        for (double g : e.grad->a) {
            if (!std::isfinite(g)) {
                throw std::runtime_error("compute_gradients: non-finite gradient in '" + e.name + "'");
            }
        }
    }
    return loss;
}

namespace {

double dev_nll(const Model& model, const std::vector<EncodedExample>& dev,
               const MarginalOptions& opt) {
    double total = 0.0;
    for (const auto& ex : dev) total += approx_marginal_ll(model, ex, opt);
    return -total / static_cast<double>(dev.size());
}

std::string train_config_hash(const Model& model, const TrainConfig& cfg) {
    const std::string repr =
        std::to_string(model.cfg.enc.embedding_dim) + "," + std::to_string(model.cfg.enc.mlp_hidden) +
        "," + std::to_string(model.cfg.enc.slice_len) + "," + std::to_string(model.cfg.doc_min_size) +
        "," + std::to_string(model.cfg.doc_max_size) + "," + std::to_string(model.cfg.max_rationale) +
        "," + std::to_string(model.cfg.contiguous) + "," + std::to_string(model.cfg.independent_docs) +
        "," + std::to_string(cfg.learning_rate) + "," + std::to_string(cfg.warmup_fraction) + "," +
        std::to_string(cfg.epochs) + "," + std::to_string(cfg.batch_size) + "," +
        std::to_string(cfg.k_doc) + "," + std::to_string(cfg.k_sent) + "," + std::to_string(cfg.seed);
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : repr) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct CheckpointScore {
    CheckpointRecord record;
    Checkpoint checkpoint;
};

CheckpointScore take_checkpoint(const Model& model, long step, const TrainConfig& cfg,
                                const std::vector<Example>& dev_raw,
                                const std::vector<EncodedExample>& dev_encoded,
                                const MarginalOptions& opt) {
    Model snapshot{model.params.rounded_to_f32(), model.vocab, model.cfg};
    const MetricsReport report = evaluate(snapshot, dev_raw);
    CheckpointScore out;
    out.record.step = step;
    out.record.answer_f1 = report.overall.answer_f1;
    out.record.answer_em = report.overall.answer_em;
    out.record.nll = dev_nll(snapshot, dev_encoded, opt);
    out.checkpoint.meta.step = step;
    out.checkpoint.meta.seed = cfg.seed;
    out.checkpoint.meta.config_hash = train_config_hash(model, cfg);
    out.checkpoint.meta.vocab_hash = model.vocab.hash();
    out.checkpoint.meta.dev_answer_f1 = out.record.answer_f1;
    out.checkpoint.meta.dev_answer_em = out.record.answer_em;
    out.checkpoint.meta.dev_nll = out.record.nll;
    out.checkpoint.params = std::move(snapshot.params);
    return out;
}

} // namespace

TrainResult train_model(Model& model, const std::vector<Example>& train_set,
                        const std::vector<Example>& dev_set, const TrainConfig& cfg) {
    cfg.validate();
    if (train_set.empty() || dev_set.empty()) {
        throw std::invalid_argument("train_model: train and dev sets must be non-empty");
    }
    model.cfg.max_rationale = cfg.max_rationale_sentences;
    model.cfg.validate();

    // Training touches gold-free encoded views only; the raw dev examples are
    // used by checkpoint evaluation alone.
    std::vector<EncodedExample> train;
    train.reserve(train_set.size());
    for (const auto& ex : train_set) train.push_back(encode_example(ex, model.vocab));
    std::vector<EncodedExample> dev;
    dev.reserve(dev_set.size());
    for (const auto& ex : dev_set) dev.push_back(encode_example(ex, model.vocab));

    MarginalOptions opt;
    opt.k_doc = cfg.k_doc;
    opt.k_sent = cfg.k_sent;

    const long n = static_cast<long>(train.size());
    const long batches_per_epoch = (n + cfg.batch_size - 1) / cfg.batch_size;
    const long total_steps = batches_per_epoch * cfg.epochs;

    std::mt19937_64 gen(derive_seed(cfg.seed, 17));
    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    TrainResult result;
    bool have_best = false;
    // Most recent snapshot, restored on divergence. Seeded with the initial
    // state so an immediate abort still leaves usable parameters.
    Checkpoint last_ckpt;
    last_ckpt.meta.step = 0;
    last_ckpt.meta.seed = cfg.seed;
    last_ckpt.meta.config_hash = train_config_hash(model, cfg);
    last_ckpt.meta.vocab_hash = model.vocab.hash();
    last_ckpt.params = model.params.rounded_to_f32();

    auto checkpoint_now = [&](long step) {
        CheckpointScore score = take_checkpoint(model, step, cfg, dev_set, dev, opt);
        result.history.checkpoints.push_back(score.record);
        last_ckpt = score.checkpoint;
        const std::size_t newest = result.history.checkpoints.size() - 1;
        if (select_checkpoint(result.history.checkpoints, SelectionCriterion::AnswerF1) == newest) {
            result.best = std::move(score.checkpoint);
            have_best = true;
        }
    };
    // Exploding parameters can stay technically finite while making scoring
    // overflow; a failed dev evaluation therefore also counts as divergence.
    auto safe_checkpoint = [&](long step) -> bool {
        try {
            checkpoint_now(step);
            return true;
        } catch (const std::exception&) {
            result.history.diverged = true;
            model.params = last_ckpt.params;
            return false;
        }
    };

    long step = 0;
    bool aborted = false;
    for (int epoch = 0; epoch < cfg.epochs && !aborted; ++epoch) {
        shuffle_inplace(order, gen);
        for (long b = 0; b < batches_per_epoch && !aborted; ++b) {
            std::vector<EncodedExample> batch;
            const std::size_t lo = static_cast<std::size_t>(b) * static_cast<std::size_t>(cfg.batch_size);
            const std::size_t hi = std::min(order.size(), lo + static_cast<std::size_t>(cfg.batch_size));
            for (std::size_t i = lo; i < hi; ++i) batch.push_back(train[order[i]]);

            double loss = 0.0;
            bool bad = false;
            try {
                loss = compute_gradients(model, batch, opt);
            } catch (const std::exception&) {
                // non-finite scores or gradients: treat as divergence
                bad = true;
            }
            if (bad || !std::isfinite(loss)) {
                result.history.diverged = true;
                model.params = last_ckpt.params;
                aborted = true;
                break;
            }
            const double lr = lr_at(step, total_steps, cfg);
            for (auto& e : model.params.entries()) {
                for (std::size_t i = 0; i < e.value->a.size(); ++i) {
                    e.value->a[i] -= lr * e.grad->a[i];
                }
            }
            ++step;
            result.history.steps.push_back({step, loss});
            if (step % cfg.checkpoint_every == 0 && !safe_checkpoint(step)) {
                aborted = true;
                break;
            }
        }
    }
    if (!aborted && (result.history.checkpoints.empty() ||
                     result.history.checkpoints.back().step != step)) {
        if (!safe_checkpoint(step)) aborted = true;
    }
    if (!have_best) {
        // aborted before any scored checkpoint; score the restored snapshot
        checkpoint_now(last_ckpt.meta.step);
    }
    return result;
}

GradCheckResult finite_difference_check(Model& model, const std::vector<EncodedExample>& batch,
                                        const MarginalOptions& opt, double step_size) {
    const double loss0 = compute_gradients(model, batch, opt);
    (void)loss0;
    // keep analytic gradients aside; compute_gradients overwrites buffers
    std::vector<std::vector<double>> analytic;
    for (auto& e : model.params.entries()) analytic.push_back(e.grad->a);

    auto loss_at = [&]() {
        const double scale = -1.0 / static_cast<double>(batch.size());
        double total = 0.0;
        for (const auto& ex : batch) total += scale * marginal_forward(model, ex, opt).value;
        return total;
    };

    GradCheckResult result;
    auto entries = model.params.entries();
    for (std::size_t a = 0; a < entries.size(); ++a) {
        auto& e = entries[a];
        GradCheckResult::ArrayResult ar;
        ar.name = e.name;
        for (std::size_t i = 0; i < e.value->a.size(); ++i) {
            const double saved = e.value->a[i];
            e.value->a[i] = saved + step_size;
            const double up = loss_at();
            e.value->a[i] = saved - step_size;
            const double down = loss_at();
            e.value->a[i] = saved;
            const double numeric = (up - down) / (2.0 * step_size);
            const double exact = analytic[a][i];
            const double rel = std::abs(exact - numeric) /
                               std::max({1.0, std::abs(exact), std::abs(numeric)});
            ar.max_rel_err = std::max(ar.max_rel_err, rel);
        }
        result.max_rel_err = std::max(result.max_rel_err, ar.max_rel_err);
        result.arrays.push_back(std::move(ar));
    }
    return result;
}

} // namespace mhqa
