#include "mhqa/run.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "mhqa/eval.hpp"
#include "mhqa/rng.hpp"
#include "mhqa/synth.hpp"
#include <json.hpp>

namespace mhqa {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string out_path(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    return (fs::path(cfg.out_dir) / name).string();
}

std::string dataset_path(const RunConfig& cfg) {
    return cfg.dataset.empty() ? (fs::path(cfg.out_dir) / "train.json").string() : cfg.dataset;
}

std::string dev_path(const RunConfig& cfg) {
    return cfg.dev_dataset.empty() ? (fs::path(cfg.out_dir) / "dev.json").string() : cfg.dev_dataset;
}

std::string checkpoint_path(const RunConfig& cfg) {
    return cfg.checkpoint.empty() ? (fs::path(cfg.out_dir) / "best.ckpt").string() : cfg.checkpoint;
}

std::string vocab_path(const RunConfig& cfg) {
    return cfg.vocab.empty() ? (fs::path(cfg.out_dir) / "vocab.txt").string() : cfg.vocab;
}

SynthConfig synth_config_from(const RunConfig& cfg, int n, std::uint64_t seed) {
    SynthConfig s;
    s.n_examples = n;
    s.n_docs_per_example = cfg.n_docs_per_example;
    s.n_distractors = cfg.n_docs_per_example - 2;
    s.sentences_per_doc = cfg.sentences_per_doc;
    s.entity_vocab_size = cfg.entity_vocab_size;
    s.bridge_fraction = cfg.bridge_fraction;
    s.seed = seed;
    return s;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
}

Model load_model(const RunConfig& cfg) {
    const Checkpoint ckpt = load_checkpoint(checkpoint_path(cfg));
    Vocab vocab = Vocab::load(vocab_path(cfg));
    if (vocab.size() != ckpt.params.vocab_size) {
        throw std::runtime_error("vocab file and checkpoint disagree on vocabulary size");
    }
    if (vocab.hash() != ckpt.meta.vocab_hash) {
        throw std::runtime_error("vocab file does not match the checkpoint's vocabulary");
    }
    ModelConfig mc = model_config_from(cfg);
    mc.enc = ckpt.params.cfg;
    return Model{ckpt.params, std::move(vocab), mc};
}

PredictOptions predict_options_from(const RunConfig& cfg) {
    PredictOptions opt;
    if (!cfg.external_endpoint.empty()) {
        ExternalConfig ext;
        ext.endpoint = cfg.external_endpoint;
        ext.timeout_ms = cfg.external_timeout_ms;
        opt.external = std::move(ext);
    }
    return opt;
}

} // namespace

ModelConfig model_config_from(const RunConfig& cfg) {
    ModelConfig mc;
    mc.enc.embedding_dim = cfg.embedding_dim;
    mc.enc.mlp_hidden = cfg.mlp_hidden;
    mc.enc.slice_len = cfg.slice_len;
    mc.enc.init_scale = cfg.init_scale;
    mc.enc.seed = derive_seed(cfg.seed, 2);
    mc.doc_min_size = cfg.doc_set_size;
    mc.doc_max_size = cfg.doc_set_size;
    mc.max_rationale = cfg.max_rationale;
    mc.contiguous = cfg.contiguous;
    mc.independent_docs = cfg.independent_docs;
    mc.max_answer_len = cfg.max_answer_len;
    mc.validate();
    return mc;
}

TrainConfig train_config_from(const RunConfig& cfg) {
    TrainConfig tc;
    tc.learning_rate = cfg.learning_rate;
    tc.warmup_fraction = cfg.warmup_fraction;
    tc.epochs = cfg.epochs;
    tc.batch_size = cfg.batch_size;
    tc.k_doc = cfg.k_doc;
    tc.k_sent = cfg.k_sent;
    tc.max_rationale_sentences = cfg.max_rationale;
    tc.seed = derive_seed(cfg.seed, 3);
    tc.checkpoint_every = cfg.checkpoint_every;
    tc.validate();
    return tc;
}

int run_synth(const RunConfig& cfg) {
    std::vector<Example> train = synth_generate(synth_config_from(cfg, cfg.n_examples, cfg.seed));
    if (cfg.n_shortcuts > 0) {
        auto planted = synth_generate_shortcuts(synth_config_from(cfg, 0, cfg.seed), cfg.n_shortcuts);
        train.insert(train.end(), planted.begin(), planted.end());
    }
    save_dataset(out_path(cfg, "train.json"), train);
    const auto dev = synth_generate(synth_config_from(cfg, cfg.dev_examples, derive_seed(cfg.seed, 1)));
    save_dataset(out_path(cfg, "dev.json"), dev);
    std::cout << "wrote " << train.size() << " training and " << dev.size()
              << " dev examples under " << cfg.out_dir << "\n";
    return 0;
}

int run_train(const RunConfig& cfg) {
    const auto train_set = load_dataset(dataset_path(cfg), dataset_format_from_name(cfg.dataset_format));
    const auto dev_set = load_dataset(dev_path(cfg), dataset_format_from_name(cfg.dataset_format));
    if (train_set.empty() || dev_set.empty()) {
        throw std::runtime_error("train: need non-empty train and dev datasets");
    }
    Vocab vocab = build_vocab({&train_set, &dev_set});
    vocab.save(out_path(cfg, "vocab.txt"));

    const ModelConfig mc = model_config_from(cfg);
    Model model{init_params(mc.enc, vocab.size()), std::move(vocab), mc};
    const TrainConfig tc = train_config_from(cfg);
    const TrainResult result = train_model(model, train_set, dev_set, tc);

    save_checkpoint(out_path(cfg, "best.ckpt"), result.best);
    Checkpoint last;
    last.meta = result.best.meta;
    last.meta.step = result.history.steps.empty() ? 0 : result.history.steps.back().step;
    last.params = model.params.rounded_to_f32();
    save_checkpoint(out_path(cfg, "last.ckpt"), last);
    write_text(out_path(cfg, "history.json"), history_to_json(result.history));

    std::cout << "trained " << result.history.steps.size() << " steps; best checkpoint at step "
              << result.best.meta.step << " (dev answer F1 " << result.best.meta.dev_answer_f1
              << ", EM " << result.best.meta.dev_answer_em << ")\n";
    if (result.history.diverged) {
        std::cerr << "training diverged; parameters restored from the last checkpoint\n";
        return 1;
    }
    return 0;
}

int run_eval(const RunConfig& cfg) {
    const Model model = load_model(cfg);
    const auto examples = load_dataset(dev_path(cfg), dataset_format_from_name(cfg.dataset_format));
    const MetricsReport report = evaluate(model, examples, predict_options_from(cfg));
    const std::string json = metrics_to_json(report);
    write_text(out_path(cfg, "metrics.json"), json);
    std::cout << json;
    return 0;
}

int run_predict(const RunConfig& cfg) {
    const Model model = load_model(cfg);
    const auto examples = load_dataset(dev_path(cfg), dataset_format_from_name(cfg.dataset_format));
    std::vector<Prediction> preds;
    preds.reserve(examples.size());
    const PredictOptions opt = predict_options_from(cfg);
    for (const auto& ex : examples) preds.push_back(predict(model, ex, opt));
    write_text(out_path(cfg, "predictions.json"), predictions_to_json(preds));
    std::cout << "wrote " << preds.size() << " predictions\n";
    return 0;
}

int run_gradcheck(const RunConfig& cfg) {
    // Small fixed instance: two documents of two sentences each, with a
    // document space allowing sizes one and two so every array sees signal.
    std::vector<Example> data(1);
    Example& ex = data[0];
    ex.id = "gradcheck-0";
    ex.task = Task::EQA;
    ex.question = tokenize("which colour is the flag of ruritania ?");
    Document d0;
    d0.title = "doc-0";
    d0.sentences = {tokenize("the flag of ruritania is crimson ."),
                    tokenize("ruritania borders the sea .")};
    Document d1;
    d1.title = "doc-1";
    d1.sentences = {tokenize("the anthem of ruritania is short ."),
                    tokenize("crimson dye is costly .")};
    ex.documents = {d0, d1};
    ex.answer = EqaAnswer{tokenize("crimson")};

    Vocab vocab = build_vocab({&data});

    ModelConfig mc;
    mc.enc.embedding_dim = 6;
    mc.enc.mlp_hidden = 5;
    mc.enc.slice_len = 1;
    mc.enc.init_scale = 0.5;
    mc.enc.seed = derive_seed(cfg.seed, 4);
    mc.doc_min_size = 1;
    mc.doc_max_size = 2;
    mc.max_rationale = 2;
    Model model{init_params(mc.enc, vocab.size()), std::move(vocab), mc};

    std::vector<EncodedExample> batch{encode_example(ex, model.vocab)};
    MarginalOptions opt;
    opt.k_doc = 3;
    opt.k_sent = 9;

    const GradCheckResult result = finite_difference_check(model, batch, opt);
    const bool pass = result.max_rel_err < 1e-4;

    ordered_json j;
    j["step_size"] = 1e-4;
    j["threshold"] = 1e-4;
    j["max_rel_err"] = result.max_rel_err;
    j["pass"] = pass;
    ordered_json arr = ordered_json::array();
    for (const auto& a : result.arrays) {
        arr.push_back(ordered_json{{"name", a.name}, {"max_rel_err", a.max_rel_err}});
    }
    j["arrays"] = std::move(arr);
    write_text(out_path(cfg, "gradcheck.json"), j.dump(2) + "\n");

    std::cout << "gradcheck max relative error " << result.max_rel_err << " ("
              << (pass ? "pass" : "FAIL") << ")\n";
    return pass ? 0 : 1;
}

int run_shortcuts(const RunConfig& cfg) {
    const Model model = load_model(cfg);
    const auto examples = load_dataset(dataset_path(cfg), dataset_format_from_name(cfg.dataset_format));
    const ShortcutReport report = find_shortcuts(model, examples, predict_options_from(cfg));
    write_text(out_path(cfg, "shortcuts.json"), shortcuts_to_json(report));
    std::cout << "flagged " << report.flagged.size() << " examples ("
              << report.skipped_missing_gold << " skipped for missing annotations)\n";
    return 0;
}

int run_command(const std::string& command, const RunConfig& cfg) {
    if (command == "synth") return run_synth(cfg);
    if (command == "train") return run_train(cfg);
    if (command == "eval") return run_eval(cfg);
    if (command == "predict") return run_predict(cfg);
    if (command == "gradcheck") return run_gradcheck(cfg);
    if (command == "shortcuts") return run_shortcuts(cfg);
    throw std::invalid_argument("unknown command '" + command + "'");
}

} // namespace mhqa
