#include <doctest.h>
#include <stdexcept>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "mhqa/eval.hpp"
#include "mhqa/rng.hpp"
#include "mhqa/synth.hpp"
#include "mhqa/trainer.hpp"

using namespace mhqa;

namespace {

// Two documents of two sentences each, with a document space of sizes one
// and two so every stage of the model carries gradient.
Example tiny_example() {
    Example ex;
    ex.id = "tiny-0";
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
    return ex;
}

Model tiny_model(const std::vector<Example>& data, double init_scale = 0.5,
                 std::uint64_t seed = 4, int doc_min = 1, int doc_max = 2) {
    ModelConfig mc;
    mc.enc.embedding_dim = 6;
    mc.enc.mlp_hidden = 5;
    mc.enc.slice_len = 1;
    mc.enc.init_scale = init_scale;
    mc.enc.seed = seed;
    mc.doc_min_size = doc_min;
    mc.doc_max_size = doc_max;
    mc.max_rationale = 2;
    Vocab vocab = build_vocab({&data});
    return Model{init_params(mc.enc, vocab.size()), std::move(vocab), mc};
}

Model synth_model(const std::vector<Example>& data, std::uint64_t seed) {
    ModelConfig mc;
    mc.enc.embedding_dim = 8;
    mc.enc.mlp_hidden = 6;
    mc.enc.slice_len = 3;
    mc.enc.init_scale = 0.4;
    mc.enc.seed = seed;
    mc.doc_min_size = 2;
    mc.doc_max_size = 2;
    mc.max_rationale = 2;
    Vocab vocab = build_vocab({&data});
    return Model{init_params(mc.enc, vocab.size()), std::move(vocab), mc};
}

MarginalOptions covering(int k_doc = 64, int k_sent = 512) {
    MarginalOptions opt;
    opt.k_doc = k_doc;
    opt.k_sent = k_sent;
    opt.exact_cap = 100000;
    return opt;
}

std::vector<Example> small_corpus(int n, std::uint64_t seed, double bridge_fraction = 0.5) {
    SynthConfig cfg;
    cfg.n_examples = n;
    cfg.n_docs_per_example = 4;
    cfg.n_distractors = 2;
    cfg.sentences_per_doc = 2;
    cfg.entity_vocab_size = 24;
    cfg.bridge_fraction = bridge_fraction;
    cfg.seed = seed;
    return synth_generate(cfg);
}

} // namespace

TEST_CASE("joint_logprob sums its three stage components") {
    const std::vector<Example> data = {tiny_example()};
    Model model = tiny_model(data);
    const EncodedExample ex = encode_example(data[0], model.vocab);

    const Subset doc_set = {0, 1};
    const std::vector<Subset> rationale = {{0}, {1}};
    const double joint = joint_logprob(model, ex, doc_set, rationale);

    // document stage, recomputed by hand
    const SubsetSpace doc_space = doc_space_for(model.cfg, 2);
    const auto doc_dist = doc_set_distribution(model.params, ex.question, ex.docs, doc_space);
    double expected = doc_dist.log_probs[2]; // canonical order: {0}, {1}, {0,1}

    // sentence stages
    for (std::size_t m = 0; m < doc_set.size(); ++m) {
        const auto& sentences = ex.docs[static_cast<std::size_t>(doc_set[m])];
        const auto dist = sentence_set_distribution(
            model.params, ex.question, sentences,
            sentence_space_for(model.cfg, static_cast<int>(sentences.size())));
        const auto it = std::lower_bound(dist.subsets.begin(), dist.subsets.end(), rationale[m],
                                         subset_canonical_less);
        expected += dist.log_probs[static_cast<std::size_t>(it - dist.subsets.begin())];
    }

    // answer stage under the same rationale
    const std::vector<std::vector<int>> sents = {ex.docs[0][0], ex.docs[1][1]};
    const auto ctx_ids = assemble_context_ids(model.vocab, Task::EQA, ex.question, sents);
    expected += answer_seq_logprob(model.params, embed_tokens(model.params, ctx_ids), ex.eqa_answer);

    CHECK(joint == doctest::Approx(expected));

    CHECK_THROWS_AS(joint_logprob(model, ex, {0, 1}, {{0}}), std::invalid_argument);
    CHECK_THROWS_AS(joint_logprob(model, ex, {0, 1}, {{0}, {5}}), std::invalid_argument);
}

TEST_CASE("covering candidate sets reproduce the exact marginal") {
    std::mt19937_64 gen(51);
    for (int trial = 0; trial < 12; ++trial) {
        const auto corpus = small_corpus(1, gen());
        Model model = synth_model(corpus, gen());
        const EncodedExample ex = encode_example(corpus[0], model.vocab);
        const double approx = approx_marginal_ll(model, ex, covering());
        const double exact = exact_marginal_ll(model, ex, 100000);
        CHECK(approx == doctest::Approx(exact).epsilon(1e-9));
    }
}

TEST_CASE("the marginal approximation is monotone in both candidate budgets") {
    std::mt19937_64 gen(52);
    for (int trial = 0; trial < 6; ++trial) {
        const auto corpus = small_corpus(1, gen());
        Model model = synth_model(corpus, gen());
        const EncodedExample ex = encode_example(corpus[0], model.vocab);
        const double exact = exact_marginal_ll(model, ex, 100000);

        double prev = -std::numeric_limits<double>::infinity();
        for (int k_sent : {1, 2, 4, 8, 16}) {
            MarginalOptions opt = covering(64, k_sent);
            const double value = approx_marginal_ll(model, ex, opt);
            CHECK(value >= prev - 1e-12);
            CHECK(value <= exact + 1e-12);
            prev = value;
        }
        prev = -std::numeric_limits<double>::infinity();
        for (int k_doc : {1, 2, 4, 6}) {
            MarginalOptions opt = covering(k_doc, 512);
            const double value = approx_marginal_ll(model, ex, opt);
            CHECK(value >= prev - 1e-12);
            CHECK(value <= exact + 1e-12);
            prev = value;
        }
    }
}

TEST_CASE("analytic gradients match central differences on every array") {
    const std::vector<Example> data = {tiny_example()};
    Model model = tiny_model(data);
    const std::vector<EncodedExample> batch = {encode_example(data[0], model.vocab)};
    const auto result = finite_difference_check(model, batch, covering());
    for (const auto& a : result.arrays) {
        INFO(a.name);
        CHECK(a.max_rel_err < 1e-4);
    }
}

TEST_CASE("fully symmetric parameters have a zero scoring-vector gradient") {
    const std::vector<Example> data = {tiny_example()};
    Model model = tiny_model(data, 0.0); // all-zero parameters
    const std::vector<EncodedExample> batch = {encode_example(data[0], model.vocab)};
    compute_gradients(model, batch, covering());
    for (double g : model.params.g_sent_score_v.a) CHECK(g == 0.0);
}

TEST_CASE("duplicating the batch leaves the mean gradient unchanged") {
    const auto corpus = small_corpus(2, 77);
    Model model = synth_model(corpus, 8);
    std::vector<EncodedExample> batch;
    for (const auto& ex : corpus) batch.push_back(encode_example(ex, model.vocab));
    compute_gradients(model, batch, covering());
    const auto grads_once = model.params.g_token_embeddings.a;

    std::vector<EncodedExample> doubled = batch;
    doubled.insert(doubled.end(), batch.begin(), batch.end());
    compute_gradients(model, doubled, covering());
    for (std::size_t i = 0; i < grads_once.size(); ++i) {
        CHECK(model.params.g_token_embeddings.a[i] == doctest::Approx(grads_once[i]));
    }
}

TEST_CASE("a small step along the gradient does not decrease the objective") {
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 5; ++trial) {
        const auto corpus = small_corpus(2, gen());
        Model model = synth_model(corpus, gen());
        std::vector<EncodedExample> batch;
        for (const auto& ex : corpus) batch.push_back(encode_example(ex, model.vocab));
        const auto opt = covering();
        double before = 0.0;
        for (const auto& ex : batch) before += approx_marginal_ll(model, ex, opt);
        compute_gradients(model, batch, opt);
        for (auto& e : model.params.entries()) {
            for (std::size_t i = 0; i < e.value->a.size(); ++i) {
                e.value->a[i] -= 1e-6 * e.grad->a[i];
            }
        }
        double after = 0.0;
        for (const auto& ex : batch) after += approx_marginal_ll(model, ex, opt);
        CHECK(after >= before - 1e-12);
    }
}

TEST_CASE("the warmup ramp is linear then constant") {
    TrainConfig cfg;
    cfg.learning_rate = 0.4;
    cfg.warmup_fraction = 0.1;
    CHECK(lr_at(0, 100, cfg) == 0.0);
    CHECK(lr_at(5, 100, cfg) == doctest::Approx(0.2));
    CHECK(lr_at(10, 100, cfg) == doctest::Approx(0.4)); // end of warmup
    CHECK(lr_at(55, 100, cfg) == doctest::Approx(0.4));
    CHECK(lr_at(100, 100, cfg) == doctest::Approx(0.4));
    cfg.warmup_fraction = 0.0;
    CHECK(lr_at(0, 100, cfg) == doctest::Approx(0.4));
    CHECK_THROWS_AS(lr_at(-1, 100, cfg), std::invalid_argument);
}

TEST_CASE("checkpoint selection follows the criterion with earliest ties") {
    const std::vector<CheckpointRecord> records = {
        {100, 0.5, 0.4, 2.0}, {200, 0.9, 0.5, 1.5}, {300, 0.7, 0.5, 1.0}};
    CHECK(select_checkpoint(records, SelectionCriterion::AnswerF1) == 1);
    CHECK(select_checkpoint(records, SelectionCriterion::AnswerEM) == 1); // tie -> earlier
    CHECK(select_checkpoint(records, SelectionCriterion::Nll) == 2);
    CHECK(select_checkpoint({{10, 0.1, 0.1, 3.0}}, SelectionCriterion::AnswerF1) == 0);
    CHECK_THROWS_AS(select_checkpoint({}, SelectionCriterion::AnswerF1), std::invalid_argument);
}

TEST_CASE("checkpoints round-trip bit-exactly") {
    const auto corpus = small_corpus(1, 5);
    Model model = synth_model(corpus, 2);
    Checkpoint ckpt;
    ckpt.meta.step = 42;
    ckpt.meta.seed = 7;
    ckpt.meta.config_hash = "cafe";
    ckpt.meta.vocab_hash = model.vocab.hash();
    ckpt.meta.dev_answer_f1 = 0.125;
    ckpt.params = model.params.rounded_to_f32();

    const auto dir = std::filesystem::temp_directory_path();
    const auto p1 = (dir / "mhqa_ck1.bin").string();
    const auto p2 = (dir / "mhqa_ck2.bin").string();
    save_checkpoint(p1, ckpt);
    const Checkpoint loaded = load_checkpoint(p1);
    save_checkpoint(p2, loaded);

    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    };
    CHECK(slurp(p1) == slurp(p2));
    CHECK(loaded.meta.step == 42);
    CHECK(loaded.meta.config_hash == "cafe");
    CHECK(loaded.params.vocab_size == model.params.vocab_size);
    for (std::size_t i = 0; i < ckpt.params.token_embeddings.a.size(); ++i) {
        CHECK(loaded.params.token_embeddings.a[i] == ckpt.params.token_embeddings.a[i]);
    }
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
}

TEST_CASE("training reduces the objective deterministically") {
    const auto train_set = small_corpus(24, 31);
    const auto dev_set = small_corpus(8, 32);
    std::vector<Example> all = train_set;
    all.insert(all.end(), dev_set.begin(), dev_set.end());
    TrainConfig cfg;
    cfg.learning_rate = 0.5;
    cfg.epochs = 4;
    cfg.batch_size = 8;
    cfg.k_doc = 8;
    cfg.k_sent = 16;
    cfg.max_rationale_sentences = 2;
    cfg.seed = 13;
    cfg.checkpoint_every = 6;

    Model model_a = synth_model(all, 3);
    const TrainResult a = train_model(model_a, train_set, dev_set, cfg);
    CHECK_FALSE(a.history.diverged);
    CHECK(a.history.steps.front().objective > a.history.steps.back().objective);

    Model model_b = synth_model(all, 3);
    const TrainResult b = train_model(model_b, train_set, dev_set, cfg);
    REQUIRE(a.history.steps.size() == b.history.steps.size());
    for (std::size_t i = 0; i < a.history.steps.size(); ++i) {
        CHECK(a.history.steps[i].objective == b.history.steps[i].objective);
    }

    // a reloaded best checkpoint predicts identically to the in-memory one
    const auto path = (std::filesystem::temp_directory_path() / "mhqa_best.bin").string();
    save_checkpoint(path, a.best);
    const Checkpoint reloaded = load_checkpoint(path);
    Model from_best{a.best.params, model_a.vocab, model_a.cfg};
    Model from_file{reloaded.params, model_b.vocab, model_b.cfg};
    for (const auto& ex : dev_set) {
        const Prediction x = predict(from_best, ex);
        const Prediction y = predict(from_file, ex);
        CHECK(x.doc_set == y.doc_set);
        CHECK(x.rationale == y.rationale);
        CHECK(x.answer_tokens == y.answer_tokens);
    }
    std::filesystem::remove(path);
}

TEST_CASE("a divergent run aborts onto the last checkpoint") {
    const auto train_set = small_corpus(8, 41);
    const auto dev_set = small_corpus(4, 42);
    std::vector<Example> all = train_set;
    all.insert(all.end(), dev_set.begin(), dev_set.end());
    TrainConfig cfg;
    cfg.learning_rate = 1e14; // guaranteed blow-up
    cfg.epochs = 3;
    cfg.batch_size = 4;
    cfg.k_doc = 4;
    cfg.k_sent = 4;
    cfg.max_rationale_sentences = 2;
    cfg.seed = 1;
    cfg.checkpoint_every = 1000;

    Model model = synth_model(all, 9);
    const TrainResult result = train_model(model, train_set, dev_set, cfg);
    CHECK(result.history.diverged);
    CHECK(model.params.all_finite());
    REQUIRE_FALSE(result.history.checkpoints.empty());
}
