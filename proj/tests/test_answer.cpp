#include <doctest.h>
#include <stdexcept>

#include <cmath>

#include "mhqa/answer.hpp"
#include "mhqa/prompt.hpp"

using namespace mhqa;

namespace {

// Tiny world shared by the decoder tests.
struct Fixture {
    Vocab vocab;
    ParamStore params;

    explicit Fixture(double init_scale = 0.0, std::uint64_t seed = 1)
        : vocab(Vocab::from_tokens({"?", "[", "]", "a", "b", "blue", "color", "is", "sep", "sky",
                                    "the", "what",
                                    // prompt template tokens
                                    "claim", "to", "be", "verified", "that", "we", "have",
                                    "following", "facts", ":", "question"})),
          params(init_params(make_cfg(init_scale, seed), vocab.size())) {}

    static EncoderConfig make_cfg(double scale, std::uint64_t seed) {
        EncoderConfig cfg;
        cfg.embedding_dim = 3;
        cfg.mlp_hidden = 2;
        cfg.slice_len = 2;
        cfg.init_scale = scale;
        cfg.seed = seed;
        return cfg;
    }

    std::vector<int> ids(const std::string& text) const { return vocab.ids(tokenize(text)); }
};

double manual_step_logprob(const ParamStore& p, const Embedding& ctx, int prev, int gold) {
    const auto logits = answer_step_logits(p, ctx, prev);
    double m = logits[0];
    for (double v : logits) m = std::max(m, v);
    double z = 0.0;
    for (double v : logits) z += std::exp(v - m);
    return logits[static_cast<std::size_t>(gold)] - (m + std::log(z));
}

} // namespace

TEST_CASE("zero parameters give a uniform next-token distribution") {
    Fixture f;
    const auto q = f.ids("what color is the sky ?");
    const std::vector<std::vector<int>> rationale = {f.ids("the sky is blue")};
    const auto answer = f.ids("blue");
    const double lp = answer_logprob(f.params, f.vocab, Task::EQA, q, rationale, answer);
    const int out_vocab = f.vocab.size() + 1;
    // two teacher-forced steps: "blue" then end-of-sequence
    CHECK(lp == doctest::Approx(-2.0 * std::log(out_vocab)));
}

TEST_CASE("sequence log-likelihood decomposes into per-step softmax scores") {
    Fixture f(0.4, 9);
    const auto ctx = embed_tokens(
        f.params, assemble_context_ids(f.vocab, Task::EQA, f.ids("what color ?"),
                                       {f.ids("the sky is blue")}));
    const std::vector<int> target = f.ids("sky is blue");
    const double whole = answer_seq_logprob(f.params, ctx, target);
    double stepwise = 0.0;
    int prev = -1;
    std::vector<int> with_eos = target;
    with_eos.push_back(f.params.eos_id());
    for (int gold : with_eos) {
        stepwise += manual_step_logprob(f.params, ctx, prev, gold);
        prev = gold == f.params.eos_id() ? -1 : gold;
    }
    CHECK(whole == doctest::Approx(stepwise));
    CHECK(std::exp(whole) > 0.0);
    CHECK(std::exp(whole) <= 1.0);
}

TEST_CASE("the assembled context matches the rendered prompt tokens") {
    Fixture f;
    const auto q = f.ids("what color is the sky ?");
    const std::vector<std::vector<int>> rationale = {f.ids("the sky is blue"), f.ids("a b")};
    for (Task task : {Task::EQA, Task::BQA}) {
        const auto direct = assemble_context_ids(f.vocab, task, q, rationale);
        const auto rendered = render_prompt(task, "what color is the sky ?", "the sky is blue a b");
        CHECK(direct == f.vocab.ids(tokenize(rendered.input)));
    }
}

TEST_CASE("answer scoring validates its inputs") {
    Fixture f;
    const auto q = f.ids("what ?");
    CHECK_THROWS_AS(answer_logprob(f.params, f.vocab, Task::EQA, q, {}, f.ids("blue")),
                    std::invalid_argument);
    CHECK_THROWS_AS(answer_logprob(f.params, f.vocab, Task::EQA, q, {f.ids("a")}, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(answer_seq_logprob(f.params, Embedding(3, 0.0), {99}), std::out_of_range);
}

TEST_CASE("greedy decoding follows rigged logits") {
    Fixture f;
    const auto q = f.ids("what ?");
    const std::vector<std::vector<int>> rationale = {f.ids("the sky is blue")};

    SUBCASE("one dominant token repeats until the length cap") {
        // nonzero hidden state plus one large output row makes that token win
        for (double& v : f.params.token_embeddings.a) v = 0.5;
        for (double& v : f.params.dec_w.a) v = 1.0;
        const int t = f.vocab.id("sky");
        for (std::size_t r = 0; r < f.params.dec_u.cols; ++r) {
            f.params.dec_u.at(static_cast<std::size_t>(t), r) = 50.0;
        }
        const auto out = greedy_decode(f.params, f.vocab, Task::EQA, q, rationale, 4);
        CHECK(out.tokens == std::vector<int>{t, t, t, t});
        CHECK(out.truncated);
    }

    SUBCASE("dominant end-of-sequence yields an empty answer") {
        for (double& v : f.params.token_embeddings.a) v = 0.5;
        for (double& v : f.params.dec_w.a) v = 1.0;
        const auto eos = static_cast<std::size_t>(f.params.eos_id());
        for (std::size_t r = 0; r < f.params.dec_u.cols; ++r) f.params.dec_u.at(eos, r) = 50.0;
        const auto out = greedy_decode(f.params, f.vocab, Task::EQA, q, rationale, 4);
        CHECK(out.tokens.empty());
        CHECK_FALSE(out.truncated);
    }

    SUBCASE("exact ties resolve to the lowest token id") {
        const auto out = greedy_decode(f.params, f.vocab, Task::EQA, q, rationale, 3);
        CHECK(out.tokens == std::vector<int>{0, 0, 0});
        CHECK(out.truncated);
    }

    SUBCASE("decoding is deterministic") {
        Fixture g(0.4, 77);
        const auto a = greedy_decode(g.params, g.vocab, Task::EQA, q, rationale, 5);
        const auto b = greedy_decode(g.params, g.vocab, Task::EQA, q, rationale, 5);
        CHECK(a.tokens == b.tokens);
        CHECK(a.logprob == b.logprob);
    }
}

TEST_CASE("greedy prefixes dominate single-token deviations") {
    Fixture f(0.5, 123);
    const auto ctx = embed_tokens(
        f.params, assemble_context_ids(f.vocab, Task::EQA, f.ids("what color ?"),
                                       {f.ids("the sky is blue")}));
    const auto greedy = greedy_decode(f.params, f.vocab, Task::EQA, f.ids("what color ?"),
                                      {f.ids("the sky is blue")}, 4);
    std::vector<int> emitted = greedy.tokens;
    if (!greedy.truncated) emitted.push_back(f.params.eos_id());
    double prefix_lp = 0.0;
    int prev = -1;
    for (int chosen : emitted) {
        for (int w = 0; w <= f.params.eos_id(); ++w) {
            const double alt = prefix_lp + manual_step_logprob(f.params, ctx, prev, w);
            const double own = prefix_lp + manual_step_logprob(f.params, ctx, prev, chosen);
            CHECK(own >= alt - 1e-12);
        }
        prefix_lp += manual_step_logprob(f.params, ctx, prev, chosen);
        prev = chosen == f.params.eos_id() ? -1 : chosen;
    }
}

TEST_CASE("choice_normalize is a softmax with first-index ties") {
    const auto [probs, arg] = choice_normalize({std::log(0.2), std::log(0.1)});
    CHECK(probs[0] == doctest::Approx(2.0 / 3.0));
    CHECK(probs[1] == doctest::Approx(1.0 / 3.0));
    CHECK(arg == 0);

    const auto [uniform, arg_uniform] = choice_normalize({-1.5, -1.5, -1.5});
    for (double p : uniform) CHECK(p == doctest::Approx(1.0 / 3.0));
    CHECK(arg_uniform == 0);

    const auto [shifted, arg_shifted] = choice_normalize({std::log(0.2) + 7.0, std::log(0.1) + 7.0});
    CHECK(shifted[0] == doctest::Approx(2.0 / 3.0));
    CHECK(arg_shifted == 0);

    double total = 0.0;
    for (double p : shifted) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(choice_normalize({0.0}), std::invalid_argument);
}
