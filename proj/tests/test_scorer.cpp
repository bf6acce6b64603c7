#include <doctest.h>
#include <stdexcept>

#include <cmath>

#include "mhqa/rng.hpp"
#include "mhqa/scorer.hpp"

using namespace mhqa;

namespace {

EncoderConfig small_cfg(int n = 4, int h = 3, int m = 2, double scale = 0.3,
                        std::uint64_t seed = 21) {
    EncoderConfig cfg;
    cfg.embedding_dim = n;
    cfg.mlp_hidden = h;
    cfg.slice_len = m;
    cfg.init_scale = scale;
    cfg.seed = seed;
    return cfg;
}

Embedding add(const Embedding& a, const Embedding& b) {
    Embedding out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

} // namespace

TEST_CASE("init_params is deterministic and respects init_scale") {
    const auto a = init_params(small_cfg(), 9);
    const auto b = init_params(small_cfg(), 9);
    for (std::size_t i = 0; i < a.token_embeddings.a.size(); ++i) {
        CHECK(a.token_embeddings.a[i] == b.token_embeddings.a[i]);
    }
    const auto zero = init_params(small_cfg(4, 3, 2, 0.0), 9);
    for (double v : zero.dec_u.a) CHECK(v == 0.0);
    CHECK_THROWS_AS(init_params(small_cfg(), 0), std::invalid_argument);
}

TEST_CASE("embed_tokens averages rows") {
    const auto p = init_params(small_cfg(), 6);
    CHECK(embed_tokens(p, {}) == Embedding(4, 0.0));
    const auto single = embed_tokens(p, {3});
    for (int i = 0; i < 4; ++i) {
        CHECK(single[static_cast<std::size_t>(i)] ==
              p.token_embeddings.at(3, static_cast<std::size_t>(i)));
    }
    const auto fwd = embed_tokens(p, {1, 4, 2});
    const auto rev = embed_tokens(p, {4, 2, 1}); // order-free mean
    for (std::size_t i = 0; i < fwd.size(); ++i) CHECK(fwd[i] == doctest::Approx(rev[i]));
    CHECK_THROWS_AS(embed_tokens(p, {6}), std::out_of_range);
    CHECK_THROWS_AS(embed_tokens(p, {-1}), std::out_of_range);
}

TEST_CASE("marker embeddings are question-shifted sentence means") {
    const auto p = init_params(small_cfg(), 8);
    const std::vector<int> question = {0, 1};
    const std::vector<std::vector<int>> sentences = {{2, 3}, {4}, {2, 3}};
    const auto markers = sentence_marker_embeddings(p, question, sentences);
    REQUIRE(markers.size() == 3);
    CHECK(markers[0] == markers[2]); // identical sentences, identical markers
    CHECK(markers[0] == add(embed_tokens(p, question), embed_tokens(p, {2, 3})));

    const auto unconditioned = sentence_marker_embeddings(p, {}, sentences);
    CHECK(markers[1] != unconditioned[1]); // the question moves every marker
    CHECK_THROWS_AS(sentence_marker_embeddings(p, question, {}), std::invalid_argument);
}

TEST_CASE("subset_score is the scoring vector against the subset mean") {
    auto p = init_params(small_cfg(), 8);
    const auto markers = sentence_marker_embeddings(p, {0}, {{1}, {2}, {3}});
    const double single = subset_score(p, markers, {1});
    double expect = 0.0;
    for (int i = 0; i < 4; ++i) {
        expect += p.sent_score_v.at(0, static_cast<std::size_t>(i)) *
                  markers[1][static_cast<std::size_t>(i)];
    }
    CHECK(single == doctest::Approx(expect));

    const double pair = subset_score(p, markers, {1, 2});
    double expect_pair = 0.0;
    for (int i = 0; i < 4; ++i) {
        expect_pair += p.sent_score_v.at(0, static_cast<std::size_t>(i)) *
                       (markers[1][static_cast<std::size_t>(i)] +
                        markers[2][static_cast<std::size_t>(i)]) / 2.0;
    }
    CHECK(pair == doctest::Approx(expect_pair));

    p.sent_score_v.zero();
    CHECK(subset_score(p, markers, {0, 2}) == 0.0);
    CHECK_THROWS_AS(subset_score(p, markers, {}), std::invalid_argument);
}

TEST_CASE("doc_embedding slices and averages") {
    const auto p = init_params(small_cfg(4, 3, 2), 10);
    const std::vector<int> q = {0};
    // two sentences with slice_len 2: a single whole-document slice
    const std::vector<std::vector<int>> short_doc = {{1, 2}, {3}};
    CHECK(doc_embedding(p, q, short_doc) == embed_tokens(p, {0, 1, 2, 3}));

    // four sentences, slice_len 2: mean of the two slice embeddings
    const std::vector<std::vector<int>> long_doc = {{1}, {2}, {3}, {4}};
    const auto e1 = embed_tokens(p, {0, 1, 2});
    const auto e2 = embed_tokens(p, {0, 3, 4});
    const auto combined = doc_embedding(p, q, long_doc);
    for (std::size_t i = 0; i < combined.size(); ++i) {
        CHECK(combined[i] == doctest::Approx((e1[i] + e2[i]) / 2.0));
    }

    // slice_len 1: mean of per-sentence slices
    const auto p1 = init_params(small_cfg(4, 3, 1), 10);
    const auto per_sentence = doc_embedding(p1, q, {{1}, {2}});
    const auto s1 = embed_tokens(p1, {0, 1});
    const auto s2 = embed_tokens(p1, {0, 2});
    for (std::size_t i = 0; i < per_sentence.size(); ++i) {
        CHECK(per_sentence[i] == doctest::Approx((s1[i] + s2[i]) / 2.0));
    }
}

TEST_CASE("doc_set_distribution normalizes over all valid sets") {
    const auto p = init_params(small_cfg(), 12);
    std::vector<std::vector<std::vector<int>>> docs;
    for (int d = 0; d < 10; ++d) docs.push_back({{d}, {d + 1}});
    const SubsetSpace pairs{10, 2, 2, false};
    const auto dist = doc_set_distribution(p, {0}, docs, pairs);
    dist.check();
    CHECK(dist.subsets.size() == 45);
}

TEST_CASE("identical documents make symmetric pair probabilities") {
    const auto p = init_params(small_cfg(), 12);
    const std::vector<std::vector<std::vector<int>>> docs = {
        {{1, 2}, {3}}, {{1, 2}, {3}}, {{4, 5}, {6}}};
    const auto dist = doc_set_distribution(p, {0}, docs, {3, 2, 2, false});
    // subsets in canonical order: {0,1}, {0,2}, {1,2}
    CHECK(dist.log_probs[1] == dist.log_probs[2]); // p({0,2}) == p({1,2}) exactly
}

TEST_CASE("a zero output layer gives a uniform document distribution") {
    auto p = init_params(small_cfg(), 12);
    p.mlp_w2.zero();
    const std::vector<std::vector<std::vector<int>>> docs = {{{1}}, {{2}}, {{3}}, {{4}}};
    const auto dist = doc_set_distribution(p, {0}, docs, {4, 2, 2, false});
    for (double lp : dist.log_probs) CHECK(lp == doctest::Approx(std::log(1.0 / 6.0)));
}

TEST_CASE("scaling the scoring vector preserves subset ranking") {
    auto p = init_params(small_cfg(), 12);
    const std::vector<std::vector<int>> sentences = {{1}, {2}, {3}, {4}};
    const SubsetSpace space{4, 1, 2, false};
    const auto before = top_k(sentence_set_distribution(p, {0}, sentences, space), 11);
    for (double& v : p.sent_score_v.a) v *= 3.5;
    const auto after = top_k(sentence_set_distribution(p, {0}, sentences, space), 11);
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i) {
        CHECK(before[i].first == after[i].first);
    }
}

TEST_CASE("scorer outputs stay finite for finite parameters") {
    std::mt19937_64 gen(33);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = init_params(small_cfg(4, 3, 2, 2.0, gen()), 12);
        const std::vector<std::vector<std::vector<int>>> docs = {{{1}, {2}}, {{3}}, {{4}, {5}}};
        const auto dist = doc_set_distribution(p, {0, 6}, docs, {3, 1, 2, false});
        for (double lp : dist.log_probs) CHECK(std::isfinite(lp));
        const auto sent = sentence_set_distribution(p, {0}, {{1}, {2}}, {2, 1, 2, false});
        for (double lp : sent.log_probs) CHECK(std::isfinite(lp));
    }
}
