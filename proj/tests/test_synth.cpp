#include <doctest.h>
#include <stdexcept>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "mhqa/data.hpp"
#include "mhqa/synth.hpp"

using namespace mhqa;

namespace {

std::string corpus_bytes(const std::vector<Example>& examples) {
    const auto path = (std::filesystem::temp_directory_path() / "mhqa_synth_bytes.json").string();
    save_dataset(path, examples);
    std::ifstream in(path, std::ios::binary);
    std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    std::filesystem::remove(path);
    return bytes;
}

bool contains_token(const std::vector<std::string>& tokens, const std::string& t) {
    return std::find(tokens.begin(), tokens.end(), t) != tokens.end();
}

// A sentence is question-relevant when it names one of the question's
// entities; the multi-hop property is that the answer is unreachable from
// question-relevant sentences once either gold document is removed.
bool answer_reachable_one_hop(const Example& ex, int removed_doc) {
    std::set<std::string> question_entities;
    for (const auto& t : ex.question) {
        if (t.rfind("ent", 0) == 0) question_entities.insert(t);
    }
    const std::string answer = std::get<EqaAnswer>(ex.answer).text.at(0);
    for (std::size_t d = 0; d < ex.documents.size(); ++d) {
        if (static_cast<int>(d) == removed_doc) continue;
        for (const auto& sent : ex.documents[d].sentences) {
            bool relevant = false;
            for (const auto& t : sent) {
                if (question_entities.count(t)) relevant = true;
            }
            if (relevant && contains_token(sent, answer)) return true;
        }
    }
    return false;
}

} // namespace

TEST_CASE("generation is byte-identical under a fixed seed") {
    SynthConfig cfg;
    cfg.n_examples = 25;
    cfg.seed = 7;
    CHECK(corpus_bytes(synth_generate(cfg)) == corpus_bytes(synth_generate(cfg)));
}

TEST_CASE("bridge_fraction one tags every example bridge") {
    SynthConfig cfg;
    cfg.n_examples = 30;
    cfg.bridge_fraction = 1.0;
    cfg.seed = 3;
    for (const auto& ex : synth_generate(cfg)) CHECK(ex.reasoning_tag == "bridge");
    cfg.bridge_fraction = 0.0;
    for (const auto& ex : synth_generate(cfg)) CHECK(ex.reasoning_tag == "comparison");
}

TEST_CASE("examples have the configured shape") {
    SynthConfig cfg;
    cfg.n_examples = 100;
    cfg.n_docs_per_example = 6;
    cfg.n_distractors = 4;
    cfg.seed = 1;
    const auto corpus = synth_generate(cfg);
    REQUIRE(corpus.size() == 100);
    for (const auto& ex : corpus) {
        CHECK(ex.documents.size() == 6);
        REQUIRE(ex.gold_docs.has_value());
        CHECK(ex.gold_docs->size() == 2);
        CHECK(ex.gold_rationale->size() == 2);
        for (const auto& doc : ex.documents) CHECK(doc.sentences.size() == 3);
    }
}

TEST_CASE("a too-small symbol pool is rejected") {
    SynthConfig cfg;
    cfg.n_examples = 5;
    cfg.entity_vocab_size = 10;
    CHECK_THROWS_WITH_AS(synth_generate(cfg), doctest::Contains("too small"), std::invalid_argument);
    SynthConfig bad_shape;
    bad_shape.n_distractors = 1; // must be n_docs_per_example - 2
    CHECK_THROWS_AS(synth_generate(bad_shape), std::invalid_argument);
}

TEST_CASE("removing either gold document breaks the bridge chain") {
    SynthConfig cfg;
    cfg.n_examples = 40;
    cfg.bridge_fraction = 1.0;
    cfg.seed = 9;
    for (const auto& ex : synth_generate(cfg)) {
        // intact example: the chain is completable in two hops, and the
        // answer never sits in a question-relevant sentence of a distractor
        for (int gold : *ex.gold_docs) {
            CHECK_FALSE(answer_reachable_one_hop(ex, gold));
        }
    }
}

TEST_CASE("planted shortcut examples duplicate the value document") {
    SynthConfig cfg;
    cfg.n_examples = 0;
    cfg.seed = 4;
    const auto planted = synth_generate_shortcuts(cfg, 10);
    REQUIRE(planted.size() == 10);
    for (const auto& ex : planted) {
        CHECK(ex.id.rfind("shortcut-", 0) == 0);
        REQUIRE(ex.gold_docs->size() == 2);
        // find the value document (the gold doc holding the answer) and its copy
        const std::string answer = std::get<EqaAnswer>(ex.answer).text.at(0);
        int value_doc = -1;
        for (int d : *ex.gold_docs) {
            for (const auto& sent : ex.documents[static_cast<std::size_t>(d)].sentences) {
                if (contains_token(sent, answer)) value_doc = d;
            }
        }
        REQUIRE(value_doc >= 0);
        int copy = -1;
        for (std::size_t d = 0; d < ex.documents.size(); ++d) {
            if (static_cast<int>(d) == value_doc) continue;
            if (ex.documents[d].sentences ==
                ex.documents[static_cast<std::size_t>(value_doc)].sentences) {
                copy = static_cast<int>(d);
            }
        }
        REQUIRE(copy >= 0);
        CHECK(copy < value_doc); // ties resolve toward the unannotated copy
        CHECK_FALSE(ex.gold_docs->count(copy));
    }
}
