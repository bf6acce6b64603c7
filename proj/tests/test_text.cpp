#include <doctest.h>
#include <stdexcept>

#include <filesystem>
#include <random>

#include "mhqa/rng.hpp"
#include "mhqa/text.hpp"

using namespace mhqa;

TEST_CASE("tokenize splits punctuation and lowercases") {
    CHECK(tokenize("March 19, 2017") == std::vector<std::string>{"march", "19", ",", "2017"});
    CHECK(tokenize("") == std::vector<std::string>{});
    CHECK(tokenize("A b. C") == std::vector<std::string>{"a", "b", ".", "c"});
    CHECK(tokenize("[SEP]") == std::vector<std::string>{"[", "sep", "]"});
    CHECK(tokenize("  spaced\tout \n") == std::vector<std::string>{"spaced", "out"});
}

TEST_CASE("tokenize is idempotent on its own space-joined output") {
    std::mt19937_64 gen(42);
    const std::string alphabet = "abcXYZ 019.,?!()'-";
    for (int trial = 0; trial < 200; ++trial) {
        std::string s;
        const auto len = rand_below(gen, 30);
        for (std::uint64_t i = 0; i < len; ++i) {
            s.push_back(alphabet[rand_below(gen, alphabet.size())]);
        }
        const auto once = tokenize(s);
        CHECK(tokenize(join_tokens(once)) == once);
    }
}

TEST_CASE("vocab assigns sorted ids and rejects unknown tokens") {
    const Vocab v = Vocab::from_tokens({"beta", "alpha", "beta", "gamma"});
    CHECK(v.size() == 3);
    CHECK(v.id("alpha") == 0);
    CHECK(v.id("beta") == 1);
    CHECK(v.token(2) == "gamma");
    CHECK(v.contains("beta"));
    CHECK_FALSE(v.contains("delta"));
    CHECK_THROWS_WITH_AS(v.id("delta"), doctest::Contains("delta"), std::out_of_range);
}

TEST_CASE("vocab round-trips through its file form") {
    const Vocab v = Vocab::from_tokens({"b", "a", "c", "aa"});
    const auto path = (std::filesystem::temp_directory_path() / "mhqa_vocab_test.txt").string();
    v.save(path);
    const Vocab loaded = Vocab::load(path);
    CHECK(loaded.tokens() == v.tokens());
    CHECK(loaded.hash() == v.hash());
    std::filesystem::remove(path);
}
