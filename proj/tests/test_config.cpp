#include <doctest.h>
#include <stdexcept>

#include <filesystem>
#include <fstream>

#include "mhqa/config.hpp"
#include "mhqa/run.hpp"

using namespace mhqa;

namespace {

std::string write_config(const std::string& content) {
    const auto path = (std::filesystem::temp_directory_path() / "mhqa_cfg_test.toml").string();
    std::ofstream out(path);
    out << content;
    return path;
}

} // namespace

TEST_CASE("flags override file values") {
    const auto path = write_config("learning_rate = 0.1\nseed = 3\n");
    const RunConfig cfg = parse_config(path, {{"learning_rate", "0.01"}});
    CHECK(cfg.learning_rate == doctest::Approx(0.01));
    CHECK(cfg.seed == 3);
    std::filesystem::remove(path);
}

TEST_CASE("unknown keys are fatal and named") {
    const auto path = write_config("lerning_rate = 0.1\n");
    CHECK_THROWS_WITH_AS(parse_config(path), doctest::Contains("lerning_rate"),
                         std::invalid_argument);
    std::filesystem::remove(path);
}

TEST_CASE("type mismatches are fatal and named") {
    const auto path = write_config("epochs = soon\n");
    CHECK_THROWS_WITH_AS(parse_config(path), doctest::Contains("epochs"), std::invalid_argument);
    std::filesystem::remove(path);
}

TEST_CASE("comments, quotes, and booleans parse") {
    const auto path = write_config(
        "# a comment line\n"
        "dataset = \"data/train.json\"  # trailing comment\n"
        "contiguous = true\n"
        "bridge_fraction = 0.25\n"
        "\n");
    const RunConfig cfg = parse_config(path);
    CHECK(cfg.dataset == "data/train.json");
    CHECK(cfg.contiguous);
    CHECK(cfg.bridge_fraction == doctest::Approx(0.25));
    std::filesystem::remove(path);
}

TEST_CASE("malformed lines and missing files are errors") {
    const auto path = write_config("just words\n");
    CHECK_THROWS_AS(parse_config(path), std::invalid_argument);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(parse_config("/nonexistent/mhqa.toml"), std::runtime_error);
}

TEST_CASE("training without a dataset fails with a clear message") {
    RunConfig cfg;
    cfg.out_dir = (std::filesystem::temp_directory_path() / "mhqa_cfg_run").string();
    cfg.dataset = (std::filesystem::temp_directory_path() / "definitely_missing.json").string();
    CHECK_THROWS_WITH_AS(run_train(cfg), doctest::Contains("definitely_missing"),
                         std::runtime_error);
    std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("config wiring derives the component configurations") {
    RunConfig cfg;
    cfg.embedding_dim = 12;
    cfg.doc_set_size = 1;
    cfg.max_rationale = 3;
    cfg.k_doc = 5;
    const ModelConfig mc = model_config_from(cfg);
    CHECK(mc.enc.embedding_dim == 12);
    CHECK(mc.doc_min_size == 1);
    CHECK(mc.doc_max_size == 1);
    CHECK(mc.max_rationale == 3);
    const TrainConfig tc = train_config_from(cfg);
    CHECK(tc.k_doc == 5);
    CHECK(tc.max_rationale_sentences == 3);
}
