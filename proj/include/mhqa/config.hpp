#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace mhqa {

// Flat run configuration merged from a key-value file and flag overrides.
// Unknown keys are fatal. All randomness derives from `seed`.
struct RunConfig {
    // encoder / scorer
    int embedding_dim = 32;
    int mlp_hidden = 32;
    int slice_len = 3;
    double init_scale = 0.1;
    // latent structure spaces
    int doc_set_size = 2;
    int max_rationale = 4;
    bool contiguous = false;
    int max_answer_len = 8;
    // training
    double learning_rate = 0.05;
    double warmup_fraction = 0.1;
    int epochs = 10;
    int batch_size = 8;
    int k_doc = 10;
    int k_sent = 9;
    int checkpoint_every = 100;
    // synthetic data
    int n_examples = 800;
    int dev_examples = 200;
    int n_docs_per_example = 6;
    int sentences_per_doc = 3;
    int entity_vocab_size = 64;
    double bridge_fraction = 0.5;
    int n_shortcuts = 0;
    // io
    std::string dataset;
    std::string dev_dataset;
    std::string dataset_format = "eraser";
    std::string out_dir = "out";
    std::string checkpoint;
    std::string vocab;
    // misc
    std::uint64_t seed = 0;
    bool independent_docs = false;
    std::string external_endpoint;
    int external_timeout_ms = 5000;

    // Applies "key = value"; throws on unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
};

// Reads the flat key-value file (a TOML-compatible subset: `key = value`
// lines, `#` comments), then applies the overrides in order.
RunConfig parse_config(const std::string& path,
                       const std::vector<std::pair<std::string, std::string>>& overrides = {});

RunConfig config_from_overrides(const std::vector<std::pair<std::string, std::string>>& overrides);

} // namespace mhqa
