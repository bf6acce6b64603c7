#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mhqa {

// Row-major dense matrix of doubles. Vectors are 1 x n.
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double* row(std::size_t r) { return a.data() + r * cols; }
    const double* row(std::size_t r) const { return a.data() + r * cols; }
    double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
    std::size_t size() const { return a.size(); }
    void zero() { std::fill(a.begin(), a.end(), 0.0); }
};

struct EncoderConfig {
    int embedding_dim = 32; // n
    int mlp_hidden = 32;    // h, shared by the pair scorer and the decoder
    int slice_len = 3;      // m, sentences per document slice
    double init_scale = 0.1;
    std::uint64_t seed = 0;

    void validate() const;
};

// Every trainable array with its gradient buffer. The decoder weights live
// here too so one checkpoint covers the whole model.
struct ParamStore {
    EncoderConfig cfg;
    int vocab_size = 0;

    Mat token_embeddings; // [vocab, n]
    Mat mlp_w1;           // [h, 3n]
    Mat mlp_w2;           // [1, h]
    Mat sent_score_v;     // [1, n]
    Mat dec_w;            // [h, 2n]
    Mat dec_u;            // [vocab+1, h]; the extra row is the end-of-sequence logit

    Mat g_token_embeddings, g_mlp_w1, g_mlp_w2, g_sent_score_v, g_dec_w, g_dec_u;

    int eos_id() const { return vocab_size; }

    struct Entry {
        std::string name;
        Mat* value;
        Mat* grad;
    };
    std::vector<Entry> entries();

    struct ConstEntry {
        std::string name;
        const Mat* value;
    };
    std::vector<ConstEntry> centries() const;

    void zero_grads();
    bool all_finite() const;
    // Copy with every value rounded through 32-bit floats, matching what a
    // checkpoint stores.
    ParamStore rounded_to_f32() const;
};

// Deterministic uniform(-init_scale, +init_scale) initialization.
ParamStore init_params(const EncoderConfig& cfg, int vocab_size);

} // namespace mhqa
