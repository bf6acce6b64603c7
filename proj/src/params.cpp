#include "mhqa/params.hpp"

#include <cmath>
#include <stdexcept>

#include "mhqa/rng.hpp"

namespace mhqa {

void EncoderConfig::validate() const {
    if (embedding_dim < 1) throw std::invalid_argument("EncoderConfig: embedding_dim must be >= 1");
    if (mlp_hidden < 1) throw std::invalid_argument("EncoderConfig: mlp_hidden must be >= 1");
    if (slice_len < 1) throw std::invalid_argument("EncoderConfig: slice_len must be >= 1");
    if (init_scale < 0.0) throw std::invalid_argument("EncoderConfig: init_scale must be >= 0");
}

std::vector<ParamStore::Entry> ParamStore::entries() {
    return {
        {"token_embeddings", &token_embeddings, &g_token_embeddings},
        {"mlp_w1", &mlp_w1, &g_mlp_w1},
        {"mlp_w2", &mlp_w2, &g_mlp_w2},
        {"sent_score_v", &sent_score_v, &g_sent_score_v},
        {"dec_w", &dec_w, &g_dec_w},
        {"dec_u", &dec_u, &g_dec_u},
    };
}

std::vector<ParamStore::ConstEntry> ParamStore::centries() const {
    return {
        {"token_embeddings", &token_embeddings},
        {"mlp_w1", &mlp_w1},
        {"mlp_w2", &mlp_w2},
        {"sent_score_v", &sent_score_v},
        {"dec_w", &dec_w},
        {"dec_u", &dec_u},
    };
}

void ParamStore::zero_grads() {
    g_token_embeddings.zero();
    g_mlp_w1.zero();
    g_mlp_w2.zero();
    g_sent_score_v.zero();
    g_dec_w.zero();
    g_dec_u.zero();
}

bool ParamStore::all_finite() const {
    for (const Mat* m : {&token_embeddings, &mlp_w1, &mlp_w2, &sent_score_v, &dec_w, &dec_u}) {
        for (double v : m->a) {
            if (!std::isfinite(v)) return false;
        }
    }
    return true;
}

ParamStore ParamStore::rounded_to_f32() const {
    ParamStore out = *this;
    for (auto& e : out.entries()) {
        for (double& v : e.value->a) v = static_cast<double>(static_cast<float>(v));
        e.grad->zero();
    }
    return out;
}

ParamStore init_params(const EncoderConfig& cfg, int vocab_size) {
    cfg.validate();
    if (vocab_size < 1) throw std::invalid_argument("init_params: vocab_size must be >= 1");

    const auto n = static_cast<std::size_t>(cfg.embedding_dim);
    const auto h = static_cast<std::size_t>(cfg.mlp_hidden);
    const auto v = static_cast<std::size_t>(vocab_size);

    ParamStore p;
    p.cfg = cfg;
    p.vocab_size = vocab_size;
    p.token_embeddings = Mat(v, n);
    p.mlp_w1 = Mat(h, 3 * n);
    p.mlp_w2 = Mat(1, h);
    p.sent_score_v = Mat(1, n);
    p.dec_w = Mat(h, 2 * n);
    p.dec_u = Mat(v + 1, h);
    p.g_token_embeddings = Mat(v, n);
    p.g_mlp_w1 = Mat(h, 3 * n);
    p.g_mlp_w2 = Mat(1, h);
    p.g_sent_score_v = Mat(1, n);
    p.g_dec_w = Mat(h, 2 * n);
    p.g_dec_u = Mat(v + 1, h);

    std::mt19937_64 gen(cfg.seed);
    for (auto& e : p.entries()) {
        for (double& x : e.value->a) x = rand_symmetric(gen, cfg.init_scale);
    }
    return p;
}

} // namespace mhqa
