#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "mhqa/trainer.hpp"
#include <json.hpp>

namespace mhqa {

using ordered_json = nlohmann::ordered_json;

static_assert(std::endian::native == std::endian::little,
              "checkpoint files are little-endian and this build assumes a little-endian host");

namespace {

constexpr const char* kMagic = "mhqa-checkpoint 1";

ordered_json manifest_json(const Checkpoint& ckpt) {
    ordered_json arrays = ordered_json::array();
    for (const auto& e : ckpt.params.centries()) {
        arrays.push_back(ordered_json{
            {"name", e.name}, {"rows", e.value->rows}, {"cols", e.value->cols}});
    }
    ordered_json j;
    j["format_version"] = ckpt.meta.format_version;
    j["config_hash"] = ckpt.meta.config_hash;
    j["step"] = ckpt.meta.step;
    j["seed"] = ckpt.meta.seed;
    j["vocab_hash"] = ckpt.meta.vocab_hash;
    j["metrics"] = ordered_json{{"answer_f1", ckpt.meta.dev_answer_f1},
                                {"answer_em", ckpt.meta.dev_answer_em},
                                {"nll", ckpt.meta.dev_nll}};
    j["encoder"] = ordered_json{{"embedding_dim", ckpt.params.cfg.embedding_dim},
                                {"mlp_hidden", ckpt.params.cfg.mlp_hidden},
                                {"slice_len", ckpt.params.cfg.slice_len},
                                {"init_scale", ckpt.params.cfg.init_scale},
                                {"seed", ckpt.params.cfg.seed}};
    j["vocab_size"] = ckpt.params.vocab_size;
    j["arrays"] = std::move(arrays);
    return j;
}

} // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open checkpoint file for writing: " + path);
    out << kMagic << '\n';
    out << manifest_json(ckpt).dump() << '\n';
    for (const auto& e : ckpt.params.centries()) {
        std::vector<float> buf(e.value->a.size());
        for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(e.value->a[i]);
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size() * sizeof(float)));
    }
    if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint file: " + path);
    std::string magic;
    std::getline(in, magic);
    if (magic != kMagic) throw std::runtime_error("not a checkpoint file: " + path);
    std::string manifest_line;
    std::getline(in, manifest_line);
    ordered_json j;
    try {
        j = ordered_json::parse(manifest_line);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("checkpoint manifest is not valid JSON: " + std::string(e.what()));
    }

    Checkpoint ckpt;
    ckpt.meta.format_version = j.at("format_version").get<int>();
    if (ckpt.meta.format_version != 1) {
        throw std::runtime_error("unsupported checkpoint format version " +
                                 std::to_string(ckpt.meta.format_version));
    }
    ckpt.meta.config_hash = j.at("config_hash").get<std::string>();
    ckpt.meta.step = j.at("step").get<long>();
    ckpt.meta.seed = j.at("seed").get<std::uint64_t>();
    ckpt.meta.vocab_hash = j.at("vocab_hash").get<std::uint64_t>();
    ckpt.meta.dev_answer_f1 = j.at("metrics").at("answer_f1").get<double>();
    ckpt.meta.dev_answer_em = j.at("metrics").at("answer_em").get<double>();
    ckpt.meta.dev_nll = j.at("metrics").at("nll").get<double>();

    EncoderConfig enc;
    enc.embedding_dim = j.at("encoder").at("embedding_dim").get<int>();
    enc.mlp_hidden = j.at("encoder").at("mlp_hidden").get<int>();
    enc.slice_len = j.at("encoder").at("slice_len").get<int>();
    enc.init_scale = j.at("encoder").at("init_scale").get<double>();
    enc.seed = j.at("encoder").at("seed").get<std::uint64_t>();
    const int vocab_size = j.at("vocab_size").get<int>();

    ckpt.params = init_params(enc, vocab_size);
    auto entries = ckpt.params.entries();
    const auto& arrays = j.at("arrays");
    if (arrays.size() != entries.size()) {
        throw std::runtime_error("checkpoint manifest lists " + std::to_string(arrays.size()) +
                                 " arrays, expected " + std::to_string(entries.size()));
    }
    for (std::size_t a = 0; a < entries.size(); ++a) {
        const auto& decl = arrays[a];
        if (decl.at("name").get<std::string>() != entries[a].name ||
            decl.at("rows").get<std::size_t>() != entries[a].value->rows ||
            decl.at("cols").get<std::size_t>() != entries[a].value->cols) {
            throw std::runtime_error("checkpoint array mismatch at '" + entries[a].name + "'");
        }
        std::vector<float> buf(entries[a].value->a.size());
        in.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(float)));
        if (!in) throw std::runtime_error("checkpoint truncated in array '" + entries[a].name + "'");
        for (std::size_t i = 0; i < buf.size(); ++i) {
            entries[a].value->a[i] = static_cast<double>(buf[i]);
        }
        entries[a].grad->zero();
    }
    return ckpt;
}

} // namespace mhqa
