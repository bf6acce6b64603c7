#include "mhqa/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>

namespace mhqa {

namespace {

std::string trim(const std::string& s) {
    const auto lo = s.find_first_not_of(" \t\r\n");
    if (lo == std::string::npos) return "";
    const auto hi = s.find_last_not_of(" \t\r\n");
    return s.substr(lo, hi - lo + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\''))) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

int to_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': expected an integer, got '" + value + "'");
    }
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': expected a number, got '" + value + "'");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': expected an unsigned integer, got '" +
                                    value + "'");
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("config key '" + key + "': expected true/false, got '" + value + "'");
}

} // namespace

void RunConfig::set(const std::string& key, const std::string& raw) {
    const std::string value = unquote(trim(raw));
    using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;
    static const std::map<std::string, Setter> setters = {
        {"embedding_dim", [](RunConfig& c, const std::string& k, const std::string& v) { c.embedding_dim = to_int(k, v); }},
        {"mlp_hidden", [](RunConfig& c, const std::string& k, const std::string& v) { c.mlp_hidden = to_int(k, v); }},
        {"slice_len", [](RunConfig& c, const std::string& k, const std::string& v) { c.slice_len = to_int(k, v); }},
        {"init_scale", [](RunConfig& c, const std::string& k, const std::string& v) { c.init_scale = to_double(k, v); }},
        {"doc_set_size", [](RunConfig& c, const std::string& k, const std::string& v) { c.doc_set_size = to_int(k, v); }},
        {"max_rationale", [](RunConfig& c, const std::string& k, const std::string& v) { c.max_rationale = to_int(k, v); }},
        {"contiguous", [](RunConfig& c, const std::string& k, const std::string& v) { c.contiguous = to_bool(k, v); }},
        {"max_answer_len", [](RunConfig& c, const std::string& k, const std::string& v) { c.max_answer_len = to_int(k, v); }},
        {"learning_rate", [](RunConfig& c, const std::string& k, const std::string& v) { c.learning_rate = to_double(k, v); }},
        {"warmup_fraction", [](RunConfig& c, const std::string& k, const std::string& v) { c.warmup_fraction = to_double(k, v); }},
        {"epochs", [](RunConfig& c, const std::string& k, const std::string& v) { c.epochs = to_int(k, v); }},
        {"batch_size", [](RunConfig& c, const std::string& k, const std::string& v) { c.batch_size = to_int(k, v); }},
        {"k_doc", [](RunConfig& c, const std::string& k, const std::string& v) { c.k_doc = to_int(k, v); }},
        {"k_sent", [](RunConfig& c, const std::string& k, const std::string& v) { c.k_sent = to_int(k, v); }},
        {"checkpoint_every", [](RunConfig& c, const std::string& k, const std::string& v) { c.checkpoint_every = to_int(k, v); }},
        {"n_examples", [](RunConfig& c, const std::string& k, const std::string& v) { c.n_examples = to_int(k, v); }},
        {"dev_examples", [](RunConfig& c, const std::string& k, const std::string& v) { c.dev_examples = to_int(k, v); }},
        {"n_docs_per_example", [](RunConfig& c, const std::string& k, const std::string& v) { c.n_docs_per_example = to_int(k, v); }},
        {"sentences_per_doc", [](RunConfig& c, const std::string& k, const std::string& v) { c.sentences_per_doc = to_int(k, v); }},
        {"entity_vocab_size", [](RunConfig& c, const std::string& k, const std::string& v) { c.entity_vocab_size = to_int(k, v); }},
        {"bridge_fraction", [](RunConfig& c, const std::string& k, const std::string& v) { c.bridge_fraction = to_double(k, v); }},
        {"n_shortcuts", [](RunConfig& c, const std::string& k, const std::string& v) { c.n_shortcuts = to_int(k, v); }},
        {"dataset", [](RunConfig& c, const std::string&, const std::string& v) { c.dataset = v; }},
        {"dev_dataset", [](RunConfig& c, const std::string&, const std::string& v) { c.dev_dataset = v; }},
        {"dataset_format", [](RunConfig& c, const std::string&, const std::string& v) { c.dataset_format = v; }},
        {"out_dir", [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; }},
        {"checkpoint", [](RunConfig& c, const std::string&, const std::string& v) { c.checkpoint = v; }},
        {"vocab", [](RunConfig& c, const std::string&, const std::string& v) { c.vocab = v; }},
        {"seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = to_u64(k, v); }},
        {"independent_docs", [](RunConfig& c, const std::string& k, const std::string& v) { c.independent_docs = to_bool(k, v); }},
        {"external_endpoint", [](RunConfig& c, const std::string&, const std::string& v) { c.external_endpoint = v; }},
        {"external_timeout_ms", [](RunConfig& c, const std::string& k, const std::string& v) { c.external_timeout_ms = to_int(k, v); }},
    };
    auto it = setters.find(key);
    if (it == setters.end()) {
        throw std::invalid_argument("unknown config key '" + key + "'");
    }
    it->second(*this, key, value);
}

RunConfig parse_config(const std::string& path,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
    RunConfig cfg;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected 'key = value'");
        }
        cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    for (const auto& [k, v] : overrides) cfg.set(k, v);
    return cfg;
}

RunConfig config_from_overrides(const std::vector<std::pair<std::string, std::string>>& overrides) {
    RunConfig cfg;
    for (const auto& [k, v] : overrides) cfg.set(k, v);
    return cfg;
}

} // namespace mhqa
