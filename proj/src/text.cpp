#include "mhqa/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

namespace mhqa {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    };
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            flush();
        } else if (std::ispunct(c)) {
            flush();
            out.push_back(std::string(1, static_cast<char>(c)));
        } else {
            cur.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    flush();
    return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

Vocab::Vocab(std::vector<std::string> sorted_tokens) : tokens_(std::move(sorted_tokens)) {
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        index_.emplace(tokens_[i], static_cast<int>(i));
    }
}

Vocab Vocab::from_tokens(const std::vector<std::string>& tokens) {
    std::vector<std::string> uniq = tokens;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    return Vocab(std::move(uniq));
}

int Vocab::id(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) {
        throw std::out_of_range("token not in vocabulary: '" + token + "'");
    }
    return it->second;
}

bool Vocab::contains(const std::string& token) const {
    return index_.count(token) != 0;
}

const std::string& Vocab::token(int id) const {
    if (id < 0 || id >= size()) {
        throw std::out_of_range("token id out of range: " + std::to_string(id));
    }
    return tokens_[static_cast<std::size_t>(id)];
}

std::vector<int> Vocab::ids(const std::vector<std::string>& tokens) const {
    std::vector<int> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(id(t));
    return out;
}

std::uint64_t Vocab::hash() const {
    // FNV-1a over tokens with separators
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& t : tokens_) {
        for (char c : t) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ULL;
        }
        h ^= 0xffu;
        h *= 1099511628211ULL;
    }
    return h;
}

void Vocab::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open vocab file for writing: " + path);
    for (const auto& t : tokens_) out << t << '\n';
}

Vocab Vocab::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open vocab file: " + path);
    std::vector<std::string> toks;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) toks.push_back(line);
    }
    std::vector<std::string> sorted = toks;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != toks) throw std::runtime_error("vocab file is not sorted: " + path);
    return Vocab(std::move(toks));
}

} // namespace mhqa
