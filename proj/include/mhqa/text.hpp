#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace mhqa {

// Lowercases, splits punctuation into separate tokens, splits on whitespace.
// Deterministic; empty input yields an empty sequence.
std::vector<std::string> tokenize(const std::string& text);

// Inverse-ish of tokenize for display and prompt assembly.
std::string join_tokens(const std::vector<std::string>& tokens);

// Closed token vocabulary. Ids are assigned by sorted token order so the
// mapping depends only on the token set, not on insertion order.
class Vocab {
public:
    Vocab() = default;
    explicit Vocab(std::vector<std::string> sorted_tokens);

    static Vocab from_tokens(const std::vector<std::string>& tokens);

    // Throws std::out_of_range naming the token if it is unknown.
    int id(const std::string& token) const;
    bool contains(const std::string& token) const;
    const std::string& token(int id) const;
    int size() const { return static_cast<int>(tokens_.size()); }

    std::vector<int> ids(const std::vector<std::string>& tokens) const;

    const std::vector<std::string>& tokens() const { return tokens_; }

    // Stable content hash, recorded in checkpoints to catch mismatched vocabs.
    std::uint64_t hash() const;

    void save(const std::string& path) const;
    static Vocab load(const std::string& path);

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> index_;
};

} // namespace mhqa
