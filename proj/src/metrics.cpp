#include "mhqa/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace mhqa {

namespace {

template <typename T>
double set_f1(const std::set<T>& pred, const std::set<T>& gold) {
    if (pred.empty() && gold.empty()) return 1.0;
    if (pred.empty() || gold.empty()) return 0.0;
    std::size_t overlap = 0;
    for (const auto& x : pred) overlap += gold.count(x);
    if (overlap == 0) return 0.0;
    const double p = static_cast<double>(overlap) / static_cast<double>(pred.size());
    const double r = static_cast<double>(overlap) / static_cast<double>(gold.size());
    return 2.0 * p * r / (p + r);
}

bool is_punct_token(const std::string& t) {
    return t.size() == 1 && std::ispunct(static_cast<unsigned char>(t[0]));
}

std::vector<std::string> normalize_answer(const std::vector<std::string>& tokens) {
    std::vector<std::string> out;
    for (const auto& t : tokens) {
        if (is_punct_token(t)) continue;
        if (t == "a" || t == "an" || t == "the") continue;
        out.push_back(t);
    }
    return out;
}

} // namespace

double sentence_f1(const std::set<std::pair<int, int>>& pred,
                   const std::set<std::pair<int, int>>& gold) {
    return set_f1(pred, gold);
}

double document_f1(const std::set<int>& pred, const std::set<int>& gold) {
    return set_f1(pred, gold);
}

std::pair<double, int> answer_token_f1_em(const std::vector<std::string>& pred_tokens,
                                          const std::vector<std::string>& gold_tokens) {
    const auto pred = normalize_answer(pred_tokens);
    const auto gold = normalize_answer(gold_tokens);
    const int em = pred == gold ? 1 : 0;
    if (pred.empty() || gold.empty()) {
        return {pred == gold ? 1.0 : 0.0, em};
    }
    std::map<std::string, int> counts;
    for (const auto& t : gold) ++counts[t];
    int overlap = 0;
    for (const auto& t : pred) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    if (overlap == 0) return {0.0, em};
    const double p = static_cast<double>(overlap) / static_cast<double>(pred.size());
    const double r = static_cast<double>(overlap) / static_cast<double>(gold.size());
    return {2.0 * p * r / (p + r), em};
}

} // namespace mhqa
