#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

namespace mhqa {

// Set-overlap F1 = 2PR/(P+R). Both empty -> 1 (vacuous agreement); exactly
// one empty -> 0.
double sentence_f1(const std::set<std::pair<int, int>>& pred, const std::set<std::pair<int, int>>& gold);
double document_f1(const std::set<int>& pred, const std::set<int>& gold);

// Answer-span scoring over tokenized answers: drops punctuation tokens and
// the articles {a, an, the}, then bag-of-token overlap with multiplicity for
// F1 and normalized-equality for exact match.
std::pair<double, int> answer_token_f1_em(const std::vector<std::string>& pred_tokens,
                                          const std::vector<std::string>& gold_tokens);

} // namespace mhqa
