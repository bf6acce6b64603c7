#pragma once

#include <cstddef>
#include <vector>

namespace mhqa {

// Family of valid index subsets of {0..universe_size-1}: sizes in
// [min_size, max_size], optionally restricted to contiguous index runs.
struct SubsetSpace {
    int universe_size = 0;
    int min_size = 1;
    int max_size = 1;
    bool contiguous_only = false;

    void validate() const; // throws std::invalid_argument on bad bounds
    // Sum over sizes of C(n,s), or n-s+1 per size when contiguous.
    std::size_t count() const;
};

// Strictly increasing index list.
using Subset = std::vector<int>;

// True if a < b in pure lexicographic order on the index lists (a proper
// prefix precedes its extensions). Used for all tie-breaking.
bool subset_lex_less(const Subset& a, const Subset& b);

// Canonical storage order: ascending size, then lexicographic.
bool subset_canonical_less(const Subset& a, const Subset& b);

// Every valid subset exactly once, in canonical order.
std::vector<Subset> enumerate_subsets(const SubsetSpace& space);

bool subset_valid(const SubsetSpace& space, const Subset& s);

// log sum_i exp(values[i]) with max-subtraction; empty input is an error.
double log_sum_exp(const std::vector<double>& values);

// out[i] = scores[i] - log_sum_exp(scores); empty input is an error.
std::vector<double> log_normalize(const std::vector<double>& scores);

// Normalized distribution over the subsets of one space, stored in canonical
// order. exp(log_probs) sums to 1 within 1e-9.
struct SetDistribution {
    SubsetSpace space;
    std::vector<Subset> subsets;   // canonical order
    std::vector<double> log_probs; // aligned with subsets

    static SetDistribution from_scores(const SubsetSpace& space,
                                       std::vector<Subset> subsets,
                                       const std::vector<double>& scores);
    void check() const; // throws on violated invariants
};

// Ranked candidates: log_prob non-increasing, ties broken lexicographically
// on structure, no duplicates.
template <typename S>
struct CandidateList {
    std::vector<std::pair<S, double>> items;

    std::size_t size() const { return items.size(); }
    const std::pair<S, double>& operator[](std::size_t i) const { return items[i]; }
};

using SubsetCandidates = CandidateList<Subset>;
// One subset per distribution, in distribution order.
using TupleCandidates = CandidateList<std::vector<Subset>>;

// Best min(k, support) subsets of the distribution.
SubsetCandidates top_k(const SetDistribution& dist, std::size_t k);

// k best tuples (one subset per distribution) by summed log-prob, found by
// lazy best-first frontier expansion; the full product is never materialized.
TupleCandidates top_k_product(const std::vector<SetDistribution>& dists, std::size_t k);

// Exhaustive oracle with the same contract as top_k_product. Errors when the
// product size exceeds max_product (it exists for small instances).
TupleCandidates brute_force_product(const std::vector<SetDistribution>& dists, std::size_t k,
                                    std::size_t max_product = 1000000);

} // namespace mhqa
