#include "mhqa/subsets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>

namespace mhqa {

void SubsetSpace::validate() const {
    if (universe_size < 1) throw std::invalid_argument("SubsetSpace: universe_size must be >= 1");
    if (!(1 <= min_size && min_size <= max_size && max_size <= universe_size)) {
        throw std::invalid_argument("SubsetSpace: need 1 <= min_size <= max_size <= universe_size");
    }
}

static std::size_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::size_t r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
    }
    return r;
}

std::size_t SubsetSpace::count() const {
    validate();
    std::size_t total = 0;
    for (int s = min_size; s <= max_size; ++s) {
        total += contiguous_only ? static_cast<std::size_t>(universe_size - s + 1)
                                 : binomial(universe_size, s);
    }
    return total;
}

bool subset_lex_less(const Subset& a, const Subset& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

bool subset_canonical_less(const Subset& a, const Subset& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return subset_lex_less(a, b);
}

std::vector<Subset> enumerate_subsets(const SubsetSpace& space) {
    space.validate();
    std::vector<Subset> out;
    out.reserve(space.count());
    for (int s = space.min_size; s <= space.max_size; ++s) {
        if (space.contiguous_only) {
            for (int start = 0; start + s <= space.universe_size; ++start) {
                Subset sub(static_cast<std::size_t>(s));
                for (int j = 0; j < s; ++j) sub[static_cast<std::size_t>(j)] = start + j;
                out.push_back(std::move(sub));
            }
        } else {
            // combinations in lexicographic order
            Subset sub(static_cast<std::size_t>(s));
            for (int j = 0; j < s; ++j) sub[static_cast<std::size_t>(j)] = j;
            while (true) {
                out.push_back(sub);
                int i = s - 1;
                while (i >= 0 && sub[static_cast<std::size_t>(i)] == space.universe_size - s + i) --i;
                if (i < 0) break;
                ++sub[static_cast<std::size_t>(i)];
                for (int j = i + 1; j < s; ++j) {
                    sub[static_cast<std::size_t>(j)] = sub[static_cast<std::size_t>(j - 1)] + 1;
                }
            }
        }
    }
    return out;
}

bool subset_valid(const SubsetSpace& space, const Subset& s) {
    space.validate();
    int sz = static_cast<int>(s.size());
    if (sz < space.min_size || sz > space.max_size) return false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] < 0 || s[i] >= space.universe_size) return false;
        if (i > 0 && s[i] <= s[i - 1]) return false;
        if (space.contiguous_only && i > 0 && s[i] != s[i - 1] + 1) return false;
    }
    return true;
}

double log_sum_exp(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("log_sum_exp: empty input");
    double m = -std::numeric_limits<double>::infinity();
    for (double v : values) m = std::max(m, v);
    if (std::isinf(m) && m < 0) return m; // all -inf
    double s = 0.0;
    for (double v : values) s += std::exp(v - m);
    return m + std::log(s);
}

std::vector<double> log_normalize(const std::vector<double>& scores) {
    if (scores.empty()) throw std::invalid_argument("log_normalize: empty input");
    for (double v : scores) {
        if (!std::isfinite(v)) throw std::invalid_argument("log_normalize: non-finite score");
    }
    const double lse = log_sum_exp(scores);
    std::vector<double> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] - lse;
    return out;
}

SetDistribution SetDistribution::from_scores(const SubsetSpace& space,
                                             std::vector<Subset> subsets,
                                             const std::vector<double>& scores) {
    if (subsets.size() != scores.size()) {
        throw std::invalid_argument("SetDistribution: subsets/scores length mismatch");
    }
    SetDistribution d;
    d.space = space;
    d.subsets = std::move(subsets);
    d.log_probs = log_normalize(scores);
    return d;
}

void SetDistribution::check() const {
    space.validate();
    if (subsets.size() != log_probs.size()) {
        throw std::runtime_error("SetDistribution: length mismatch");
    }
    if (subsets.empty()) throw std::runtime_error("SetDistribution: empty support");
    double total = 0.0;
    for (double lp : log_probs) total += std::exp(lp);
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::runtime_error("SetDistribution: probabilities sum to " + std::to_string(total));
    }
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        if (!subset_valid(space, subsets[i])) throw std::runtime_error("SetDistribution: invalid subset");
        if (i > 0 && !subset_canonical_less(subsets[i - 1], subsets[i])) {
            throw std::runtime_error("SetDistribution: subsets not in canonical order");
        }
    }
}

SubsetCandidates top_k(const SetDistribution& dist, std::size_t k) {
    if (k < 1) throw std::invalid_argument("top_k: k must be >= 1");
    std::vector<std::size_t> order(dist.subsets.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (dist.log_probs[a] != dist.log_probs[b]) return dist.log_probs[a] > dist.log_probs[b];
        return subset_lex_less(dist.subsets[a], dist.subsets[b]);
    });
    SubsetCandidates out;
    const std::size_t take = std::min(k, order.size());
    out.items.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        out.items.emplace_back(dist.subsets[order[i]], dist.log_probs[order[i]]);
    }
    return out;
}

namespace {

// Per-distribution ranking by (log_prob desc, subset lex asc); the k-best
// frontier walks rank vectors over these orders.
struct RankedDists {
    const std::vector<SetDistribution>* dists;
    std::vector<std::vector<std::size_t>> order;

    explicit RankedDists(const std::vector<SetDistribution>& ds) : dists(&ds) {
        order.resize(ds.size());
        for (std::size_t d = 0; d < ds.size(); ++d) {
            auto& ord = order[d];
            ord.resize(ds[d].subsets.size());
            for (std::size_t i = 0; i < ord.size(); ++i) ord[i] = i;
            const auto& dist = ds[d];
            std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) {
                if (dist.log_probs[a] != dist.log_probs[b]) return dist.log_probs[a] > dist.log_probs[b];
                return subset_lex_less(dist.subsets[a], dist.subsets[b]);
            });
        }
    }

    const Subset& subset_at(std::size_t d, std::size_t rank) const {
        return (*dists)[d].subsets[order[d][rank]];
    }
    double logp_at(std::size_t d, std::size_t rank) const {
        return (*dists)[d].log_probs[order[d][rank]];
    }
    // Left-to-right sum so results match brute_force_product bit for bit.
    double sum(const std::vector<std::size_t>& ranks) const {
        double s = 0.0;
        for (std::size_t d = 0; d < ranks.size(); ++d) s += logp_at(d, ranks[d]);
        return s;
    }
    // Pure lexicographic comparison on the materialized tuple of subsets.
    bool tuple_lex_less(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) const {
        for (std::size_t d = 0; d < a.size(); ++d) {
            const Subset& sa = subset_at(d, a[d]);
            const Subset& sb = subset_at(d, b[d]);
            if (sa != sb) return subset_lex_less(sa, sb);
        }
        return false;
    }
    std::vector<Subset> materialize(const std::vector<std::size_t>& ranks) const {
        std::vector<Subset> t;
        t.reserve(ranks.size());
        for (std::size_t d = 0; d < ranks.size(); ++d) t.push_back(subset_at(d, ranks[d]));
        return t;
    }
};

bool tuple_struct_less(const std::vector<Subset>& a, const std::vector<Subset>& b) {
    for (std::size_t d = 0; d < a.size(); ++d) {
        if (a[d] != b[d]) return subset_lex_less(a[d], b[d]);
    }
    return false;
}

} // namespace

TupleCandidates top_k_product(const std::vector<SetDistribution>& dists, std::size_t k) {
    if (k < 1) throw std::invalid_argument("top_k_product: k must be >= 1");
    if (dists.empty()) throw std::invalid_argument("top_k_product: no distributions");
    for (const auto& d : dists) {
        if (d.subsets.empty()) throw std::invalid_argument("top_k_product: empty distribution");
    }
    RankedDists ranked(dists);

    struct Node {
        std::vector<std::size_t> ranks;
        double sum;
    };
    auto worse = [&](const Node& a, const Node& b) {
        if (a.sum != b.sum) return a.sum < b.sum;
        return ranked.tuple_lex_less(b.ranks, a.ranks);
    };
    std::priority_queue<Node, std::vector<Node>, decltype(worse)> frontier(worse);
    std::set<std::vector<std::size_t>> seen;

    std::vector<std::size_t> root(dists.size(), 0);
    frontier.push(Node{root, ranked.sum(root)});
    seen.insert(root);

    TupleCandidates out;
    while (!frontier.empty() && out.items.size() < k) {
        Node best = frontier.top();
        frontier.pop();
        out.items.emplace_back(ranked.materialize(best.ranks), best.sum);
        for (std::size_t d = 0; d < dists.size(); ++d) {
            if (best.ranks[d] + 1 >= dists[d].subsets.size()) continue;
            std::vector<std::size_t> next = best.ranks;
            ++next[d];
            if (seen.insert(next).second) {
                double s = ranked.sum(next);
                frontier.push(Node{std::move(next), s});
            }
        }
    }
    return out;
}

TupleCandidates brute_force_product(const std::vector<SetDistribution>& dists, std::size_t k,
                                    std::size_t max_product) {
    if (k < 1) throw std::invalid_argument("brute_force_product: k must be >= 1");
    if (dists.empty()) throw std::invalid_argument("brute_force_product: no distributions");
    std::size_t product = 1;
    for (const auto& d : dists) {
        if (d.subsets.empty()) throw std::invalid_argument("brute_force_product: empty distribution");
        product *= d.subsets.size();
        if (product > max_product) {
            throw std::invalid_argument("brute_force_product: product size exceeds cap of " +
                                        std::to_string(max_product));
        }
    }
    std::vector<std::pair<std::vector<Subset>, double>> all;
    all.reserve(product);
    std::vector<std::size_t> idx(dists.size(), 0);
    while (true) {
        std::vector<Subset> tuple;
        tuple.reserve(dists.size());
        double sum = 0.0;
        for (std::size_t d = 0; d < dists.size(); ++d) {
            tuple.push_back(dists[d].subsets[idx[d]]);
            sum += dists[d].log_probs[idx[d]];
        }
        all.emplace_back(std::move(tuple), sum);
        bool done = false;
        std::size_t d = dists.size();
        while (true) {
            if (d == 0) {
                done = true;
                break;
            }
            --d;
            if (++idx[d] < dists[d].subsets.size()) break;
            idx[d] = 0;
        }
        if (done) break;
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return tuple_struct_less(a.first, b.first);
    });
    TupleCandidates out;
    const std::size_t take = std::min(k, all.size());
    out.items.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take));
    return out;
}

} // namespace mhqa
