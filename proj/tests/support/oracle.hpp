#pragma once

// Test-only reference implementations. These follow the reward definition
// as a literal triple loop over (worker, sample, peer) with no shared
// tallies, so they stay independent of the production evaluation path.

#include <cstdint>
#include <optional>
#include <vector>

#include "ptsfd/rng.hpp"
#include "ptsfd/types.hpp"

namespace oracle {

using ptsfd::ClassLabel;
using ptsfd::LabelCount;
using ptsfd::MechanismParams;
using ptsfd::Vote;
using ptsfd::VoteMatrix;

struct Result {
    std::vector<double> reward_scores;
    std::vector<std::vector<double>> per_sample;
    std::vector<Vote> aggregated;
    std::uint64_t peer_comparisons = 0;
};

inline LabelCount naive_label_count(std::span<const Vote> votes, std::uint32_t n_classes) {
    LabelCount counts(n_classes, 0);
    for (const Vote v : votes)
        if (!v.is_abstain()) ++counts[v.value()];
    return counts;
}

inline Result naive_ptsfd(const VoteMatrix& votes, const MechanismParams& params) {
    const std::size_t n = votes.n_workers();
    const std::size_t m = votes.m_samples();
    const std::uint32_t k = params.n_classes;

    std::vector<LabelCount> counts(n);
    for (std::size_t i = 0; i < n; ++i) counts[i] = naive_label_count(votes.row(i), k);
    LabelCount global(k, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::uint32_t c = 0; c < k; ++c) global[c] += counts[i][c];

    Result res;
    res.reward_scores.assign(n, 0.0);
    res.per_sample.assign(n, std::vector<double>(m, 0.0));
    res.aggregated.assign(m, Vote::abstain());

    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            if (votes.at(i, j).is_abstain()) continue;

            // excluded density of worker i, evaluated from scratch
            double excluded_total = 0.0;
            for (std::uint32_t c = 0; c < k; ++c)
                excluded_total += static_cast<double>(global[c] - counts[i][c]);

            double tau0_sum = 0.0;
            std::size_t n_peers = 0;
            for (std::size_t p = 0; p < n; ++p) {
                if (p == i || votes.at(p, j).is_abstain()) continue;
                ++n_peers;
                ++res.peer_comparisons;
                if (votes.at(p, j) == votes.at(i, j)) {
                    const double r =
                        static_cast<double>(global[votes.at(i, j).value()] -
                                            counts[i][votes.at(i, j).value()]) /
                        excluded_total;
                    tau0_sum += 1.0 / r;
                }
            }
            if (n_peers == 0) continue;
            const double tau =
                params.lambda * (tau0_sum / static_cast<double>(n_peers) - params.beta);
            res.per_sample[i][j] = tau;
            res.reward_scores[i] += tau;
        }

        // count-and-argmax aggregation, ties to the lowest class
        std::vector<std::uint32_t> tally(k, 0);
        bool any = false;
        for (std::size_t i = 0; i < n; ++i)
            if (!votes.at(i, j).is_abstain()) {
                ++tally[votes.at(i, j).value()];
                any = true;
            }
        if (any) {
            std::size_t best = 0;
            for (std::size_t c = 1; c < k; ++c)
                if (tally[c] > tally[best]) best = c;
            res.aggregated[j] = Vote::label(static_cast<ClassLabel>(best));
        }
    }
    return res;
}

// Random instance with abstentions; guarantees at least one vote overall.
inline VoteMatrix random_instance(ptsfd::Rng& rng, std::size_t max_n, std::size_t max_m,
                                  std::uint32_t max_classes, double abstain_prob,
                                  std::uint32_t* n_classes_out) {
    const std::size_t n = 2 + rng.uniform_below(max_n - 1);
    const std::size_t m = 1 + rng.uniform_below(max_m);
    const std::uint32_t k =
        2 + static_cast<std::uint32_t>(rng.uniform_below(max_classes - 1));
    *n_classes_out = k;
    for (;;) {
        VoteMatrix votes(n, m);
        bool any = false;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                if (rng.next_double() < abstain_prob) continue;
                votes.set(i, j, Vote::label(static_cast<ClassLabel>(rng.uniform_below(k))));
                any = true;
            }
        if (any) return votes;
    }
}

}  // namespace oracle
