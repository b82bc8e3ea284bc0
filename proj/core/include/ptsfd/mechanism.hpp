#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ptsfd/types.hpp"

namespace ptsfd::mechanism {

// Output of the combined reward + aggregation pass.
//
// aggregated[j] is the majority class of sample j, with Vote::abstain()
// marking samples on which nobody voted (possible under confidence
// thresholding; the standalone majority_vote() treats those as errors).
struct RewardReport {
    std::vector<double> reward_scores;                            // tau-bar per worker
    std::optional<std::vector<std::vector<double>>> per_sample;   // tau_ij traces
    std::vector<Vote> aggregated;
    std::uint64_t peer_comparisons = 0;  // pairwise peer evaluations performed
};

// Integer twin of RewardReport: scores in micro-units (1e-6), computed
// entirely in integer arithmetic for ledger-grade determinism.
struct FixedRewardReport {
    std::vector<std::int64_t> score_micros;
    std::vector<Vote> aggregated;
    std::uint64_t peer_comparisons = 0;
};

inline constexpr std::int64_t kFixedScale = 1'000'000;

// Argmax class of a soft prediction; ties break to the lowest class index.
ClassLabel quantize_1bit(const SoftPrediction& soft);

// Per-class occurrence counts of a vote row; abstentions are skipped.
LabelCount label_count(std::span<const Vote> votes, std::uint32_t n_classes);

// R_i: the class density of all votes except worker i's own, normalized by
// the exact excluded total. Throws DegeneratePeerSetError when every peer
// abstained everywhere.
PeerDensity peer_density_excluding(const LabelCount& global_count, const LabelCount& own_count);

// Peer-consistency kernel: 1/R_i(own) on a match, 0 otherwise.
double tau0(ClassLabel own, ClassLabel peer, const PeerDensity& r_excl);

// Reward of `worker` on `sample`: lambda * (mean tau0 over voting peers - beta).
// Returns 0 when the worker voted but no peer did (isolated sample).
double reward_sample(std::size_t worker, std::size_t sample, const VoteMatrix& votes,
                     std::span<const PeerDensity> densities, const MechanismParams& params);

// Full reward + aggregation pass over a revealed vote matrix.
// label_counts are revalidated against the votes; a mismatch throws
// CountMismatchError naming the worker (the slashable offense).
RewardReport ptsfd(const VoteMatrix& votes, std::span<const LabelCount> label_counts,
                   const MechanismParams& params, bool keep_traces = false);

// Same contract as ptsfd(), evaluated in scaled-integer arithmetic.
FixedRewardReport ptsfd_fixed(const VoteMatrix& votes, std::span<const LabelCount> label_counts,
                              const MechanismParams& params);

// Per-sample majority class; ties break to the lowest class index.
// Throws UnvotedSampleError if any sample has zero votes.
std::vector<ClassLabel> majority_vote(const VoteMatrix& votes);

}  // namespace ptsfd::mechanism
