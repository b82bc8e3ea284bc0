#include "ptsfd/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ptsfd::mechanism {

namespace {

void check_vote_range(Vote v, std::uint32_t n_classes, std::size_t worker, std::size_t sample) {
    if (!v.is_abstain() && v.value() >= n_classes)
        throw ValidationError("vote out of class range at worker " + std::to_string(worker) +
                              ", sample " + std::to_string(sample));
}

LabelCount sum_counts(std::span<const LabelCount> counts, std::uint32_t n_classes) {
    LabelCount g(n_classes, 0);
    for (const auto& lc : counts)
        for (std::uint32_t c = 0; c < n_classes; ++c) g[c] += lc[c];
    return g;
}

// Majority class among votes tallied into cnt, lowest index on ties.
ClassLabel argmax_count(std::span<const std::uint32_t> cnt) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < cnt.size(); ++c)
        if (cnt[c] > cnt[best]) best = c;
    return static_cast<ClassLabel>(best);
}

}  // namespace

ClassLabel quantize_1bit(const SoftPrediction& soft) {
    if (soft.empty() || soft.size() > kMaxClasses)
        throw ValidationError("soft prediction has invalid length");
    double total = 0.0;
    for (double s : soft) {
        if (s < 0.0 || !std::isfinite(s))
            throw ValidationError("soft prediction has negative or non-finite entry");
        total += s;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw ValidationError("soft prediction does not sum to 1");
    std::size_t best = 0;
    for (std::size_t c = 1; c < soft.size(); ++c)
        if (soft[c] > soft[best]) best = c;
    return static_cast<ClassLabel>(best);
}

LabelCount label_count(std::span<const Vote> votes, std::uint32_t n_classes) {
    LabelCount counts(n_classes, 0);
    for (std::size_t j = 0; j < votes.size(); ++j) {
        const Vote v = votes[j];
        if (v.is_abstain()) continue;
        if (v.value() >= n_classes)
            throw ValidationError("vote class " + std::to_string(v.value()) +
                                  " out of range at sample " + std::to_string(j));
        ++counts[v.value()];
    }
    return counts;
}

PeerDensity peer_density_excluding(const LabelCount& global_count, const LabelCount& own_count) {
    if (global_count.size() != own_count.size())
        throw ValidationError("label count dimension mismatch");
    std::uint64_t total = 0;
    PeerDensity density(global_count.size(), 0.0);
    for (std::size_t c = 0; c < global_count.size(); ++c) {
        if (own_count[c] > global_count[c])
            throw ValidationError("own count exceeds global count for class " + std::to_string(c));
        total += global_count[c] - own_count[c];
    }
    if (total == 0)
        throw DegeneratePeerSetError("all peers abstained everywhere; excluded density undefined");
    for (std::size_t c = 0; c < global_count.size(); ++c)
        density[c] = static_cast<double>(global_count[c] - own_count[c]) / static_cast<double>(total);
    return density;
}

double tau0(ClassLabel own, ClassLabel peer, const PeerDensity& r_excl) {
    if (own >= r_excl.size() || peer >= r_excl.size())
        throw ValidationError("tau0: label outside density support");
    if (own != peer) return 0.0;
    if (!(r_excl[own] > 0.0))
        throw Error(ErrorCategory::degenerate,
                    "tau0: matched class has zero excluded density (internal invariant)");
    return 1.0 / r_excl[own];
}

double reward_sample(std::size_t worker, std::size_t sample, const VoteMatrix& votes,
                     std::span<const PeerDensity> densities, const MechanismParams& params) {
    params.validate();
    const Vote own = votes.at(worker, sample);
    if (own.is_abstain())
        throw ValidationError("reward_sample: worker " + std::to_string(worker) +
                              " did not vote on sample " + std::to_string(sample));
    double tau0_sum = 0.0;
    std::size_t n_peers = 0;
    for (std::size_t p = 0; p < votes.n_workers(); ++p) {
        if (p == worker) continue;
        const Vote pv = votes.at(p, sample);
        if (pv.is_abstain()) continue;
        ++n_peers;
        tau0_sum += tau0(own.value(), pv.value(), densities[worker]);
    }
    if (n_peers == 0) return 0.0;  // isolated sample: no peer, no reward, no penalty
    return params.lambda * (tau0_sum / static_cast<double>(n_peers) - params.beta);
}

RewardReport ptsfd(const VoteMatrix& votes, std::span<const LabelCount> label_counts,
                   const MechanismParams& params, bool keep_traces) {
    params.validate();
    const std::size_t n = votes.n_workers();
    const std::size_t m = votes.m_samples();
    const std::uint32_t k = params.n_classes;
    if (label_counts.size() != n) throw ValidationError("label_counts size != n_workers");

    for (std::size_t i = 0; i < n; ++i) {
        if (label_counts[i].size() != k)
            throw ValidationError("label_counts[" + std::to_string(i) + "] has wrong class count");
        const LabelCount recomputed = label_count(votes.row(i), k);
        if (recomputed != label_counts[i])
            throw CountMismatchError(i, "labelCount of worker " + std::to_string(i) +
                                            " does not match its votes");
    }

    const LabelCount global = sum_counts(label_counts, k);
    std::uint64_t global_total = 0;
    for (std::uint32_t c = 0; c < k; ++c) global_total += global[c];

    // Excluded densities are evaluated lazily: a worker needs R_i only on
    // samples where it has at least one voting peer, and any such peer
    // guarantees a nonzero excluded total.
    std::vector<PeerDensity> densities(n);
    std::vector<char> density_ready(n, 0);
    auto density_of = [&](std::size_t i) -> const PeerDensity& {
        if (!density_ready[i]) {
            densities[i] = peer_density_excluding(global, label_counts[i]);
            density_ready[i] = 1;
        }
        return densities[i];
    };

    RewardReport report;
    report.reward_scores.assign(n, 0.0);
    report.aggregated.assign(m, Vote::abstain());
    if (keep_traces)
        report.per_sample.emplace(n, std::vector<double>(m, 0.0));

    std::vector<std::uint32_t> tally(k);
    std::vector<std::size_t> voters;
    voters.reserve(n);

    for (std::size_t j = 0; j < m; ++j) {
        std::fill(tally.begin(), tally.end(), 0);
        voters.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const Vote v = votes.at(i, j);
            if (v.is_abstain()) continue;
            check_vote_range(v, k, i, j);
            ++tally[v.value()];
            voters.push_back(i);
        }
        if (voters.empty()) continue;  // aggregated[j] stays abstain

        report.aggregated[j] = Vote::label(argmax_count(tally));

        const std::size_t n_peers = voters.size() - 1;
        if (n_peers == 0) continue;  // isolated votes earn nothing

        for (std::size_t i : voters) {
            const ClassLabel x = votes.at(i, j).value();
            const PeerDensity& r = density_of(i);
            // matches = peers voting x; tau0 is 1/R_i(x) for each of them
            const std::uint32_t matches = tally[x] - 1;
            double tau0_sum = 0.0;
            if (matches > 0) {
                if (!(r[x] > 0.0))
                    throw Error(ErrorCategory::degenerate,
                                "matched class has zero excluded density (internal invariant)");
                tau0_sum = static_cast<double>(matches) / r[x];
            }
            const double tau = params.lambda *
                               (tau0_sum / static_cast<double>(n_peers) - params.beta);
            report.reward_scores[i] += tau;
            if (keep_traces) (*report.per_sample)[i][j] = tau;
            report.peer_comparisons += n_peers;
        }
    }
    return report;
}

FixedRewardReport ptsfd_fixed(const VoteMatrix& votes, std::span<const LabelCount> label_counts,
                              const MechanismParams& params) {
    params.validate();
    const std::size_t n = votes.n_workers();
    const std::size_t m = votes.m_samples();
    const std::uint32_t k = params.n_classes;
    if (label_counts.size() != n) throw ValidationError("label_counts size != n_workers");

    for (std::size_t i = 0; i < n; ++i) {
        const LabelCount recomputed = label_count(votes.row(i), k);
        if (recomputed != label_counts[i])
            throw CountMismatchError(i, "labelCount of worker " + std::to_string(i) +
                                            " does not match its votes");
    }

    const std::int64_t lambda_micro = std::llround(params.lambda * kFixedScale);
    const std::int64_t beta_micro = std::llround(params.beta * kFixedScale);

    const LabelCount global = sum_counts(label_counts, k);

    // excluded[i][c] and excluded totals, all integers
    std::vector<std::vector<std::int64_t>> excluded(n, std::vector<std::int64_t>(k));
    std::vector<std::int64_t> excluded_total(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::uint32_t c = 0; c < k; ++c) {
            excluded[i][c] = static_cast<std::int64_t>(global[c]) - label_counts[i][c];
            excluded_total[i] += excluded[i][c];
        }

    FixedRewardReport report;
    report.score_micros.assign(n, 0);
    report.aggregated.assign(m, Vote::abstain());

    auto div_round = [](std::int64_t num, std::int64_t den) -> std::int64_t {
        // round half away from zero; num may be negative, den > 0
        if (num >= 0) return (num + den / 2) / den;
        return -((-num + den / 2) / den);
    };

    std::vector<std::uint32_t> tally(k);
    std::vector<std::size_t> voters;
    voters.reserve(n);

    for (std::size_t j = 0; j < m; ++j) {
        std::fill(tally.begin(), tally.end(), 0);
        voters.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const Vote v = votes.at(i, j);
            if (v.is_abstain()) continue;
            check_vote_range(v, k, i, j);
            ++tally[v.value()];
            voters.push_back(i);
        }
        if (voters.empty()) continue;
        report.aggregated[j] = Vote::label(argmax_count(tally));

        const std::int64_t n_peers = static_cast<std::int64_t>(voters.size()) - 1;
        if (n_peers == 0) continue;

        for (std::size_t i : voters) {
            const ClassLabel x = votes.at(i, j).value();
            const std::int64_t matches = static_cast<std::int64_t>(tally[x]) - 1;
            std::int64_t tau0_sum_micro = 0;
            if (matches > 0) {
                // tau0 = 1/R_i(x) = excluded_total / excluded[x]
                const std::int64_t den = excluded[i][x];
                tau0_sum_micro = matches * div_round(excluded_total[i] * kFixedScale, den);
            }
            const std::int64_t inner = div_round(tau0_sum_micro, n_peers) - beta_micro;
            const __int128 scaled = static_cast<__int128>(lambda_micro) * inner;
            report.score_micros[i] += static_cast<std::int64_t>(
                scaled >= 0 ? (scaled + kFixedScale / 2) / kFixedScale
                            : -((-scaled + kFixedScale / 2) / kFixedScale));
            report.peer_comparisons += static_cast<std::uint64_t>(n_peers);
        }
    }
    return report;
}

std::vector<ClassLabel> majority_vote(const VoteMatrix& votes) {
    const std::size_t n = votes.n_workers();
    const std::size_t m = votes.m_samples();
    std::uint32_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const Vote v = votes.at(i, j);
            if (!v.is_abstain()) k = std::max(k, static_cast<std::uint32_t>(v.value()) + 1);
        }

    std::vector<ClassLabel> out(m, 0);
    std::vector<std::uint32_t> tally(std::max<std::uint32_t>(k, 1));
    for (std::size_t j = 0; j < m; ++j) {
        std::fill(tally.begin(), tally.end(), 0);
        std::size_t votes_cast = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const Vote v = votes.at(i, j);
            if (v.is_abstain()) continue;
            ++tally[v.value()];
            ++votes_cast;
        }
        if (votes_cast == 0)
            throw UnvotedSampleError(j, "sample " + std::to_string(j) + " received no votes");
        out[j] = argmax_count(tally);
    }
    return out;
}

}  // namespace ptsfd::mechanism
