#include <benchmark/benchmark.h>

#include "ptsfd/mechanism.hpp"
#include "ptsfd/rng.hpp"

using namespace ptsfd;

namespace {

VoteMatrix full_votes(std::size_t n, std::size_t m, std::uint32_t k, std::uint64_t seed) {
    Rng rng(seed);
    VoteMatrix votes(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            votes.set(i, j, Vote::label(static_cast<ClassLabel>(rng.uniform_below(k))));
    return votes;
}

VoteMatrix paired_votes(std::size_t n, std::size_t m, std::uint32_t k, std::uint64_t seed) {
    Rng rng(seed);
    VoteMatrix votes(n, m);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t a = rng.uniform_below(n);
        std::size_t b = rng.uniform_below(n);
        while (b == a) b = rng.uniform_below(n);
        votes.set(a, j, Vote::label(static_cast<ClassLabel>(rng.uniform_below(k))));
        votes.set(b, j, Vote::label(static_cast<ClassLabel>(rng.uniform_below(k))));
    }
    return votes;
}

std::vector<LabelCount> counts_of(const VoteMatrix& votes, std::uint32_t k) {
    std::vector<LabelCount> counts;
    for (std::size_t i = 0; i < votes.n_workers(); ++i)
        counts.push_back(mechanism::label_count(votes.row(i), k));
    return counts;
}

}  // namespace

static void BM_PtsfdFull(benchmark::State& state) {
    const std::size_t m = static_cast<std::size_t>(state.range(0));
    const std::uint32_t k = 10;
    const auto votes = full_votes(10, m, k, 42);
    const auto counts = counts_of(votes, k);
    MechanismParams params{1.0, 1.0, k};
    for (auto _ : state)
        benchmark::DoNotOptimize(mechanism::ptsfd(votes, counts, params));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m));
}
BENCHMARK(BM_PtsfdFull)->Arg(1000)->Arg(10000)->Arg(40000);

static void BM_PtsfdKPeers2(benchmark::State& state) {
    const std::size_t m = static_cast<std::size_t>(state.range(0));
    const std::uint32_t k = 10;
    const auto votes = paired_votes(10, m, k, 42);
    const auto counts = counts_of(votes, k);
    MechanismParams params{1.0, 1.0, k};
    for (auto _ : state)
        benchmark::DoNotOptimize(mechanism::ptsfd(votes, counts, params));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m));
}
BENCHMARK(BM_PtsfdKPeers2)->Arg(10000)->Arg(40000);

static void BM_PtsfdFixedPoint(benchmark::State& state) {
    const std::size_t m = static_cast<std::size_t>(state.range(0));
    const std::uint32_t k = 10;
    const auto votes = full_votes(10, m, k, 42);
    const auto counts = counts_of(votes, k);
    MechanismParams params{1.0, 1.0, k};
    for (auto _ : state)
        benchmark::DoNotOptimize(mechanism::ptsfd_fixed(votes, counts, params));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m));
}
BENCHMARK(BM_PtsfdFixedPoint)->Arg(10000);

static void BM_MajorityVote(benchmark::State& state) {
    const std::size_t m = static_cast<std::size_t>(state.range(0));
    const auto votes = full_votes(10, m, 10, 7);
    for (auto _ : state) benchmark::DoNotOptimize(mechanism::majority_vote(votes));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m));
}
BENCHMARK(BM_MajorityVote)->Arg(10000)->Arg(40000);
