#include <benchmark/benchmark.h>

#include "ptsfd/encoding.hpp"
#include "ptsfd/ledger.hpp"
#include "ptsfd/rng.hpp"
#include "ptsfd/sha3.hpp"

using namespace ptsfd;

namespace {

std::vector<Vote> random_row(std::size_t m, std::uint32_t k, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vote> votes(m);
    for (auto& v : votes) v = Vote::label(static_cast<ClassLabel>(rng.uniform_below(k)));
    return votes;
}

}  // namespace

static void BM_Sha3Throughput(benchmark::State& state) {
    std::vector<std::uint8_t> data(static_cast<std::size_t>(state.range(0)));
    Rng rng(1);
    for (auto& b : data) b = static_cast<std::uint8_t>(rng.uniform_below(256));
    for (auto _ : state) benchmark::DoNotOptimize(crypto::Sha3_256::hash(data));
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sha3Throughput)->Arg(1024)->Arg(80 * 1024)->Arg(1024 * 1024);

static void BM_CommitmentHash(benchmark::State& state) {
    const std::size_t m = static_cast<std::size_t>(state.range(0));
    const auto votes = random_row(m, 10, 3);
    const auto counts = mechanism::label_count(votes, 10);
    ledger::Salt salt;
    salt.fill(0x5A);
    for (auto _ : state)
        benchmark::DoNotOptimize(ledger::commitment_hash(votes, counts, salt));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m));
}
BENCHMARK(BM_CommitmentHash)->Arg(10000)->Arg(40000);

static void BM_FullRound(benchmark::State& state) {
    const std::size_t n = 10;
    const std::size_t m = static_cast<std::size_t>(state.range(0));
    const std::uint32_t k = 10;

    std::vector<std::vector<Vote>> rows;
    std::vector<LabelCount> counts;
    std::vector<ledger::Salt> salts;
    for (std::size_t i = 0; i < n; ++i) {
        rows.push_back(random_row(m, k, 100 + i));
        counts.push_back(mechanism::label_count(rows[i], k));
        ledger::Salt salt;
        salt.fill(static_cast<std::uint8_t>(i));
        salts.push_back(salt);
    }

    for (auto _ : state) {
        ledger::LedgerConfig cfg;
        for (std::size_t i = 0; i < n; ++i) cfg.roster.insert("w" + std::to_string(i));
        cfg.required_deposit = 100;
        cfg.t_max_commit = 8;
        cfg.t_max_reveal = 16;
        cfg.m_samples = m;
        cfg.n_classes = k;
        ledger::Ledger contract(cfg);
        for (std::size_t i = 0; i < n; ++i)
            contract.register_worker("w" + std::to_string(i), 100);
        contract.open_commit();
        for (std::size_t i = 0; i < n; ++i)
            contract.commit("w" + std::to_string(i),
                            ledger::commitment_hash(rows[i], counts[i], salts[i]));
        for (std::size_t i = 0; i < n; ++i)
            contract.reveal("w" + std::to_string(i), rows[i], counts[i], salts[i]);
        benchmark::DoNotOptimize(contract.finalize(MechanismParams{1.0, 1.0, k}));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m));
}
BENCHMARK(BM_FullRound)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
