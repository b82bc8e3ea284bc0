#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ptsfd/agents.hpp"
#include "ptsfd/analysis.hpp"
#include "ptsfd/datagen.hpp"
#include "ptsfd/ledger.hpp"
#include "ptsfd/mechanism.hpp"
#include "ptsfd/types.hpp"

namespace ptsfd::harness {

// Per-worker slice of a scenario. A worker is either given a target
// accuracy directly (symmetric classifier) or a classifier built from its
// Dirichlet-partitioned local data and effort.
struct WorkerSpec {
    agents::StrategyKind strategy = agents::StrategyKind::Honest;
    double effort = 1.0;
    std::optional<double> accuracy;
    agents::ThresholdMode threshold_mode = agents::ThresholdMode::None;
    double fixed_threshold = 0.0;
    std::vector<ClassLabel> report_map;  // strategic; empty = collusion map
    std::int64_t deposit = -1;           // -1 = scenario default
    bool withhold_reveal = false;        // commit, then never reveal
    bool falsify_counts = false;         // commit and reveal a wrong labelCount
};

struct Scenario {
    std::size_t n_workers = 10;
    std::size_t m_samples = 1000;
    std::uint32_t n_classes = 10;
    double alpha = 100.0;
    double lambda = 1.0;
    double beta = 1.0;
    datagen::AssignmentMode assignment_mode = datagen::AssignmentMode::Full;
    std::size_t assignment_k = 2;
    std::vector<double> public_prior;   // empty = uniform
    std::vector<double> private_prior;  // empty = uniform
    std::uint64_t private_samples_per_worker = 1000;
    std::uint64_t seed = 1;
    std::size_t rounds = 1;
    std::vector<double> lambda_schedule;  // empty = lambda for every round
    std::int64_t deposit = 100;
    double settlement_scale = 1.0;
    std::uint64_t t_max_commit = 64;
    std::uint64_t t_max_reveal = 128;
    agents::NoiseParams noise;
    double cost_low = 0.0;
    double cost_high = 0.0;
    double cost_fixed = 0.0;
    std::vector<WorkerSpec> workers;  // normalized to n_workers entries

    MechanismParams params() const { return {lambda, beta, n_classes}; }
    datagen::ClassPrior public_prior_or_uniform() const;
    datagen::ClassPrior private_prior_or_uniform() const;
    double round_lambda(std::size_t round) const;

    void validate() const;

    // Normalized sorted key=value rendering; its SHA3-256 is the digest
    // stamped into every output.
    std::string canonical_form() const;
    std::string digest() const;

    static Scenario parse(const std::string& text);
    static Scenario parse_file(const std::string& path);
};

struct WorkerOutcome {
    std::string address;
    std::string strategy;
    double reward_score = 0.0;  // 0 for workers excluded from the mechanism
    std::int64_t payout = 0;
    std::string status;
    std::uint64_t votes_cast = 0;
    double incurred_cost = 0.0;
};

struct RoundResult {
    double lambda_used = 0.0;
    std::vector<WorkerOutcome> workers;  // indexed by worker id
    ledger::SettlementReport settlement;
    VoteMatrix revealed_votes;                  // rows follow revealed_worker_ids
    std::vector<LabelCount> revealed_counts;
    std::vector<std::size_t> revealed_worker_ids;
    double aggregated_accuracy = 0.0;  // over samples that received votes
    std::uint64_t unvoted_samples = 0;
    std::vector<std::string> tx_log;
};

struct AnalysisCrossChecks {
    double expected_heuristic_per_sample = 0.0;
    double expected_strategic_per_sample = 0.0;
    std::uint64_t predicted_peer_comparisons = 0;  // sum_j V_j (V_j - 1)
    std::uint64_t measured_peer_comparisons = 0;
    bool comparisons_match = false;
};

struct RunResult {
    std::string scenario_digest;
    std::uint64_t seed = 0;
    std::uint32_t n_classes = 0;
    std::string manifest;
    std::vector<RoundResult> rounds;
    AnalysisCrossChecks checks;

    const RoundResult& final_round() const { return rounds.back(); }
};

RunResult run_scenario(const Scenario& scenario);

struct SweepSpec {
    Scenario base;
    std::string axis;
    std::vector<double> values;
    std::size_t replicates = 1;
};

struct SweepRow {
    double value = 0.0;
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    double mean_honest = 0.0;       // mean reward score of honest workers
    double mean_other = 0.0;        // mean reward score of non-honest workers
    double per_vote_honest = 0.0;   // mean per-vote reward
    double per_vote_other = 0.0;
    std::size_t n_honest = 0;
    std::size_t n_other = 0;
};

struct SweepSummaryRow {
    double value = 0.0;
    double mean_honest = 0.0;
    double se_honest = 0.0;
    double mean_other = 0.0;
    double se_other = 0.0;
};

// Returns a copy of the scenario with one axis value applied. Axes cover
// the numeric scenario fields plus collusion_ratio / heuristic_ratio,
// which convert the leading fraction of workers to that strategy.
Scenario apply_axis(const Scenario& base, const std::string& axis, double value);

// Runs every (value, replicate) pair; pairs execute in parallel on
// independent ledgers and streams. Replicate r uses seed base.seed + r.
std::vector<SweepRow> sweep(const SweepSpec& spec);

std::vector<SweepSummaryRow> summarize_sweep(const std::vector<SweepRow>& rows);

// ---- vote file interface -------------------------------------------------

struct VoteFile {
    VoteMatrix votes;
    std::vector<LabelCount> counts;  // recomputed from the votes
    std::uint32_t n_classes = 0;
};

// CSV with header `worker_id,sample_id,class`; abstain entries are omitted.
// A leading `# n=.. m=.. classes=..` comment pins the dimensions so that
// round-trips are exact even with trailing abstainers.
std::string export_votes_csv(const VoteMatrix& votes, std::uint32_t n_classes);
VoteFile parse_votes_csv(const std::string& text);
VoteFile ingest_votes(const std::string& path);

// CSV with header `worker_id,class,count`.
std::string export_counts_csv(std::span<const LabelCount> counts);
std::vector<LabelCount> parse_counts_csv(const std::string& text);

// Verifies claimed label counts against counts recomputed from votes;
// returns the indices of mismatching workers.
std::vector<std::size_t> count_mismatches(const VoteFile& votes,
                                          std::span<const LabelCount> claimed);

// ---- result emission -----------------------------------------------------

// Writes rewards.csv, aggregate.csv, summary.txt, votes.csv, counts.csv,
// manifest.txt and txlog.txt into out_dir. Re-emitting the same result
// produces byte-identical files.
void emit_results(const RunResult& result, const std::string& out_dir);

std::string render_rewards_csv(const RunResult& result);
std::string render_aggregate_csv(const RunResult& result);
std::string render_summary(const RunResult& result);

}  // namespace ptsfd::harness
