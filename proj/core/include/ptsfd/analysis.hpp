#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ptsfd/types.hpp"

namespace ptsfd::analysis {

// Worker w's belief about an honest peer: joint[x][y] = P_{p|w}(y|x), the
// probability a peer reports y given w's own evaluation x; marginal[y] =
// P_p(y), the unconditional peer report probability.
struct BeliefModel {
    std::vector<std::vector<double>> joint;
    std::vector<double> marginal;

    std::uint32_t n_classes() const { return static_cast<std::uint32_t>(joint.size()); }
    void validate() const;

    // Derives the marginal from the evaluation prior: P_p(y) = sum_x prior(x) joint[x][y].
    static BeliefModel from_prior(std::vector<std::vector<double>> joint,
                                  const std::vector<double>& eval_prior);
};

// Peer strategy q[z][y] = Q_{p|p}(y|z): probability a peer reports y when
// its own evaluation is z. Identity = honest peers.
struct PeerStrategyModel {
    std::vector<std::vector<double>> q;

    void validate() const;
    static PeerStrategyModel identity(std::uint32_t n_classes);
};

struct CostEstimate {
    std::uint64_t compute_ops = 0;
    std::uint64_t memory_cells = 0;
    std::uint64_t permanent_bits = 0;       // m * ceil(log2 |C|) + eta
    std::uint64_t eta = 0;                  // encoding overhead
    std::uint64_t paper_literal_bits = 0;   // n * |C| * 1bit + eta, reported for comparison
};

enum class CostMode { Full, KPeers2 };

// Condition verdicts. A tie in the defining inequality breaks the strict
// chain of the optimality proof, so it is reported as its own case.
enum class ConditionVerdict { Holds, Violated, ViolatedTie };

struct ConditionResult {
    ConditionVerdict verdict = ConditionVerdict::Holds;
    ClassLabel witness_x = 0;  // own evaluation of the violating pair
    ClassLabel witness_y = 0;  // the more profitable misreport

    bool holds() const { return verdict == ConditionVerdict::Holds; }
};

// Expected per-sample profit of an honest report with certainty A:
//   A * lambda * (1/R - beta) + (1-A) * lambda * (-beta) - c
double expected_profit_honest(double certainty, double r_of_report,
                              const MechanismParams& params, double cost);

// Minimum prediction quality for rational participation: R * (c/lambda + beta).
double min_certainty(double r_of_report, const MechanismParams& params, double cost);

// Expected per-sample profit of reporting from the known label frequencies
// without effort: lambda * (1 - beta), independent of R.
double expected_profit_heuristic(const MechanismParams& params);

// Expected per-sample profit of a pure misreport against honest peers:
// lambda * (-beta) - c.
double expected_profit_strategic(const MechanismParams& params, double cost);

// Collusion variant: two classes are merged, so matches pay against the
// merged density R(x) + R(y).
double expected_profit_collusion(double certainty, double r_x, double r_y,
                                 const MechanismParams& params, double cost);

// Self-predicting condition: joint(x|x)/marginal(x) > joint(y|x)/marginal(y)
// for all y != x, checked strictly with tolerance 1e-12.
ConditionResult check_self_predicting(const BeliefModel& belief);

// Expected reward lambda * (Q_{p|w}(y|x)/Q_p(y) - beta) for every
// (evaluation x, report y) pair, with peers playing `peer_strategy`.
// Under the self-predicting condition each row's maximum sits on the
// diagonal; rows are returned so callers can verify.
std::vector<std::vector<double>> honesty_optimality_gap(const BeliefModel& belief,
                                                        const PeerStrategyModel& peer_strategy,
                                                        const MechanismParams& params);

// True when every row of a gap matrix attains its maximum on the diagonal.
bool row_max_on_diagonal(const std::vector<std::vector<double>>& gap, double tolerance = 0.0);

CostEstimate estimate_costs(std::uint64_t m, std::uint64_t n, std::uint32_t n_classes,
                            CostMode mode, std::uint64_t eta = 0);

}  // namespace ptsfd::analysis
