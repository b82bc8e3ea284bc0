#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "belief_gen.hpp"
#include "ptsfd/analysis.hpp"
#include "ptsfd/mechanism.hpp"
#include "ptsfd/rng.hpp"
#include "stats.hpp"

using namespace ptsfd;
using namespace ptsfd::analysis;

TEST_CASE("expected honest profit, hand values") {
    MechanismParams unit{1.0, 1.0, 2};
    CHECK(expected_profit_honest(1.0, 1.0, unit, 0.0) == doctest::Approx(0.0));
    CHECK(expected_profit_honest(0.72, 0.1, unit, 0.0) == doctest::Approx(6.2));

    // the minimum-quality certainty is exactly the zero-profit point
    const double r = 0.25, cost = 0.5;
    MechanismParams params{2.0, 1.5, 2};
    const double threshold = min_certainty(r, params, cost);
    CHECK(expected_profit_honest(threshold, r, params, cost) ==
          doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS(expected_profit_honest(0.5, 0.0, unit, 0.0), UndefinedDensityError);
}

TEST_CASE("minimum certainty, hand values") {
    CHECK(min_certainty(0.1, {1.0, 1.0, 2}, 0.0) == doctest::Approx(0.1));
    CHECK(min_certainty(0.7, {1.0, 0.0, 2}, 0.0) == doctest::Approx(0.0));
    CHECK(min_certainty(0.5, {1.0, 1.0, 2}, 0.5) == doctest::Approx(0.75));
}

TEST_CASE("heuristic profit is lambda * (1 - beta)") {
    CHECK(expected_profit_heuristic({1.0, 1.0, 2}) == doctest::Approx(0.0));
    CHECK(expected_profit_heuristic({1.0, 2.0, 2}) == doctest::Approx(-1.0));
    CHECK(expected_profit_heuristic({3.0, 0.0, 2}) == doctest::Approx(3.0));
}

TEST_CASE("strategic and collusion profits") {
    CHECK(expected_profit_strategic({1.0, 1.0, 2}, 0.0) == doctest::Approx(-1.0));
    CHECK(expected_profit_strategic({1.0, 0.0, 2}, 0.0) == doctest::Approx(0.0));
    // merged density exactly offsets the doubled matching probability
    CHECK(expected_profit_collusion(1.0, 0.5, 0.5, {1.0, 1.0, 2}, 0.0) ==
          doctest::Approx(0.0));
}

TEST_CASE("self-predicting checker") {
    BeliefModel identity;
    identity.joint = {{1.0, 0.0}, {0.0, 1.0}};
    identity.marginal = {0.5, 0.5};
    CHECK(check_self_predicting(identity).holds());

    // skewed reports make misreporting the rare class more profitable
    BeliefModel skewed;
    skewed.joint = {{0.8, 0.2}, {0.2, 0.8}};
    skewed.marginal = {0.9, 0.1};
    const auto res = check_self_predicting(skewed);
    CHECK(res.verdict == ConditionVerdict::Violated);
    CHECK(res.witness_x == 0);
    CHECK(res.witness_y == 1);

    BeliefModel uninformative;
    uninformative.joint = {{0.5, 0.5}, {0.5, 0.5}};
    uninformative.marginal = {0.7, 0.3};
    CHECK_FALSE(check_self_predicting(uninformative).holds());

    // exact ties break the strict chain and are flagged as such
    BeliefModel tied;
    tied.joint = {{0.5, 0.5}, {0.5, 0.5}};
    tied.marginal = {0.5, 0.5};
    CHECK(check_self_predicting(tied).verdict == ConditionVerdict::ViolatedTie);

    BeliefModel degenerate;
    degenerate.joint = {{1.0, 0.0}, {1.0, 0.0}};
    degenerate.marginal = {1.0, 0.0};
    CHECK_THROWS_AS(check_self_predicting(degenerate), UndefinedDensityError);
}

TEST_CASE("verdict is invariant to row rescaling") {
    Rng rng(42);
    for (int t = 0; t < 20; ++t) {
        const auto belief = belief_gen::random_self_predicting_belief(rng, 4);
        BeliefModel rescaled = belief;
        for (auto& row : rescaled.joint) {
            double total = 0.0;
            for (double& v : row) {
                v *= 7.5;
                total += v;
            }
            for (double& v : row) v /= total;
        }
        CHECK(check_self_predicting(rescaled).holds() ==
              check_self_predicting(belief).holds());
    }
}

TEST_CASE("honest peers reduce the gap matrix to the honest-profit term") {
    Rng rng(7);
    MechanismParams params{1.0, 1.0, 3};
    const auto belief = belief_gen::random_self_predicting_belief(rng, 3);
    const auto gap =
        honesty_optimality_gap(belief, PeerStrategyModel::identity(3), params);
    for (std::size_t x = 0; x < 3; ++x)
        for (std::size_t y = 0; y < 3; ++y)
            CHECK(gap[x][y] == doctest::Approx(params.lambda *
                                               (belief.joint[x][y] / belief.marginal[y] -
                                                params.beta)));
    CHECK(row_max_on_diagonal(gap));
}

TEST_CASE("row max sits on the diagonal for random self-predicting beliefs") {
    Rng rng(99);
    for (int t = 0; t < 200; ++t) {
        const std::size_t k = 2 + rng.uniform_below(4);
        const auto belief = belief_gen::random_self_predicting_belief(rng, k);
        const auto gap = honesty_optimality_gap(
            belief, PeerStrategyModel::identity(static_cast<std::uint32_t>(k)),
            MechanismParams{1.0, 1.0, static_cast<std::uint32_t>(k)});
        CHECK(row_max_on_diagonal(gap, 1e-12));
    }
}

TEST_CASE("no peer strategy beats the honest-honest payoff") {
    // the appendix chain: reward under any peer strategy is bounded by the
    // honest-peers honest-report reward
    Rng rng(1234);
    MechanismParams params{1.0, 1.0, 4};
    for (int t = 0; t < 200; ++t) {
        const auto belief = belief_gen::random_self_predicting_belief(rng, 4);
        const auto strategy = belief_gen::random_arbitrary_strategy(rng, 4);
        std::vector<std::vector<double>> gap;
        try {
            gap = honesty_optimality_gap(belief, strategy, params);
        } catch (const UndefinedDensityError&) {
            continue;  // a report class nobody ever uses
        }
        for (std::size_t x = 0; x < 4; ++x) {
            const double honest_honest =
                params.lambda * (belief.joint[x][x] / belief.marginal[x] - params.beta);
            for (std::size_t y = 0; y < 4; ++y)
                CHECK(gap[x][y] <= honest_honest + 1e-9);
        }
    }
}

TEST_CASE("violated-condition belief moves the row max off the diagonal") {
    BeliefModel skewed;
    skewed.joint = {{0.8, 0.2}, {0.2, 0.8}};
    skewed.marginal = {0.9, 0.1};
    const auto gap = honesty_optimality_gap(skewed, PeerStrategyModel::identity(2),
                                            MechanismParams{1.0, 1.0, 2});
    // evaluating class 0, reporting class 1 pays 0.2/0.1 vs 0.8/0.9
    CHECK(gap[0][1] > gap[0][0]);
    CHECK_FALSE(row_max_on_diagonal(gap));
}

TEST_CASE("cost estimates, hand values") {
    const auto full = estimate_costs(40000, 10, 10, CostMode::Full);
    CHECK(full.compute_ops == 4'400'000);
    CHECK(full.memory_cells == 10 * 40002 + 10);
    CHECK(full.permanent_bits == 40000 * 4);  // ceil(log2 10) = 4
    CHECK(full.paper_literal_bits == 100);

    const auto kpeers = estimate_costs(40000, 10, 10, CostMode::KPeers2);
    CHECK(kpeers.compute_ops == 1'200'000);

    const auto tiny = estimate_costs(1, 1, 1, CostMode::Full);
    CHECK(tiny.compute_ops == 2);
    CHECK(tiny.permanent_bits == 0);  // a single class needs no bits

    const auto with_eta = estimate_costs(100, 2, 4, CostMode::Full, 64);
    CHECK(with_eta.permanent_bits == 200 + 64);
    CHECK(with_eta.eta == 64);
}

TEST_CASE("belief validation") {
    BeliefModel bad;
    bad.joint = {{0.9, 0.2}, {0.5, 0.5}};
    bad.marginal = {0.5, 0.5};
    CHECK_THROWS_AS(check_self_predicting(bad), ValidationError);

    CHECK_THROWS_AS(BeliefModel::from_prior({{1.0, 0.0}, {0.0, 1.0}}, {0.5}),
                    ValidationError);
}

TEST_CASE("formula-vs-simulation: heuristic and strategic against perfect peers") {
    Rng rng(2025);
    const std::size_t n = 6, m = 20000;
    const std::uint32_t k = 5;
    MechanismParams params{1.0, 1.5, k};
    const std::vector<double> uniform(k, 1.0 / k);
    std::vector<ClassLabel> truths(m);
    for (auto& t : truths) t = static_cast<ClassLabel>(rng.uniform_below(k));

    auto fill_honest = [&](VoteMatrix& votes) {
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t i = 1; i < n; ++i) votes.set(i, j, Vote::label(truths[j]));
    };
    auto counts_of = [&](const VoteMatrix& votes) {
        std::vector<LabelCount> counts;
        for (std::size_t i = 0; i < n; ++i)
            counts.push_back(mechanism::label_count(votes.row(i), k));
        return counts;
    };

    // heuristic worker among perfect honest voters, uniform prior:
    // mean per-sample reward ~= lambda (1 - beta), within 3 SE
    VoteMatrix heuristic_votes(n, m);
    fill_honest(heuristic_votes);
    for (std::size_t j = 0; j < m; ++j)
        heuristic_votes.set(
            0, j, Vote::label(static_cast<ClassLabel>(rng.sample_discrete(uniform))));
    const auto heuristic_report =
        mechanism::ptsfd(heuristic_votes, counts_of(heuristic_votes), params, true);
    const auto& heuristic_samples = (*heuristic_report.per_sample)[0];
    const double mu_h = stats::mean(heuristic_samples);
    const double se_h = stats::stderr_of_mean(heuristic_samples);
    CHECK(std::abs(mu_h - expected_profit_heuristic(params)) < 3.0 * se_h + 0.02);

    // pure misreporter whose report never coincides with its perfect peers:
    // exactly -lambda * beta per sample, zero variance
    VoteMatrix strategic_votes(n, m);
    fill_honest(strategic_votes);
    for (std::size_t j = 0; j < m; ++j)
        strategic_votes.set(0, j, Vote::label(static_cast<ClassLabel>((truths[j] + 1) % k)));
    const auto strategic_report =
        mechanism::ptsfd(strategic_votes, counts_of(strategic_votes), params, true);
    const double mu_s = stats::mean((*strategic_report.per_sample)[0]);
    CHECK(mu_s == doctest::Approx(expected_profit_strategic(params, 0.0)).epsilon(1e-6));
}

TEST_CASE("formula-vs-simulation: honest worker with symmetric accuracy") {
    Rng rng(77);
    const std::size_t n = 5, m = 20000;
    const std::uint32_t k = 4;
    MechanismParams params{1.0, 1.0, k};
    const double accuracy = 0.7;

    VoteMatrix votes(n, m);
    for (std::size_t j = 0; j < m; ++j) {
        const auto truth = static_cast<ClassLabel>(rng.uniform_below(k));
        // worker 0: symmetric confusion with the target accuracy
        ClassLabel mine = truth;
        if (rng.next_double() > accuracy) {
            ClassLabel other;
            do {
                other = static_cast<ClassLabel>(rng.uniform_below(k));
            } while (other == truth);
            mine = other;
        }
        votes.set(0, j, Vote::label(mine));
        for (std::size_t i = 1; i < n; ++i) votes.set(i, j, Vote::label(truth));
    }
    std::vector<LabelCount> counts;
    for (std::size_t i = 0; i < n; ++i)
        counts.push_back(mechanism::label_count(votes.row(i), k));
    const auto report = mechanism::ptsfd(votes, counts, params, true);

    const double expected =
        expected_profit_honest(accuracy, 1.0 / k, params, 0.0);
    const double mu = stats::mean((*report.per_sample)[0]);
    const double se = stats::stderr_of_mean((*report.per_sample)[0]);
    CHECK(std::abs(mu - expected) < 3.0 * se + 0.02);
}
