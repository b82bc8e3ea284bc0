#pragma once

// Random generators for belief models and peer strategies used by the
// honesty-optimality checks.

#include <vector>

#include "ptsfd/analysis.hpp"
#include "ptsfd/rng.hpp"

namespace belief_gen {

using ptsfd::Rng;
using ptsfd::analysis::BeliefModel;
using ptsfd::analysis::PeerStrategyModel;

inline std::vector<double> random_stochastic_row(Rng& rng, std::size_t k, double floor = 0.01) {
    std::vector<double> alpha(k, 1.0);
    auto row = rng.dirichlet(alpha);
    double total = 0.0;
    for (double& v : row) {
        v += floor;
        total += v;
    }
    for (double& v : row) v /= total;
    return row;
}

// Diagonal-dominant joint: row x mixes a one-hot at x with a random
// stochastic remainder. Retries until the self-predicting condition holds.
inline BeliefModel random_self_predicting_belief(Rng& rng, std::size_t k) {
    for (;;) {
        std::vector<std::vector<double>> joint(k);
        for (std::size_t x = 0; x < k; ++x) {
            const double w = 0.5 + 0.45 * rng.next_double();
            auto rest = random_stochastic_row(rng, k);
            joint[x].assign(k, 0.0);
            for (std::size_t y = 0; y < k; ++y)
                joint[x][y] = (x == y ? w : 0.0) + (1.0 - w) * rest[y];
        }
        auto prior = random_stochastic_row(rng, k, 0.05);
        BeliefModel belief = BeliefModel::from_prior(joint, prior);
        if (ptsfd::analysis::check_self_predicting(belief).holds()) return belief;
    }
}

// Peers that report their evaluation most of the time.
inline PeerStrategyModel random_honest_leaning_strategy(Rng& rng, std::size_t k) {
    PeerStrategyModel model;
    model.q.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t z = 0; z < k; ++z) {
        const double w = 0.6 + 0.4 * rng.next_double();
        auto rest = random_stochastic_row(rng, k);
        for (std::size_t y = 0; y < k; ++y)
            model.q[z][y] = (z == y ? w : 0.0) + (1.0 - w) * rest[y];
    }
    return model;
}

inline PeerStrategyModel random_arbitrary_strategy(Rng& rng, std::size_t k) {
    PeerStrategyModel model;
    model.q.resize(k);
    for (std::size_t z = 0; z < k; ++z) model.q[z] = random_stochastic_row(rng, k);
    return model;
}

// Eq. 10 evaluated on the report space that the peer strategy induces:
// joint'(y|x) = sum_z q(y|z) joint(z|x), marginal'(y) = sum_z q(y|z) marginal(z).
inline BeliefModel induced_report_belief(const BeliefModel& belief,
                                         const PeerStrategyModel& strategy) {
    const std::size_t k = belief.joint.size();
    BeliefModel induced;
    induced.joint.assign(k, std::vector<double>(k, 0.0));
    induced.marginal.assign(k, 0.0);
    for (std::size_t x = 0; x < k; ++x)
        for (std::size_t y = 0; y < k; ++y)
            for (std::size_t z = 0; z < k; ++z)
                induced.joint[x][y] += strategy.q[z][y] * belief.joint[x][z];
    for (std::size_t y = 0; y < k; ++y)
        for (std::size_t z = 0; z < k; ++z)
            induced.marginal[y] += strategy.q[z][y] * belief.marginal[z];
    return induced;
}

}  // namespace belief_gen
