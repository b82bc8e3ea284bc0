#include "ptsfd/analysis.hpp"

#include <cmath>
#include <string>

namespace ptsfd::analysis {

namespace {

void check_stochastic_rows(const std::vector<std::vector<double>>& rows, const char* what) {
    if (rows.empty()) throw ValidationError(std::string(what) + " is empty");
    for (const auto& row : rows) {
        if (row.size() != rows.size())
            throw ValidationError(std::string(what) + " is not square");
        double total = 0.0;
        for (double p : row) {
            if (p < 0.0 || !std::isfinite(p))
                throw ValidationError(std::string(what) + " has negative entry");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw ValidationError(std::string(what) + " row does not sum to 1");
    }
}

}  // namespace

void BeliefModel::validate() const {
    check_stochastic_rows(joint, "belief joint");
    if (marginal.size() != joint.size())
        throw ValidationError("belief marginal dimension mismatch");
    double total = 0.0;
    for (double p : marginal) {
        if (p < 0.0 || !std::isfinite(p))
            throw ValidationError("belief marginal has negative entry");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw ValidationError("belief marginal does not sum to 1");
}

BeliefModel BeliefModel::from_prior(std::vector<std::vector<double>> joint,
                                    const std::vector<double>& eval_prior) {
    BeliefModel belief;
    belief.joint = std::move(joint);
    check_stochastic_rows(belief.joint, "belief joint");
    if (eval_prior.size() != belief.joint.size())
        throw ValidationError("eval prior dimension mismatch");
    belief.marginal.assign(belief.joint.size(), 0.0);
    for (std::size_t x = 0; x < belief.joint.size(); ++x)
        for (std::size_t y = 0; y < belief.joint.size(); ++y)
            belief.marginal[y] += eval_prior[x] * belief.joint[x][y];
    belief.validate();
    return belief;
}

void PeerStrategyModel::validate() const { check_stochastic_rows(q, "peer strategy"); }

PeerStrategyModel PeerStrategyModel::identity(std::uint32_t n_classes) {
    PeerStrategyModel model;
    model.q.assign(n_classes, std::vector<double>(n_classes, 0.0));
    for (std::uint32_t c = 0; c < n_classes; ++c) model.q[c][c] = 1.0;
    return model;
}

double expected_profit_honest(double certainty, double r_of_report,
                              const MechanismParams& params, double cost) {
    params.validate();
    if (certainty < 0.0 || certainty > 1.0)
        throw ValidationError("certainty must lie in [0,1]");
    if (!(r_of_report > 0.0) || r_of_report > 1.0)
        throw UndefinedDensityError("R(report) must lie in (0,1]");
    return certainty * params.lambda * (1.0 / r_of_report - params.beta) +
           (1.0 - certainty) * params.lambda * (-params.beta) - cost;
}

double min_certainty(double r_of_report, const MechanismParams& params, double cost) {
    params.validate();
    if (!(r_of_report > 0.0) || r_of_report > 1.0)
        throw UndefinedDensityError("R(report) must lie in (0,1]");
    return r_of_report * (cost / params.lambda + params.beta);
}

double expected_profit_heuristic(const MechanismParams& params) {
    params.validate();
    return params.lambda * (1.0 - params.beta);
}

double expected_profit_strategic(const MechanismParams& params, double cost) {
    params.validate();
    return params.lambda * (-params.beta) - cost;
}

double expected_profit_collusion(double certainty, double r_x, double r_y,
                                 const MechanismParams& params, double cost) {
    params.validate();
    if (certainty < 0.0 || certainty > 1.0)
        throw ValidationError("certainty must lie in [0,1]");
    const double merged = r_x + r_y;
    if (!(merged > 0.0)) throw UndefinedDensityError("merged density must be > 0");
    return certainty * params.lambda * (1.0 / merged - params.beta) +
           (1.0 - certainty) * params.lambda * (-params.beta) - cost;
}

ConditionResult check_self_predicting(const BeliefModel& belief) {
    belief.validate();
    constexpr double kTol = 1e-12;
    const std::size_t k = belief.joint.size();
    for (std::size_t x = 0; x < k; ++x) {
        if (!(belief.marginal[x] > 0.0))
            throw UndefinedDensityError("marginal of class " + std::to_string(x) + " is zero");
        const double own_ratio = belief.joint[x][x] / belief.marginal[x];
        for (std::size_t y = 0; y < k; ++y) {
            if (y == x) continue;
            if (!(belief.marginal[y] > 0.0))
                throw UndefinedDensityError("marginal of class " + std::to_string(y) +
                                            " is zero");
            const double other_ratio = belief.joint[x][y] / belief.marginal[y];
            if (own_ratio <= other_ratio + kTol) {
                ConditionResult res;
                res.verdict = std::abs(own_ratio - other_ratio) <= kTol
                                  ? ConditionVerdict::ViolatedTie
                                  : ConditionVerdict::Violated;
                res.witness_x = static_cast<ClassLabel>(x);
                res.witness_y = static_cast<ClassLabel>(y);
                return res;
            }
        }
    }
    return {};
}

std::vector<std::vector<double>> honesty_optimality_gap(const BeliefModel& belief,
                                                        const PeerStrategyModel& peer_strategy,
                                                        const MechanismParams& params) {
    params.validate();
    belief.validate();
    peer_strategy.validate();
    const std::size_t k = belief.joint.size();
    if (peer_strategy.q.size() != k)
        throw ValidationError("peer strategy dimension mismatch");

    // Q_p(y) = sum_z Q_{p|p}(y|z) P_p(z)
    std::vector<double> report_marginal(k, 0.0);
    for (std::size_t z = 0; z < k; ++z)
        for (std::size_t y = 0; y < k; ++y)
            report_marginal[y] += peer_strategy.q[z][y] * belief.marginal[z];
    for (std::size_t y = 0; y < k; ++y)
        if (!(report_marginal[y] > 0.0))
            throw UndefinedDensityError("peer report probability of class " +
                                        std::to_string(y) + " is zero");

    std::vector<std::vector<double>> gap(k, std::vector<double>(k, 0.0));
    for (std::size_t x = 0; x < k; ++x) {
        for (std::size_t y = 0; y < k; ++y) {
            // Q_{p|w}(y|x) = sum_z Q_{p|p}(y|z) P_{p|w}(z|x)
            double q_cond = 0.0;
            for (std::size_t z = 0; z < k; ++z)
                q_cond += peer_strategy.q[z][y] * belief.joint[x][z];
            gap[x][y] = params.lambda * (q_cond / report_marginal[y] - params.beta);
        }
    }
    return gap;
}

bool row_max_on_diagonal(const std::vector<std::vector<double>>& gap, double tolerance) {
    for (std::size_t x = 0; x < gap.size(); ++x)
        for (std::size_t y = 0; y < gap[x].size(); ++y)
            if (y != x && gap[x][y] > gap[x][x] + tolerance) return false;
    return true;
}

CostEstimate estimate_costs(std::uint64_t m, std::uint64_t n, std::uint32_t n_classes,
                            CostMode mode, std::uint64_t eta) {
    if (m == 0 || n == 0) throw ValidationError("estimate_costs needs m, n >= 1");
    if (n_classes == 0) throw ValidationError("estimate_costs needs >= 1 class");

    CostEstimate est;
    est.eta = eta;
    est.compute_ops = mode == CostMode::Full ? m * (n * n + n_classes)
                                             : m * (2 * n + n_classes);
    est.memory_cells = static_cast<std::uint64_t>(n_classes) * (m + 2) + n;

    std::uint64_t bits_per_label = 0;
    while ((1ULL << bits_per_label) < n_classes) ++bits_per_label;
    est.permanent_bits = m * bits_per_label + eta;
    est.paper_literal_bits = n * n_classes + eta;
    return est;
}

}  // namespace ptsfd::analysis
