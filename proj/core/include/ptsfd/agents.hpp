#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ptsfd/datagen.hpp"
#include "ptsfd/rng.hpp"
#include "ptsfd/types.hpp"

namespace ptsfd::agents {

// Stand-in for a locally trained model: a row-stochastic confusion matrix
// (row y = distribution of the predicted class given true class y) plus a
// confidence model for the max-probability score.
struct SyntheticClassifier {
    std::vector<std::vector<double>> confusion;
    double overall_accuracy = 0.0;  // class-frequency-weighted trace
    // Dirichlet concentration of the confidence draw. The draw is sharper
    // when the evaluation hits the true class, so confidence carries signal
    // about correctness (the premise of the certainty heuristic).
    double confidence_concentration = 8.0;

    std::uint32_t n_classes() const { return static_cast<std::uint32_t>(confusion.size()); }
    void validate() const;
};

struct NoiseParams {
    double noise_level = 0.1;        // [0,1): blend of random mass into rows
    double noise_concentration = 2.0;  // Dirichlet concentration of that mass
    double count_saturation = 50.0;  // per-class count giving half of full weight
    double confidence_concentration = 8.0;

    void validate() const;
};

struct EffortCostModel {
    double effort = 1.0;     // in [0,1]; 0 = none, 1 = best work possible
    double cost_low = 0.0;   // c(e0)
    double cost_high = 0.0;  // c(e1); must be >= cost_low
    double fixed_cost = 0.0;

    double variable_cost(double e) const { return cost_low + e * (cost_high - cost_low); }
    void validate() const;
};

enum class StrategyKind { Honest, Heuristic, Strategic };

enum class ThresholdMode {
    None,      // always report
    Rational,  // abstain when certainty < R(report) * (c/lambda + beta)
    Fixed,     // abstain when max_prob < fixed threshold
};

struct Strategy {
    StrategyKind kind = StrategyKind::Honest;
    ThresholdMode threshold_mode = ThresholdMode::None;
    double fixed_threshold = 0.0;
    std::vector<ClassLabel> report_map;  // strategic only; total over C

    void validate(std::uint32_t n_classes) const;
    // The collusion map of the experiments: lower half of C to class 0,
    // upper half to class |C|-1.
    static std::vector<ClassLabel> collusion_map(std::uint32_t n_classes);
};

struct WorkerProfile {
    std::string address;
    SyntheticClassifier classifier;
    Strategy strategy;
    EffortCostModel cost;
    std::uint64_t rng_seed = 0;
};

struct PredictionRecord {
    std::size_t sample_id = 0;
    ClassLabel eval = 0;      // Y^eval
    Vote report;              // Y^report
    double max_prob = 0.0;
    double certainty = 0.0;   // overall_accuracy * max_prob
};

struct WorkerRun {
    std::vector<Vote> votes;  // length m; Abstain outside the assignment
    LabelCount counts;
    double incurred_cost = 0.0;
    std::uint64_t evaluations = 0;
};

// Builds a classifier from local data and effort. The diagonal weight of
// row y grows with both effort and the worker's local count for class y;
// the remainder is the prior blended with a Dirichlet perturbation.
SyntheticClassifier build_classifier(const std::vector<std::uint64_t>& local_counts,
                                     double effort, const NoiseParams& noise,
                                     const datagen::ClassPrior& eval_prior, Rng& rng);

// Symmetric classifier with exact target accuracy under any eval prior.
SyntheticClassifier make_classifier_with_accuracy(double accuracy, std::uint32_t n_classes,
                                                  double confidence_concentration = 8.0);

// Samples an evaluation from the confusion row of the true class and a
// max-probability score whose argmax is conditioned on that evaluation.
PredictionRecord evaluate(const SyntheticClassifier& classifier, ClassLabel true_class,
                          Rng& rng);

// Applies a strategy to an evaluation: honest (with optional abstention
// thresholding), heuristic (prior draw), or strategic (report map).
Vote decide_report(const PredictionRecord& record, const Strategy& strategy,
                   const MechanismParams& params, const PeerDensity& prior,
                   const EffortCostModel& cost, Rng& rng);

// One vote per assigned sample plus the worker's label count and cost.
WorkerRun run_worker(const WorkerProfile& profile,
                     const std::vector<std::uint32_t>& assigned_samples,
                     const std::vector<ClassLabel>& true_classes,
                     const MechanismParams& params, const PeerDensity& prior);

}  // namespace ptsfd::agents
