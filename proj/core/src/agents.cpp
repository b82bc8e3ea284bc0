#include "ptsfd/agents.hpp"

#include <algorithm>
#include <cmath>

#include "ptsfd/mechanism.hpp"

namespace ptsfd::agents {

void SyntheticClassifier::validate() const {
    if (confusion.empty()) throw ValidationError("classifier has no classes");
    for (const auto& row : confusion) {
        if (row.size() != confusion.size())
            throw ValidationError("confusion matrix is not square");
        double total = 0.0;
        for (double p : row) {
            if (p < 0.0 || !std::isfinite(p))
                throw ValidationError("confusion row has negative entry");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw ValidationError("confusion row does not sum to 1");
    }
    if (overall_accuracy < 0.0 || overall_accuracy > 1.0 + 1e-12)
        throw ValidationError("overall accuracy outside [0,1]");
    if (!(confidence_concentration > 0.0))
        throw ValidationError("confidence concentration must be > 0");
}

void NoiseParams::validate() const {
    if (noise_level < 0.0 || noise_level >= 1.0)
        throw ValidationError("noise_level must lie in [0,1)");
    if (!(noise_concentration > 0.0))
        throw ValidationError("noise_concentration must be > 0");
    if (count_saturation < 0.0) throw ValidationError("count_saturation must be >= 0");
    if (!(confidence_concentration > 0.0))
        throw ValidationError("confidence_concentration must be > 0");
}

void EffortCostModel::validate() const {
    if (effort < 0.0 || effort > 1.0) throw ValidationError("effort must lie in [0,1]");
    if (cost_high < cost_low)
        throw ValidationError("variable cost must be non-decreasing in effort");
    if (fixed_cost < 0.0) throw ValidationError("fixed cost must be >= 0");
}

void Strategy::validate(std::uint32_t n_classes) const {
    if (kind == StrategyKind::Strategic) {
        if (report_map.size() != n_classes)
            throw ValidationError("strategic report map must be total over C");
        for (const ClassLabel c : report_map)
            if (c >= n_classes) throw ValidationError("report map target out of range");
    }
    if (threshold_mode == ThresholdMode::Fixed &&
        (fixed_threshold < 0.0 || fixed_threshold > 1.0))
        throw ValidationError("fixed threshold must lie in [0,1]");
}

std::vector<ClassLabel> Strategy::collusion_map(std::uint32_t n_classes) {
    std::vector<ClassLabel> map(n_classes);
    for (std::uint32_t c = 0; c < n_classes; ++c)
        map[c] = (c < (n_classes + 1) / 2) ? 0 : static_cast<ClassLabel>(n_classes - 1);
    return map;
}

SyntheticClassifier build_classifier(const std::vector<std::uint64_t>& local_counts,
                                     double effort, const NoiseParams& noise,
                                     const datagen::ClassPrior& eval_prior, Rng& rng) {
    noise.validate();
    eval_prior.validate();
    if (effort < 0.0 || effort > 1.0) throw ValidationError("effort must lie in [0,1]");
    if (local_counts.size() != eval_prior.probs.size())
        throw ValidationError("local_counts dimension != prior dimension");
    bool any = false;
    for (const std::uint64_t c : local_counts) any = any || c > 0;
    if (!any && effort > 0.0)
        throw ValidationError("local_counts are all zero; no data to train on");

    const std::size_t k = local_counts.size();
    SyntheticClassifier clf;
    clf.confusion.assign(k, std::vector<double>(k, 0.0));
    clf.confidence_concentration =
        noise.confidence_concentration * (0.1 + 0.9 * effort);

    const std::vector<double> conc(k, noise.noise_concentration);
    for (std::size_t y = 0; y < k; ++y) {
        // diagonal weight saturating in the local count, scaled by effort
        const double count = static_cast<double>(local_counts[y]);
        const double sat = noise.count_saturation > 0.0
                               ? count / (count + noise.count_saturation)
                               : (count > 0.0 ? 1.0 : 0.0);
        const double w = effort * sat;

        std::vector<double> spread(k);
        if (noise.noise_level > 0.0) {
            const std::vector<double> draw = rng.dirichlet(conc);
            for (std::size_t c = 0; c < k; ++c)
                spread[c] = (1.0 - noise.noise_level) * eval_prior.probs[c] +
                            noise.noise_level * draw[c];
        } else {
            spread = eval_prior.probs;
        }
        for (std::size_t c = 0; c < k; ++c)
            clf.confusion[y][c] = (y == c ? w : 0.0) + (1.0 - w) * spread[c];
    }

    clf.overall_accuracy = 0.0;
    for (std::size_t y = 0; y < k; ++y)
        clf.overall_accuracy += eval_prior.probs[y] * clf.confusion[y][y];
    clf.validate();
    return clf;
}

SyntheticClassifier make_classifier_with_accuracy(double accuracy, std::uint32_t n_classes,
                                                  double confidence_concentration) {
    if (accuracy < 0.0 || accuracy > 1.0) throw ValidationError("accuracy must lie in [0,1]");
    if (n_classes < 2) throw ValidationError("need >= 2 classes");
    SyntheticClassifier clf;
    const double off = (1.0 - accuracy) / (n_classes - 1);
    clf.confusion.assign(n_classes, std::vector<double>(n_classes, off));
    for (std::uint32_t c = 0; c < n_classes; ++c) clf.confusion[c][c] = accuracy;
    clf.overall_accuracy = accuracy;
    clf.confidence_concentration = confidence_concentration;
    clf.validate();
    return clf;
}

namespace {

// Max coordinate of a Dirichlet draw peaked at `eval`; the peak is swapped
// onto eval if a different coordinate came out on top, which is the
// conditioning the confidence model requires. Misses draw with a flatter
// peak than hits.
double draw_max_prob(const SyntheticClassifier& clf, ClassLabel eval, bool hit, Rng& rng) {
    const std::size_t k = clf.confusion.size();
    const double kappa = hit ? clf.confidence_concentration
                             : clf.confidence_concentration / 4.0;
    std::vector<double> alpha(k, 1.0);
    alpha[eval] += kappa;
    const std::vector<double> v = rng.dirichlet(alpha);
    double max_p = v[0];
    for (std::size_t c = 1; c < k; ++c) max_p = std::max(max_p, v[c]);
    return max_p;
}

}  // namespace

PredictionRecord evaluate(const SyntheticClassifier& classifier, ClassLabel true_class,
                          Rng& rng) {
    if (true_class >= classifier.confusion.size())
        throw ValidationError("true class outside classifier support");
    PredictionRecord rec;
    rec.eval = static_cast<ClassLabel>(rng.sample_discrete(classifier.confusion[true_class]));
    rec.max_prob = draw_max_prob(classifier, rec.eval, rec.eval == true_class, rng);
    rec.certainty = classifier.overall_accuracy * rec.max_prob;
    rec.report = Vote::label(rec.eval);
    return rec;
}

Vote decide_report(const PredictionRecord& record, const Strategy& strategy,
                   const MechanismParams& params, const PeerDensity& prior,
                   const EffortCostModel& cost, Rng& rng) {
    switch (strategy.kind) {
        case StrategyKind::Heuristic:
            // random answer drawn from the known label distribution
            return Vote::label(static_cast<ClassLabel>(rng.sample_discrete(prior)));
        case StrategyKind::Strategic:
            return Vote::label(strategy.report_map[record.eval]);
        case StrategyKind::Honest:
            break;
    }
    switch (strategy.threshold_mode) {
        case ThresholdMode::None:
            return Vote::label(record.eval);
        case ThresholdMode::Fixed:
            return record.max_prob < strategy.fixed_threshold ? Vote::abstain()
                                                              : Vote::label(record.eval);
        case ThresholdMode::Rational: {
            // participate only when certainty clears the minimum prediction
            // quality R(x) * (c/lambda + beta)
            const double r = prior[record.eval];
            const double min_certainty =
                r * (cost.variable_cost(cost.effort) / params.lambda + params.beta);
            return record.certainty < min_certainty ? Vote::abstain()
                                                    : Vote::label(record.eval);
        }
    }
    return Vote::label(record.eval);
}

WorkerRun run_worker(const WorkerProfile& profile,
                     const std::vector<std::uint32_t>& assigned_samples,
                     const std::vector<ClassLabel>& true_classes,
                     const MechanismParams& params, const PeerDensity& prior) {
    params.validate();
    profile.classifier.validate();
    profile.strategy.validate(params.n_classes);
    profile.cost.validate();
    if (prior.size() != params.n_classes)
        throw ValidationError("prior dimension != n_classes");

    Rng rng(profile.rng_seed);
    WorkerRun run;
    run.votes.assign(true_classes.size(), Vote::abstain());

    const Strategy& strat = profile.strategy;
    const bool needs_confidence = strat.kind == StrategyKind::Honest &&
                                  strat.threshold_mode != ThresholdMode::None;

    for (const std::uint32_t j : assigned_samples) {
        if (j >= true_classes.size())
            throw ValidationError("assigned sample outside public dataset");
        ++run.evaluations;
        if (strat.kind == StrategyKind::Heuristic) {
            run.votes[j] = Vote::label(static_cast<ClassLabel>(rng.sample_discrete(prior)));
            continue;
        }
        PredictionRecord rec;
        rec.sample_id = j;
        rec.eval = static_cast<ClassLabel>(
            rng.sample_discrete(profile.classifier.confusion[true_classes[j]]));
        if (needs_confidence) {
            rec.max_prob = draw_max_prob(profile.classifier, rec.eval,
                                         rec.eval == true_classes[j], rng);
            rec.certainty = profile.classifier.overall_accuracy * rec.max_prob;
        }
        run.votes[j] = decide_report(rec, strat, params, prior, profile.cost, rng);
    }

    run.counts = mechanism::label_count(run.votes, params.n_classes);
    const double effort_for_cost =
        strat.kind == StrategyKind::Heuristic ? 0.0 : profile.cost.effort;
    std::uint64_t participation = 0;
    for (const Vote v : run.votes)
        if (!v.is_abstain()) ++participation;
    run.incurred_cost = profile.cost.variable_cost(effort_for_cost) *
                            static_cast<double>(participation) +
                        profile.cost.fixed_cost;
    return run;
}

}  // namespace ptsfd::agents
