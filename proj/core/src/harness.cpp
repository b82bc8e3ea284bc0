#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "ptsfd/harness.hpp"

namespace ptsfd::harness {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string worker_address(std::size_t index, std::size_t n_workers) {
    std::size_t width = 2;
    for (std::size_t v = n_workers > 0 ? n_workers - 1 : 0; v >= 100; v /= 10) ++width;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "w%0*zu", static_cast<int>(width), index);
    return buf;
}

const char* strategy_name(agents::StrategyKind kind) {
    switch (kind) {
        case agents::StrategyKind::Honest: return "honest";
        case agents::StrategyKind::Heuristic: return "heuristic";
        case agents::StrategyKind::Strategic: return "strategic";
    }
    return "?";
}

ledger::Salt derive_salt(std::uint64_t seed, std::size_t round, std::size_t worker) {
    Rng rng(derive_seed(seed, "salt", round * 1'000'000 + worker));
    ledger::Salt salt;
    for (std::size_t i = 0; i < 4; ++i) {
        const std::uint64_t word = rng.next_u64();
        for (std::size_t b = 0; b < 8; ++b)
            salt[8 * i + b] = static_cast<std::uint8_t>(word >> (8 * b));
    }
    return salt;
}

}  // namespace

RunResult run_scenario(const Scenario& scenario) {
    scenario.validate();
    const std::size_t n = scenario.n_workers;
    const std::size_t m = scenario.m_samples;
    const std::uint32_t k = scenario.n_classes;

    RunResult result;
    result.scenario_digest = scenario.digest();
    result.seed = scenario.seed;
    result.n_classes = k;

    const datagen::ClassPrior public_prior = scenario.public_prior_or_uniform();
    const datagen::ClassPrior private_prior = scenario.private_prior_or_uniform();

    // The dataset and the local data split are fixed for the whole run;
    // per-round variation enters through fresh prediction streams.
    Rng ds_rng(derive_seed(scenario.seed, "public-dataset"));
    const datagen::PublicDataset dataset = datagen::make_public_dataset(m, public_prior, ds_rng);

    std::vector<std::uint64_t> class_totals(k);
    const std::uint64_t total_private = scenario.private_samples_per_worker * n;
    for (std::uint32_t c = 0; c < k; ++c)
        class_totals[c] =
            static_cast<std::uint64_t>(std::llround(private_prior.probs[c] * total_private));
    Rng part_rng(derive_seed(scenario.seed, "partition"));
    const datagen::Partition partition =
        datagen::dirichlet_partition(class_totals, n, scenario.alpha, part_rng);

    result.manifest =
        datagen::dataset_manifest(scenario.seed, public_prior, private_prior, scenario.alpha,
                                  scenario.assignment_mode, scenario.assignment_k, m, n);

    // The label distribution every worker is assumed to know a priori: the
    // empirical class frequencies of the public dataset. Drives heuristic
    // reports and the rational participation threshold.
    PeerDensity prior_density(k, 0.0);
    for (const ClassLabel c : dataset.true_classes)
        prior_density[c] += 1.0 / static_cast<double>(m);

    // Classifiers persist across rounds.
    std::vector<agents::WorkerProfile> profiles(n);
    for (std::size_t i = 0; i < n; ++i) {
        const WorkerSpec& spec = scenario.workers[i];
        agents::WorkerProfile& profile = profiles[i];
        profile.address = worker_address(i, n);
        if (spec.accuracy) {
            profile.classifier = agents::make_classifier_with_accuracy(
                *spec.accuracy, k, scenario.noise.confidence_concentration);
        } else {
            Rng clf_rng(derive_seed(scenario.seed, "classifier", i));
            profile.classifier = agents::build_classifier(partition.per_worker_counts[i],
                                                          spec.effort, scenario.noise,
                                                          public_prior, clf_rng);
        }
        profile.strategy.kind = spec.strategy;
        profile.strategy.threshold_mode = spec.threshold_mode;
        profile.strategy.fixed_threshold = spec.fixed_threshold;
        if (spec.strategy == agents::StrategyKind::Strategic)
            profile.strategy.report_map =
                spec.report_map.empty() ? agents::Strategy::collusion_map(k) : spec.report_map;
        profile.cost = {spec.effort, scenario.cost_low, scenario.cost_high, scenario.cost_fixed};
    }

    for (std::size_t round = 0; round < scenario.rounds; ++round) {
        RoundResult rr;
        rr.lambda_used = scenario.round_lambda(round);
        MechanismParams params{rr.lambda_used, scenario.beta, k};

        Rng assign_rng(derive_seed(scenario.seed, "assignment", round));
        const datagen::Assignment assignment = datagen::assign_samples(
            m, n, scenario.assignment_mode, scenario.assignment_k, assign_rng);

        // Worker simulation.
        std::vector<agents::WorkerRun> runs(n);
        for (std::size_t i = 0; i < n; ++i) {
            profiles[i].rng_seed =
                derive_seed(scenario.seed, "worker-run", round * 1'000'000 + i);
            runs[i] = agents::run_worker(profiles[i], assignment.per_worker_samples[i],
                                         dataset.true_classes, params, prior_density);
        }

        // Ledger round: register, commit, reveal, settle.
        ledger::LedgerConfig config;
        for (std::size_t i = 0; i < n; ++i) config.roster.insert(profiles[i].address);
        config.required_deposit = scenario.deposit;
        config.t_max_commit = scenario.t_max_commit;
        config.t_max_reveal = scenario.t_max_reveal;
        config.m_samples = m;
        config.n_classes = k;
        config.settlement_scale = scenario.settlement_scale;
        ledger::Ledger contract(config);

        std::vector<char> registered(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::int64_t d =
                scenario.workers[i].deposit >= 0 ? scenario.workers[i].deposit : scenario.deposit;
            registered[i] = contract.register_worker(profiles[i].address, d).ok();
        }
        if (!contract.open_commit().ok())
            throw LedgerError("no worker registered; cannot open the commit phase");

        std::vector<ledger::Salt> salts(n);
        std::vector<LabelCount> committed_counts(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!registered[i]) continue;
            salts[i] = derive_salt(scenario.seed, round, i);
            committed_counts[i] = runs[i].counts;
            if (scenario.workers[i].falsify_counts) ++committed_counts[i][0];
            const auto hash =
                ledger::commitment_hash(runs[i].votes, committed_counts[i], salts[i]);
            const auto tx = contract.commit(profiles[i].address, hash);
            if (!tx.ok())
                throw LedgerError(std::string("commit rejected: ") + ledger::to_string(tx.error));
        }

        for (std::size_t i = 0; i < n; ++i) {
            if (!registered[i] || scenario.workers[i].withhold_reveal) continue;
            const auto tx = contract.reveal(profiles[i].address, runs[i].votes,
                                            committed_counts[i], salts[i]);
            if (!tx.ok())
                throw LedgerError(std::string("reveal rejected: ") + ledger::to_string(tx.error));
        }
        while (contract.phase() == ledger::Phase::Commit ||
               contract.phase() == ledger::Phase::Reveal)
            contract.advance_tick();

        rr.settlement = contract.finalize(params);

        // Map settlement back onto worker ids.
        rr.workers.resize(n);
        std::map<std::string, std::size_t> by_address;
        for (std::size_t i = 0; i < n; ++i) by_address[profiles[i].address] = i;
        for (std::size_t r = 0; r < rr.settlement.revealed_order.size(); ++r) {
            const std::size_t i = by_address.at(rr.settlement.revealed_order[r]);
            rr.revealed_worker_ids.push_back(i);
            rr.workers[i].reward_score = rr.settlement.mechanism_report.reward_scores[r];
        }
        rr.revealed_votes = VoteMatrix(rr.revealed_worker_ids.size(), m);
        for (std::size_t r = 0; r < rr.revealed_worker_ids.size(); ++r) {
            const std::size_t i = rr.revealed_worker_ids[r];
            rr.revealed_votes.set_row(r, runs[i].votes);
            rr.revealed_counts.push_back(runs[i].counts);
        }

        for (std::size_t i = 0; i < n; ++i) {
            WorkerOutcome& w = rr.workers[i];
            w.address = profiles[i].address;
            w.strategy = strategy_name(scenario.workers[i].strategy);
            w.incurred_cost = runs[i].incurred_cost;
            for (const Vote v : runs[i].votes)
                if (!v.is_abstain()) ++w.votes_cast;
            if (!registered[i]) {
                w.status = "unregistered";
                w.payout = 0;
                continue;
            }
            const ledger::WorkerAccount* acct = contract.account(profiles[i].address);
            w.status = ledger::to_string(acct->status);
            const auto payout_it = rr.settlement.payouts.find(profiles[i].address);
            w.payout = payout_it == rr.settlement.payouts.end() ? 0 : payout_it->second;
        }

        // Aggregated-label accuracy against the generator's ground truth.
        const auto& aggregated = rr.settlement.mechanism_report.aggregated;
        std::size_t correct = 0, voted = 0;
        for (std::size_t j = 0; j < aggregated.size(); ++j) {
            if (aggregated[j].is_abstain()) {
                ++rr.unvoted_samples;
                continue;
            }
            ++voted;
            if (aggregated[j].value() == dataset.true_classes[j]) ++correct;
        }
        rr.aggregated_accuracy =
            voted == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(voted);

        rr.tx_log = contract.transaction_log();
        result.rounds.push_back(std::move(rr));
    }

    // Cross-checks on the final round.
    const RoundResult& fr = result.final_round();
    const MechanismParams final_params{fr.lambda_used, scenario.beta, k};
    result.checks.expected_heuristic_per_sample =
        analysis::expected_profit_heuristic(final_params);
    result.checks.expected_strategic_per_sample =
        analysis::expected_profit_strategic(final_params, 0.0);
    std::uint64_t predicted = 0;
    for (std::size_t j = 0; j < m; ++j) {
        std::uint64_t voters = 0;
        for (std::size_t r = 0; r < fr.revealed_votes.n_workers(); ++r)
            if (!fr.revealed_votes.at(r, j).is_abstain()) ++voters;
        predicted += voters * (voters - (voters > 0 ? 1 : 0));
    }
    result.checks.predicted_peer_comparisons = predicted;
    result.checks.measured_peer_comparisons = fr.settlement.mechanism_report.peer_comparisons;
    result.checks.comparisons_match = predicted == result.checks.measured_peer_comparisons;
    return result;
}

Scenario apply_axis(const Scenario& base, const std::string& axis, double value) {
    Scenario sc = base;
    if (axis == "beta") {
        sc.beta = value;
    } else if (axis == "lambda") {
        sc.lambda = value;
    } else if (axis == "alpha") {
        sc.alpha = value;
    } else if (axis == "m_samples") {
        sc.m_samples = static_cast<std::size_t>(value);
    } else if (axis == "noise_level") {
        sc.noise.noise_level = value;
    } else if (axis == "confidence_concentration") {
        sc.noise.confidence_concentration = value;
    } else if (axis == "settlement_scale") {
        sc.settlement_scale = value;
    } else if (axis == "deposit") {
        sc.deposit = static_cast<std::int64_t>(value);
    } else if (axis == "effort") {
        for (WorkerSpec& w : sc.workers) w.effort = value;
    } else if (axis == "accuracy") {
        for (WorkerSpec& w : sc.workers) w.accuracy = value;
    } else if (axis == "fixed_threshold") {
        for (WorkerSpec& w : sc.workers) {
            w.threshold_mode = agents::ThresholdMode::Fixed;
            w.fixed_threshold = value;
        }
    } else if (axis == "collusion_ratio" || axis == "heuristic_ratio") {
        if (value < 0.0 || value > 1.0)
            throw ValidationError("strategy ratio must lie in [0,1]");
        const auto converted = static_cast<std::size_t>(
            std::llround(value * static_cast<double>(sc.n_workers)));
        for (std::size_t i = 0; i < converted && i < sc.n_workers; ++i) {
            sc.workers[i].strategy = axis == "collusion_ratio"
                                         ? agents::StrategyKind::Strategic
                                         : agents::StrategyKind::Heuristic;
            sc.workers[i].report_map.clear();
        }
    } else {
        throw ValidationError("axis '" + axis + "' does not name a sweepable scenario field");
    }
    sc.validate();
    return sc;
}

std::vector<SweepRow> sweep(const SweepSpec& spec) {
    spec.base.validate();
    if (spec.replicates == 0) throw ValidationError("sweep needs replicates >= 1");

    struct Job {
        std::size_t value_idx;
        std::size_t replicate;
    };
    std::vector<Job> jobs;
    for (std::size_t v = 0; v < spec.values.size(); ++v)
        for (std::size_t r = 0; r < spec.replicates; ++r) jobs.push_back({v, r});

    std::vector<SweepRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto work = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= jobs.size()) return;
            try {
                const Job job = jobs[idx];
                Scenario sc = apply_axis(spec.base, spec.axis, spec.values[job.value_idx]);
                sc.seed = spec.base.seed + job.replicate;
                const RunResult result = run_scenario(sc);

                SweepRow row;
                row.value = spec.values[job.value_idx];
                row.replicate = job.replicate;
                row.seed = sc.seed;
                double honest_sum = 0.0, other_sum = 0.0;
                double honest_votes = 0.0, other_votes = 0.0;
                for (const WorkerOutcome& w : result.final_round().workers) {
                    if (w.strategy == "honest") {
                        honest_sum += w.reward_score;
                        honest_votes += static_cast<double>(w.votes_cast);
                        ++row.n_honest;
                    } else {
                        other_sum += w.reward_score;
                        other_votes += static_cast<double>(w.votes_cast);
                        ++row.n_other;
                    }
                }
                row.mean_honest = row.n_honest ? honest_sum / row.n_honest : 0.0;
                row.mean_other = row.n_other ? other_sum / row.n_other : 0.0;
                row.per_vote_honest = honest_votes > 0 ? honest_sum / honest_votes : 0.0;
                row.per_vote_other = other_votes > 0 ? other_sum / other_votes : 0.0;
                rows[idx] = row;
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };

    const std::size_t n_threads =
        std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), jobs.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return rows;
}

std::vector<SweepSummaryRow> summarize_sweep(const std::vector<SweepRow>& rows) {
    std::vector<double> values;
    for (const SweepRow& r : rows)
        if (std::find(values.begin(), values.end(), r.value) == values.end())
            values.push_back(r.value);

    std::vector<SweepSummaryRow> out;
    for (const double v : rows.empty() ? std::vector<double>{} : values) {
        std::vector<double> honest, other;
        for (const SweepRow& r : rows)
            if (r.value == v) {
                honest.push_back(r.mean_honest);
                other.push_back(r.mean_other);
            }
        auto mean_se = [](const std::vector<double>& xs) {
            const double mean =
                std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
            if (xs.size() < 2) return std::pair{mean, 0.0};
            double ss = 0.0;
            for (const double x : xs) ss += (x - mean) * (x - mean);
            const double se =
                std::sqrt(ss / static_cast<double>(xs.size() - 1) /
                          static_cast<double>(xs.size()));
            return std::pair{mean, se};
        };
        SweepSummaryRow row;
        row.value = v;
        std::tie(row.mean_honest, row.se_honest) = mean_se(honest);
        std::tie(row.mean_other, row.se_other) = mean_se(other);
        out.push_back(row);
    }
    return out;
}

std::string render_rewards_csv(const RunResult& result) {
    std::ostringstream os;
    os << "worker_id,strategy,reward_score,payout,status\n";
    const RoundResult& fr = result.final_round();
    for (std::size_t i = 0; i < fr.workers.size(); ++i) {
        const WorkerOutcome& w = fr.workers[i];
        os << i << "," << w.strategy << "," << fmt_double(w.reward_score) << "," << w.payout
           << "," << w.status << "\n";
    }
    return os.str();
}

std::string render_aggregate_csv(const RunResult& result) {
    const RoundResult& fr = result.final_round();
    const auto& votes = fr.revealed_votes;
    std::ostringstream os;
    os << "sample_id,label,vote_margin\n";
    const auto& aggregated = fr.settlement.mechanism_report.aggregated;
    for (std::size_t j = 0; j < aggregated.size(); ++j) {
        if (aggregated[j].is_abstain()) {
            os << j << ",-1,0\n";
            continue;
        }
        // margin: winner count minus runner-up count
        std::map<ClassLabel, std::uint32_t> tally;
        for (std::size_t r = 0; r < votes.n_workers(); ++r) {
            const Vote v = votes.at(r, j);
            if (!v.is_abstain()) ++tally[v.value()];
        }
        std::uint32_t best = 0, second = 0;
        for (const auto& [cls, count] : tally) {
            if (count > best) {
                second = best;
                best = count;
            } else if (count > second) {
                second = count;
            }
        }
        os << j << "," << aggregated[j].value() << "," << (best - second) << "\n";
    }
    return os.str();
}

std::string render_summary(const RunResult& result) {
    std::ostringstream os;
    os << "scenario_digest=" << result.scenario_digest << "\n";
    os << "seed=" << result.seed << "\n";
    os << "rounds=" << result.rounds.size() << "\n";
    for (std::size_t r = 0; r < result.rounds.size(); ++r) {
        const RoundResult& rr = result.rounds[r];
        os << "round." << r << ".lambda=" << fmt_double(rr.lambda_used) << "\n";
        os << "round." << r << ".pool_in=" << rr.settlement.pool_in << "\n";
        os << "round." << r << ".pool_out=" << rr.settlement.pool_out << "\n";
        os << "round." << r << ".retained=" << rr.settlement.retained << "\n";
        os << "round." << r << ".outcome="
           << (rr.settlement.outcome == ledger::SettlementOutcome::Settled
                   ? "settled"
                   : "federation-failure")
           << "\n";
        os << "round." << r << ".slashed=" << rr.settlement.slashed.size() << "\n";
        os << "round." << r << ".aggregated_accuracy=" << fmt_double(rr.aggregated_accuracy)
           << "\n";
        os << "round." << r << ".unvoted_samples=" << rr.unvoted_samples << "\n";
        os << "round." << r
           << ".peer_comparisons=" << rr.settlement.mechanism_report.peer_comparisons << "\n";
    }
    os << "check.expected_heuristic_per_sample="
       << fmt_double(result.checks.expected_heuristic_per_sample) << "\n";
    os << "check.expected_strategic_per_sample="
       << fmt_double(result.checks.expected_strategic_per_sample) << "\n";
    os << "check.predicted_peer_comparisons=" << result.checks.predicted_peer_comparisons
       << "\n";
    os << "check.measured_peer_comparisons=" << result.checks.measured_peer_comparisons << "\n";
    os << "check.comparisons_match=" << (result.checks.comparisons_match ? "yes" : "no") << "\n";
    return os.str();
}

void emit_results(const RunResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());

    auto write_file = [&](const std::string& name, const std::string& content) {
        const fs::path path = fs::path(out_dir) / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + path.string() + " for writing");
        out << content;
        if (!out) throw IoError("failed writing " + path.string());
    };

    const RoundResult& fr = result.final_round();

    // Re-keyed to original worker ids so that exported votes replay to the
    // same scores through the reward command.
    VoteMatrix by_id(fr.workers.size(), fr.revealed_votes.m_samples());
    for (std::size_t r = 0; r < fr.revealed_worker_ids.size(); ++r)
        by_id.set_row(fr.revealed_worker_ids[r], fr.revealed_votes.row(r));
    std::vector<LabelCount> counts_by_id(fr.workers.size(), LabelCount(result.n_classes, 0));
    for (std::size_t r = 0; r < fr.revealed_worker_ids.size(); ++r)
        counts_by_id[fr.revealed_worker_ids[r]] = fr.revealed_counts[r];

    write_file("rewards.csv", render_rewards_csv(result));
    write_file("aggregate.csv", render_aggregate_csv(result));
    write_file("summary.txt", render_summary(result));
    write_file("votes.csv", export_votes_csv(by_id, result.n_classes));
    write_file("counts.csv", export_counts_csv(counts_by_id));
    write_file("manifest.txt", result.manifest);

    std::string txlog;
    for (std::size_t r = 0; r < result.rounds.size(); ++r) {
        txlog += "# round " + std::to_string(r) + "\n";
        for (const std::string& line : result.rounds[r].tx_log) txlog += line + "\n";
    }
    write_file("txlog.txt", txlog);
}

}  // namespace ptsfd::harness
