// ptsfd: simulate and inspect reward-based 1-bit federated distillation.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ptsfd/harness.hpp"

using namespace ptsfd;
using nlohmann::json;

namespace {

bool log_enabled() {
    const char* env = std::getenv("PTSFD_LOG");
    return env != nullptr && (std::string(env) == "debug" || std::string(env) == "info");
}

void log_line(const std::string& message) {
    if (log_enabled()) std::cerr << "ptsfd: " << message << "\n";
}

std::string slurp_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

int cmd_simulate(const std::string& config_path, std::int64_t seed_override,
                 const std::string& out_dir) {
    harness::Scenario scenario = harness::Scenario::parse_file(config_path);
    if (seed_override >= 0) scenario.seed = static_cast<std::uint64_t>(seed_override);
    log_line("scenario digest " + scenario.digest());

    const harness::RunResult result = harness::run_scenario(scenario);
    harness::emit_results(result, out_dir);
    std::cout << "digest=" << result.scenario_digest << " seed=" << result.seed
              << " out=" << out_dir << "\n";
    if (result.final_round().settlement.outcome ==
        ledger::SettlementOutcome::FederationFailure) {
        std::cerr << "federation failure: fewer than two workers revealed\n";
        return static_cast<int>(ErrorCategory::ledger);
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& axis,
              const std::vector<double>& values, std::size_t replicates,
              const std::string& out_dir) {
    harness::SweepSpec spec;
    spec.base = harness::Scenario::parse_file(config_path);
    spec.axis = axis;
    spec.values = values;
    spec.replicates = replicates;
    log_line("sweeping " + axis + " over " + std::to_string(values.size()) + " values x " +
             std::to_string(replicates) + " replicates");

    const auto rows = harness::sweep(spec);
    const auto summary = harness::summarize_sweep(rows);

    std::filesystem::create_directories(out_dir);
    {
        std::ofstream out(std::filesystem::path(out_dir) / "sweep.csv",
                          std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write sweep.csv");
        out << "value,replicate,seed,mean_honest,mean_other,per_vote_honest,per_vote_other,"
               "n_honest,n_other\n";
        for (const auto& r : rows)
            out << fmt_double(r.value) << "," << r.replicate << "," << r.seed << ","
                << fmt_double(r.mean_honest) << "," << fmt_double(r.mean_other) << ","
                << fmt_double(r.per_vote_honest) << "," << fmt_double(r.per_vote_other) << ","
                << r.n_honest << "," << r.n_other << "\n";
    }
    {
        std::ofstream out(std::filesystem::path(out_dir) / "sweep_summary.csv",
                          std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write sweep_summary.csv");
        out << "value,mean_honest,se_honest,mean_other,se_other\n";
        for (const auto& r : summary)
            out << fmt_double(r.value) << "," << fmt_double(r.mean_honest) << ","
                << fmt_double(r.se_honest) << "," << fmt_double(r.mean_other) << ","
                << fmt_double(r.se_other) << "\n";
    }
    std::cout << "rows=" << rows.size() << " out=" << out_dir << "\n";
    return 0;
}

int cmd_reward(const std::string& votes_path, double beta, double lambda,
               const std::string& counts_path) {
    const harness::VoteFile file = harness::ingest_votes(votes_path);

    if (!counts_path.empty()) {
        const auto claimed = harness::parse_counts_csv(slurp_file(counts_path));
        const auto mismatched = harness::count_mismatches(file, claimed);
        if (!mismatched.empty()) {
            for (const std::size_t w : mismatched)
                std::cerr << "count-mismatch worker=" << w << "\n";
            return static_cast<int>(ErrorCategory::validation);
        }
    }

    MechanismParams params{lambda, beta, file.n_classes};
    const auto report = mechanism::ptsfd(file.votes, file.counts, params);

    std::cout << "worker_id,reward_score,votes_cast,mean_per_vote\n";
    for (std::size_t i = 0; i < file.votes.n_workers(); ++i) {
        std::size_t cast = 0;
        for (std::size_t j = 0; j < file.votes.m_samples(); ++j)
            if (!file.votes.at(i, j).is_abstain()) ++cast;
        const double per_vote =
            cast == 0 ? 0.0 : report.reward_scores[i] / static_cast<double>(cast);
        std::cout << i << "," << fmt_double(report.reward_scores[i]) << "," << cast << ","
                  << fmt_double(per_vote) << "\n";
    }
    return 0;
}

int cmd_check_condition(const std::string& belief_path) {
    const json doc = json::parse(slurp_file(belief_path));
    if (!doc.contains("joint")) throw ParseError("belief file lacks a 'joint' matrix");

    analysis::BeliefModel belief;
    belief.joint = doc.at("joint").get<std::vector<std::vector<double>>>();
    if (doc.contains("marginal")) {
        belief.marginal = doc.at("marginal").get<std::vector<double>>();
    } else if (doc.contains("prior")) {
        belief = analysis::BeliefModel::from_prior(belief.joint,
                                                   doc.at("prior").get<std::vector<double>>());
    } else {
        throw ParseError("belief file needs either 'marginal' or 'prior'");
    }

    const auto res = analysis::check_self_predicting(belief);
    switch (res.verdict) {
        case analysis::ConditionVerdict::Holds:
            std::cout << "holds\n";
            break;
        case analysis::ConditionVerdict::Violated:
            std::cout << "violated witness=(" << res.witness_x << "," << res.witness_y
                      << ")\n";
            break;
        case analysis::ConditionVerdict::ViolatedTie:
            std::cout << "violated-with-tie witness=(" << res.witness_x << ","
                      << res.witness_y << ")\n";
            break;
    }
    return 0;
}

int cmd_costs(std::uint64_t m, std::uint64_t n, std::uint32_t classes,
              const std::string& mode, std::uint64_t eta) {
    const analysis::CostMode cost_mode =
        mode == "full" ? analysis::CostMode::Full : analysis::CostMode::KPeers2;
    const auto est = analysis::estimate_costs(m, n, classes, cost_mode, eta);
    std::cout << "compute_ops=" << est.compute_ops << "\n";
    std::cout << "memory_cells=" << est.memory_cells << "\n";
    std::cout << "permanent_bits=" << est.permanent_bits << "\n";
    std::cout << "eta=" << est.eta << "\n";
    std::cout << "paper_literal_bits=" << est.paper_literal_bits << "\n";
    return 0;
}

int cmd_verify_reveal(const std::string& commit_hex, const std::string& votes_path,
                      const std::string& salt_hex, const std::string& counts_path) {
    const harness::VoteFile file = harness::ingest_votes(votes_path);
    if (file.votes.n_workers() != 1)
        throw ValidationError("verify-reveal expects a single-worker vote file (n=1)");

    const auto commit_bytes = crypto::from_hex(commit_hex);
    if (commit_bytes.size() != 32) throw ValidationError("commit must be 32 bytes of hex");
    crypto::Digest256 commit;
    std::copy(commit_bytes.begin(), commit_bytes.end(), commit.begin());

    const auto salt_bytes = crypto::from_hex(salt_hex);
    if (salt_bytes.size() != 32) throw ValidationError("salt must be 32 bytes of hex");
    ledger::Salt salt;
    std::copy(salt_bytes.begin(), salt_bytes.end(), salt.begin());

    LabelCount counts = file.counts[0];
    if (!counts_path.empty()) {
        const auto claimed = harness::parse_counts_csv(slurp_file(counts_path));
        if (claimed.size() != 1)
            throw ValidationError("counts file must describe exactly one worker");
        counts = claimed[0];
    }

    const auto digest = ledger::commitment_hash(file.votes.row(0), counts, salt);
    if (digest == commit) {
        const bool counts_consistent = counts == file.counts[0];
        std::cout << "ok" << (counts_consistent ? "" : " (labelCount mismatches votes)")
                  << "\n";
        return counts_consistent ? 0 : static_cast<int>(ErrorCategory::validation);
    }
    std::cout << "mismatch\n";
    return static_cast<int>(ErrorCategory::verification);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PTSFD simulator: commit-reveal ledger, peer-consistency rewards, "
                 "majority-vote aggregation"};
    app.require_subcommand(1);

    // simulate
    std::string sim_config, sim_out;
    std::int64_t sim_seed = -1;
    auto* simulate = app.add_subcommand("simulate", "run one scenario end to end");
    simulate->add_option("--config", sim_config, "scenario config file")->required();
    simulate->add_option("--seed", sim_seed, "override the config seed");
    simulate->add_option("--out", sim_out, "output directory")->required();

    // sweep
    std::string sweep_config, sweep_axis, sweep_out;
    std::vector<double> sweep_values;
    std::size_t sweep_replicates = 1;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
    sweep_cmd->add_option("--config", sweep_config, "scenario config file")->required();
    sweep_cmd->add_option("--axis", sweep_axis, "scenario field to vary")->required();
    sweep_cmd->add_option("--values", sweep_values, "axis values")
        ->required()
        ->delimiter(',');
    sweep_cmd->add_option("--replicates", sweep_replicates, "seeds per value");
    sweep_cmd->add_option("--out", sweep_out, "output directory")->required();

    // reward
    std::string reward_votes, reward_counts;
    double reward_beta = 1.0, reward_lambda = 1.0;
    auto* reward = app.add_subcommand("reward", "score a vote file with PTSFD");
    reward->add_option("--votes", reward_votes, "vote CSV file")->required();
    reward->add_option("--beta", reward_beta, "penalty term")->required();
    reward->add_option("--lambda", reward_lambda, "reward scale")->required();
    reward->add_option("--counts", reward_counts, "claimed labelCount CSV to verify");

    // check-condition
    std::string belief_path;
    auto* check = app.add_subcommand("check-condition", "test the self-predicting condition");
    check->add_option("--belief", belief_path, "belief JSON file")->required();

    // costs
    std::uint64_t cost_m = 0, cost_n = 0, cost_eta = 0;
    std::uint32_t cost_classes = 0;
    std::string cost_mode = "full";
    auto* costs = app.add_subcommand("costs", "compute and storage cost estimates");
    costs->add_option("--m", cost_m, "public dataset size")->required();
    costs->add_option("--n", cost_n, "worker count")->required();
    costs->add_option("--classes", cost_classes, "class count")->required();
    costs->add_option("--mode", cost_mode, "full or kpeers2")
        ->check(CLI::IsMember({"full", "kpeers2"}));
    costs->add_option("--eta", cost_eta, "encoding overhead bits");

    // verify-reveal
    std::string vr_commit, vr_votes, vr_salt, vr_counts;
    auto* verify = app.add_subcommand("verify-reveal", "check a reveal against a commitment");
    verify->add_option("--commit", vr_commit, "32-byte commitment hex")->required();
    verify->add_option("--votes", vr_votes, "single-worker vote CSV")->required();
    verify->add_option("--salt", vr_salt, "32-byte salt hex")->required();
    verify->add_option("--counts", vr_counts, "claimed labelCount CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(sim_config, sim_seed, sim_out);
        if (sweep_cmd->parsed())
            return cmd_sweep(sweep_config, sweep_axis, sweep_values, sweep_replicates,
                             sweep_out);
        if (reward->parsed())
            return cmd_reward(reward_votes, reward_beta, reward_lambda, reward_counts);
        if (check->parsed()) return cmd_check_condition(belief_path);
        if (costs->parsed())
            return cmd_costs(cost_m, cost_n, cost_classes, cost_mode, cost_eta);
        if (verify->parsed())
            return cmd_verify_reveal(vr_commit, vr_votes, vr_salt, vr_counts);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ErrorCategory::parse);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
