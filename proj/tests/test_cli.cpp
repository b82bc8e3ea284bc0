#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ptsfd/encoding.hpp"
#include "ptsfd/harness.hpp"
#include "ptsfd/sha3.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code;
    std::string out;
};

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "ptsfd_cli_test";
    fs::create_directories(dir);
    return dir;
}

CliResult run_cli(const std::string& args) {
    const fs::path out_file = work_dir() / "stdout.txt";
    const std::string command =
        std::string(PTSFD_CLI_PATH) + " " + args + " > " + out_file.string() + " 2>&1";
    const int raw = std::system(command.c_str());
    CliResult result;
    result.exit_code = WEXITSTATUS(raw);
    std::ifstream in(out_file);
    std::ostringstream buf;
    buf << in.rdbuf();
    result.out = buf.str();
    return result;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    REQUIRE(out);
    out << content;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* kConfig =
    "n_workers = 5\n"
    "m_samples = 40\n"
    "n_classes = 4\n"
    "lambda = 1.0\n"
    "beta = 1.0\n"
    "seed = 3\n"
    "deposit = 100\n"
    "worker.default = strategy=honest accuracy=0.9\n";

}  // namespace

TEST_CASE("costs subcommand prints the estimates") {
    const auto res = run_cli("costs --m 40000 --n 10 --classes 10 --mode full");
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("compute_ops=4400000") != std::string::npos);

    const auto kp = run_cli("costs --m 40000 --n 10 --classes 10 --mode kpeers2");
    CHECK(kp.exit_code == 0);
    CHECK(kp.out.find("compute_ops=1200000") != std::string::npos);
}

TEST_CASE("simulate writes deterministic artifacts") {
    const fs::path dir = work_dir();
    write_file(dir / "scenario.cfg", kConfig);

    const auto a = run_cli("simulate --config " + (dir / "scenario.cfg").string() +
                           " --seed 7 --out " + (dir / "run_a").string());
    REQUIRE(a.exit_code == 0);
    CHECK(a.out.find("digest=") != std::string::npos);
    for (const char* name :
         {"rewards.csv", "aggregate.csv", "summary.txt", "votes.csv", "counts.csv"})
        CHECK(fs::exists(dir / "run_a" / name));

    const auto b = run_cli("simulate --config " + (dir / "scenario.cfg").string() +
                           " --seed 7 --out " + (dir / "run_b").string());
    REQUIRE(b.exit_code == 0);
    CHECK(slurp(dir / "run_a" / "rewards.csv") == slurp(dir / "run_b" / "rewards.csv"));
    CHECK(slurp(dir / "run_a" / "summary.txt") == slurp(dir / "run_b" / "summary.txt"));
}

TEST_CASE("reward replays exported votes to the same scores") {
    const fs::path dir = work_dir();
    write_file(dir / "scenario.cfg", kConfig);
    REQUIRE(run_cli("simulate --config " + (dir / "scenario.cfg").string() +
                    " --seed 11 --out " + (dir / "replay").string())
                .exit_code == 0);

    const auto res = run_cli("reward --votes " + (dir / "replay" / "votes.csv").string() +
                             " --beta 1.0 --lambda 1.0");
    REQUIRE(res.exit_code == 0);

    // scores in rewards.csv (column 3) must reappear in the reward output
    std::istringstream rewards(slurp(dir / "replay" / "rewards.csv"));
    std::istringstream replayed(res.out);
    std::string line_a, line_b;
    std::getline(rewards, line_a);  // headers
    std::getline(replayed, line_b);
    while (std::getline(rewards, line_a) && std::getline(replayed, line_b)) {
        std::istringstream fa(line_a), fb(line_b);
        std::string id_a, strategy, score_a, id_b, score_b;
        std::getline(fa, id_a, ',');
        std::getline(fa, strategy, ',');
        std::getline(fa, score_a, ',');
        std::getline(fb, id_b, ',');
        std::getline(fb, score_b, ',');
        CHECK(id_a == id_b);
        CHECK(score_a == score_b);
    }
}

TEST_CASE("reward rejects contradicting counts naming the worker") {
    const fs::path dir = work_dir();
    write_file(dir / "votes_small.csv",
               "# n=2 m=3 classes=2\nworker_id,sample_id,class\n0,0,0\n0,1,1\n1,0,0\n");
    write_file(dir / "counts_bad.csv",
               "# n=2 classes=2\nworker_id,class,count\n0,0,1\n0,1,1\n1,0,5\n1,1,0\n");
    const auto res = run_cli("reward --votes " + (dir / "votes_small.csv").string() +
                             " --beta 1.0 --lambda 1.0 --counts " +
                             (dir / "counts_bad.csv").string());
    CHECK(res.exit_code == 2);
    CHECK(res.out.find("count-mismatch worker=1") != std::string::npos);
}

TEST_CASE("check-condition reports the limitation example") {
    const fs::path dir = work_dir();
    write_file(dir / "belief.json",
               R"({"joint": [[0.8, 0.2], [0.2, 0.8]], "marginal": [0.9, 0.1]})");
    const auto res = run_cli("check-condition --belief " + (dir / "belief.json").string());
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("violated witness=(0,1)") != std::string::npos);

    write_file(dir / "belief_ok.json",
               R"({"joint": [[0.9, 0.1], [0.1, 0.9]], "prior": [0.5, 0.5]})");
    const auto ok = run_cli("check-condition --belief " + (dir / "belief_ok.json").string());
    CHECK(ok.exit_code == 0);
    CHECK(ok.out.find("holds") != std::string::npos);
}

TEST_CASE("verify-reveal accepts the committed payload and flags tampering") {
    using namespace ptsfd;
    const fs::path dir = work_dir();

    // single-worker vote file and its commitment
    const std::string votes_csv =
        "# n=1 m=4 classes=3\nworker_id,sample_id,class\n0,0,2\n0,2,1\n";
    write_file(dir / "reveal_votes.csv", votes_csv);
    const harness::VoteFile file = harness::parse_votes_csv(votes_csv);

    ledger::Salt salt;
    salt.fill(0xAB);
    const auto digest = ledger::commitment_hash(file.votes.row(0), file.counts[0], salt);
    const std::string commit_hex = crypto::to_hex(digest);
    const std::string salt_hex = crypto::to_hex(salt);

    const auto good = run_cli("verify-reveal --commit " + commit_hex + " --votes " +
                              (dir / "reveal_votes.csv").string() + " --salt " + salt_hex);
    CHECK(good.exit_code == 0);
    CHECK(good.out.find("ok") != std::string::npos);

    // wrong salt: category 4 (verification)
    ledger::Salt other = salt;
    other[0] ^= 1;
    const auto bad = run_cli("verify-reveal --commit " + commit_hex + " --votes " +
                             (dir / "reveal_votes.csv").string() + " --salt " +
                             crypto::to_hex(other));
    CHECK(bad.exit_code == 4);
    CHECK(bad.out.find("mismatch") != std::string::npos);
}

TEST_CASE("sweep writes per-row and summary tables") {
    const fs::path dir = work_dir();
    write_file(dir / "scenario.cfg", kConfig);
    const auto res = run_cli("sweep --config " + (dir / "scenario.cfg").string() +
                             " --axis beta --values 1.0,2.0 --replicates 2 --out " +
                             (dir / "sweep_out").string());
    REQUIRE(res.exit_code == 0);
    const std::string rows = slurp(dir / "sweep_out" / "sweep.csv");
    CHECK(std::count(rows.begin(), rows.end(), '\n') == 5);  // header + 4 rows
    CHECK(fs::exists(dir / "sweep_out" / "sweep_summary.csv"));
}

TEST_CASE("error categories map to exit codes") {
    // missing file: io = 6
    CHECK(run_cli("simulate --config /nonexistent.cfg --out /tmp/x").exit_code == 6);

    // malformed config: parse = 3
    const fs::path dir = work_dir();
    write_file(dir / "broken.cfg", "not a config\n");
    CHECK(run_cli("simulate --config " + (dir / "broken.cfg").string() + " --out " +
                  (dir / "broken_out").string())
              .exit_code == 3);

    // CLI usage errors are nonzero
    CHECK(run_cli("costs --m 10").exit_code != 0);
}
