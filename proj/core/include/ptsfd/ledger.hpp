#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ptsfd/encoding.hpp"
#include "ptsfd/mechanism.hpp"
#include "ptsfd/types.hpp"

namespace ptsfd::ledger {

enum class Phase { Setup, Commit, Reveal, Settle, Closed };

enum class WorkerStatus { Registered, Committed, Revealed, Slashed, Settled };

const char* to_string(Phase p);
const char* to_string(WorkerStatus s);

// Rejection causes for ledger transactions. None = accepted.
enum class TxError {
    None,
    NotInRoster,
    DepositMismatch,
    AlreadyRegistered,
    NotRegistered,
    WrongPhase,
    AlreadyCommitted,
    NotCommitted,
    AlreadyRevealed,
    HashMismatch,      // tampered reveal; terminal for the worker
    RevealForfeited,   // retry after a tampered reveal
    MalformedPayload,
    Closed,
};

const char* to_string(TxError e);

struct TxResult {
    TxError error = TxError::None;
    bool ok() const { return error == TxError::None; }
};

struct Commitment {
    crypto::Digest256 hash{};
    std::uint64_t submitted_at = 0;
};

struct WorkerAccount {
    std::string address;
    std::int64_t deposit = 0;
    WorkerStatus status = WorkerStatus::Registered;
    std::optional<Commitment> commitment;
    std::vector<Vote> revealed_votes;
    LabelCount revealed_counts;
    bool reveal_forfeited = false;  // hash mismatch seen; no retries
    bool count_mismatch = false;    // slashable: falsified labelCount
};

enum class SettlementOutcome { Settled, FederationFailure };

struct SettlementReport {
    SettlementOutcome outcome = SettlementOutcome::Settled;
    std::map<std::string, std::int64_t> payouts;  // V_i, zero for slashed
    std::set<std::string> slashed;
    std::int64_t pool_in = 0;    // sum of all deposits
    std::int64_t pool_out = 0;   // sum of all payouts
    std::int64_t retained = 0;   // pool_in - pool_out (burned/carried)
    std::vector<std::string> revealed_order;      // worker order of the report below
    mechanism::RewardReport mechanism_report;     // over revealed workers only
};

struct LedgerConfig {
    std::set<std::string> roster;
    std::int64_t required_deposit = 0;
    std::uint64_t t_max_commit = 64;
    std::uint64_t t_max_reveal = 128;   // absolute tick deadlines, reveal after commit
    std::size_t m_samples = 0;
    std::uint32_t n_classes = 0;
    bool allow_register_in_commit = false;
    // Settlement scale s: payout V_i = max(0, D_i + round(s * (tau_i - mean))).
    double settlement_scale = 1.0;

    void validate() const;
};

// Deterministic replica of the governing contract. Transactions are applied
// strictly in submission order; a rejected transaction changes nothing
// except (for hash-mismatched reveals) the forfeiture flag.
class Ledger {
public:
    explicit Ledger(LedgerConfig config);

    TxResult register_worker(const std::string& address, std::int64_t deposit);
    TxResult open_commit();
    TxResult commit(const std::string& address, const crypto::Digest256& hash);
    TxResult reveal(const std::string& address, std::span<const Vote> votes,
                    const LabelCount& label_count, const Salt& salt);
    TxResult advance_tick();

    // Runs slashing, PTSFD and payout settlement; transitions to Closed.
    // Fewer than two revealed workers aborts with full refunds to the
    // workers that did reveal (and to registered non-committers).
    SettlementReport finalize(const MechanismParams& params);

    Phase phase() const { return phase_; }
    std::uint64_t tick() const { return tick_; }
    std::int64_t pool() const { return pool_; }
    const LedgerConfig& config() const { return config_; }
    const WorkerAccount* account(const std::string& address) const;
    std::size_t n_registered() const { return accounts_.size(); }
    std::size_t n_committed() const { return n_committed_; }
    std::size_t n_revealed() const { return n_revealed_; }

    // Audit trail: one "tick,op,address,args-digest" line per accepted
    // state-changing transaction.
    const std::vector<std::string>& transaction_log() const { return log_; }

private:
    void log_tx(const std::string& op, const std::string& address, const std::string& digest);
    void maybe_short_circuit();

    LedgerConfig config_;
    Phase phase_ = Phase::Setup;
    std::uint64_t tick_ = 0;
    std::int64_t pool_ = 0;
    std::map<std::string, WorkerAccount> accounts_;
    std::vector<std::string> registration_order_;
    std::size_t n_committed_ = 0;
    std::size_t n_revealed_ = 0;
    std::vector<std::string> log_;
};

}  // namespace ptsfd::ledger
