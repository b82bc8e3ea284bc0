#include "ptsfd/ledger.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ptsfd::ledger {

const char* to_string(Phase p) {
    switch (p) {
        case Phase::Setup: return "setup";
        case Phase::Commit: return "commit";
        case Phase::Reveal: return "reveal";
        case Phase::Settle: return "settle";
        case Phase::Closed: return "closed";
    }
    return "?";
}

const char* to_string(WorkerStatus s) {
    switch (s) {
        case WorkerStatus::Registered: return "registered";
        case WorkerStatus::Committed: return "committed";
        case WorkerStatus::Revealed: return "revealed";
        case WorkerStatus::Slashed: return "slashed";
        case WorkerStatus::Settled: return "settled";
    }
    return "?";
}

const char* to_string(TxError e) {
    switch (e) {
        case TxError::None: return "ok";
        case TxError::NotInRoster: return "not-in-roster";
        case TxError::DepositMismatch: return "deposit-mismatch";
        case TxError::AlreadyRegistered: return "already-registered";
        case TxError::NotRegistered: return "not-registered";
        case TxError::WrongPhase: return "wrong-phase";
        case TxError::AlreadyCommitted: return "already-committed";
        case TxError::NotCommitted: return "not-committed";
        case TxError::AlreadyRevealed: return "already-revealed";
        case TxError::HashMismatch: return "hash-mismatch";
        case TxError::RevealForfeited: return "reveal-forfeited";
        case TxError::MalformedPayload: return "malformed-payload";
        case TxError::Closed: return "closed";
    }
    return "?";
}

void LedgerConfig::validate() const {
    if (roster.empty()) throw ValidationError("ledger roster is empty");
    if (required_deposit < 0) throw ValidationError("required deposit must be >= 0");
    if (t_max_reveal <= t_max_commit)
        throw ValidationError("t_max_reveal must exceed t_max_commit");
    if (m_samples == 0) throw ValidationError("m_samples must be >= 1");
    if (n_classes == 0 || n_classes > kMaxClasses)
        throw ValidationError("n_classes out of range");
}

Ledger::Ledger(LedgerConfig config) : config_(std::move(config)) {
    config_.validate();
}

const WorkerAccount* Ledger::account(const std::string& address) const {
    const auto it = accounts_.find(address);
    return it == accounts_.end() ? nullptr : &it->second;
}

void Ledger::log_tx(const std::string& op, const std::string& address,
                    const std::string& digest) {
    log_.push_back(std::to_string(tick_) + "," + op + "," + address + "," + digest);
}

void Ledger::maybe_short_circuit() {
    if (phase_ == Phase::Commit && n_committed_ == accounts_.size() && !accounts_.empty()) {
        phase_ = Phase::Reveal;
        log_tx("phase", "-", "reveal");
    } else if (phase_ == Phase::Reveal && n_revealed_ == n_committed_) {
        phase_ = Phase::Settle;
        log_tx("phase", "-", "settle");
    }
}

TxResult Ledger::register_worker(const std::string& address, std::int64_t deposit) {
    const bool phase_ok =
        phase_ == Phase::Setup || (phase_ == Phase::Commit && config_.allow_register_in_commit);
    if (!phase_ok) return {TxError::WrongPhase};
    if (!config_.roster.contains(address)) return {TxError::NotInRoster};
    if (deposit != config_.required_deposit) return {TxError::DepositMismatch};
    if (accounts_.contains(address)) return {TxError::AlreadyRegistered};

    WorkerAccount acct;
    acct.address = address;
    acct.deposit = deposit;
    accounts_.emplace(address, std::move(acct));
    registration_order_.push_back(address);
    pool_ += deposit;
    log_tx("register", address, std::to_string(deposit));
    return {};
}

TxResult Ledger::open_commit() {
    if (phase_ != Phase::Setup) return {TxError::WrongPhase};
    if (accounts_.empty()) return {TxError::NotRegistered};
    phase_ = Phase::Commit;
    log_tx("phase", "-", "commit");
    return {};
}

TxResult Ledger::commit(const std::string& address, const crypto::Digest256& hash) {
    if (phase_ != Phase::Commit) return {TxError::WrongPhase};
    const auto it = accounts_.find(address);
    if (it == accounts_.end()) return {TxError::NotRegistered};
    if (it->second.status != WorkerStatus::Registered) return {TxError::AlreadyCommitted};

    it->second.commitment = Commitment{hash, tick_};
    it->second.status = WorkerStatus::Committed;
    ++n_committed_;
    log_tx("commit", address, crypto::to_hex({hash.data(), 8}));
    maybe_short_circuit();
    return {};
}

TxResult Ledger::reveal(const std::string& address, std::span<const Vote> votes,
                        const LabelCount& label_count, const Salt& salt) {
    if (phase_ != Phase::Reveal) return {TxError::WrongPhase};
    const auto it = accounts_.find(address);
    if (it == accounts_.end()) return {TxError::NotRegistered};
    WorkerAccount& acct = it->second;
    if (acct.status == WorkerStatus::Revealed) return {TxError::AlreadyRevealed};
    if (acct.status != WorkerStatus::Committed) return {TxError::NotCommitted};
    if (acct.reveal_forfeited) return {TxError::RevealForfeited};
    if (votes.size() != config_.m_samples || label_count.size() != config_.n_classes)
        return {TxError::MalformedPayload};
    for (const Vote v : votes)
        if (!v.is_abstain() && v.value() >= config_.n_classes)
            return {TxError::MalformedPayload};

    const crypto::Digest256 digest = commitment_hash(votes, label_count, salt);
    if (digest != acct.commitment->hash) {
        // Binding: retrying with other payloads would allow brute-force
        // probing, so one tampered reveal forfeits the slot for good.
        acct.reveal_forfeited = true;
        log_tx("reveal-rejected", address, crypto::to_hex({digest.data(), 8}));
        return {TxError::HashMismatch};
    }

    acct.revealed_votes.assign(votes.begin(), votes.end());
    acct.revealed_counts = label_count;
    acct.count_mismatch =
        mechanism::label_count(votes, config_.n_classes) != label_count;
    acct.status = WorkerStatus::Revealed;
    ++n_revealed_;
    log_tx("reveal", address, crypto::to_hex({digest.data(), 8}));
    maybe_short_circuit();
    return {};
}

TxResult Ledger::advance_tick() {
    if (phase_ == Phase::Closed) return {TxError::Closed};
    ++tick_;
    if (phase_ == Phase::Commit && tick_ >= config_.t_max_commit) {
        phase_ = Phase::Reveal;
        log_tx("phase", "-", "reveal");
    }
    if (phase_ == Phase::Reveal && tick_ >= config_.t_max_reveal) {
        phase_ = Phase::Settle;
        log_tx("phase", "-", "settle");
    }
    return {};
}

SettlementReport Ledger::finalize(const MechanismParams& params) {
    if (phase_ != Phase::Settle)
        throw LedgerError("finalize requires the settle phase (current: " +
                          std::string(to_string(phase_)) + ")");

    SettlementReport report;
    report.pool_in = pool_;

    // Slash committed workers that never produced a valid reveal, and
    // revealed workers whose labelCount was falsified.
    std::vector<std::string> revealed_ok;
    for (const std::string& address : registration_order_) {
        WorkerAccount& acct = accounts_.at(address);
        if (acct.status == WorkerStatus::Committed ||
            (acct.status == WorkerStatus::Revealed && acct.count_mismatch)) {
            acct.status = WorkerStatus::Slashed;
            report.slashed.insert(address);
            report.payouts[address] = 0;
            log_tx("slash", address, acct.count_mismatch ? "count-mismatch" : "no-reveal");
        } else if (acct.status == WorkerStatus::Revealed) {
            revealed_ok.push_back(address);
        }
    }

    if (revealed_ok.size() < 2) {
        // Federation failure: nothing to aggregate against. Refund everyone
        // that did not violate the protocol.
        report.outcome = SettlementOutcome::FederationFailure;
        for (const std::string& address : registration_order_) {
            WorkerAccount& acct = accounts_.at(address);
            if (acct.status == WorkerStatus::Slashed) continue;
            report.payouts[address] = acct.deposit;
            acct.status = WorkerStatus::Settled;
        }
        for (const auto& [address, v] : report.payouts) report.pool_out += v;
        report.retained = report.pool_in - report.pool_out;
        phase_ = Phase::Closed;
        log_tx("finalize", "-", "federation-failure");
        return report;
    }

    // PTSFD over the revealed workers, in registration order.
    VoteMatrix votes(revealed_ok.size(), config_.m_samples);
    std::vector<LabelCount> counts;
    counts.reserve(revealed_ok.size());
    for (std::size_t i = 0; i < revealed_ok.size(); ++i) {
        const WorkerAccount& acct = accounts_.at(revealed_ok[i]);
        votes.set_row(i, acct.revealed_votes);
        counts.push_back(acct.revealed_counts);
    }
    report.revealed_order = revealed_ok;
    report.mechanism_report = mechanism::ptsfd(votes, counts, params);

    // Payouts: V_i = max(0, D_i + round(s * (tau_i - mean))) over revealed
    // workers. Gains are additionally capped by realized losses so the pool
    // can never pay out more than it holds.
    const auto& scores = report.mechanism_report.reward_scores;
    const double mean =
        std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());

    std::vector<std::int64_t> payout(revealed_ok.size());
    std::int64_t losses = 0;
    std::int64_t gains = 0;
    for (std::size_t i = 0; i < revealed_ok.size(); ++i) {
        const std::int64_t d = accounts_.at(revealed_ok[i]).deposit;
        const std::int64_t delta =
            std::llround(config_.settlement_scale * (scores[i] - mean));
        payout[i] = std::max<std::int64_t>(0, d + delta);
        if (payout[i] > d)
            gains += payout[i] - d;
        else
            losses += d - payout[i];
    }
    if (gains > losses) {
        for (std::size_t i = 0; i < revealed_ok.size(); ++i) {
            const std::int64_t d = accounts_.at(revealed_ok[i]).deposit;
            if (payout[i] > d) {
                const std::int64_t g = payout[i] - d;
                payout[i] = d + g * losses / gains;
            }
        }
    }

    for (std::size_t i = 0; i < revealed_ok.size(); ++i) {
        WorkerAccount& acct = accounts_.at(revealed_ok[i]);
        report.payouts[acct.address] = payout[i];
        acct.status = WorkerStatus::Settled;
        log_tx("payout", acct.address, std::to_string(payout[i]));
    }
    // Registered workers that never committed broke no rule; refund them.
    for (const std::string& address : registration_order_) {
        WorkerAccount& acct = accounts_.at(address);
        if (acct.status == WorkerStatus::Registered) {
            report.payouts[address] = acct.deposit;
            acct.status = WorkerStatus::Settled;
            log_tx("refund", address, std::to_string(acct.deposit));
        }
    }

    for (const auto& [address, v] : report.payouts) report.pool_out += v;
    report.retained = report.pool_in - report.pool_out;
    phase_ = Phase::Closed;
    log_tx("finalize", "-", "settled");
    return report;
}

}  // namespace ptsfd::ledger
