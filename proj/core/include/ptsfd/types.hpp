#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ptsfd/errors.hpp"

namespace ptsfd {

// Class index into the task's class set C. Votes are wire-encoded as
// 16-bit integers, so |C| is capped at 65534 (0xFFFF marks abstention).
using ClassLabel = std::uint16_t;

inline constexpr std::uint32_t kMaxClasses = 0xFFFE;

// A worker's 1-bit-quantized prediction on one sample: a class label or
// an explicit abstention (the NULL entries of the reward algorithm).
class Vote {
public:
    static constexpr std::uint16_t kAbstainRaw = 0xFFFF;

    constexpr Vote() = default;  // abstain

    static constexpr Vote abstain() { return Vote{}; }
    static constexpr Vote label(ClassLabel c) {
        Vote v;
        v.raw_ = c;
        return v;
    }

    constexpr bool is_abstain() const { return raw_ == kAbstainRaw; }
    constexpr ClassLabel value() const { return raw_; }  // only when !is_abstain()
    constexpr std::uint16_t raw() const { return raw_; }

    friend constexpr bool operator==(Vote a, Vote b) = default;

private:
    std::uint16_t raw_ = kAbstainRaw;
};

// Soft classifier output: |C| non-negative scores summing to 1.
using SoftPrediction = std::vector<double>;

// counts[c] = occurrences of class c among a worker's non-abstain votes.
using LabelCount = std::vector<std::uint32_t>;

// Row-major n_workers x m_samples grid of votes.
class VoteMatrix {
public:
    VoteMatrix() = default;
    VoteMatrix(std::size_t n_workers, std::size_t m_samples)
        : n_(n_workers), m_(m_samples), cells_(n_workers * m_samples) {}

    std::size_t n_workers() const { return n_; }
    std::size_t m_samples() const { return m_; }

    Vote at(std::size_t worker, std::size_t sample) const {
        return cells_[worker * m_ + sample];
    }
    void set(std::size_t worker, std::size_t sample, Vote v) {
        cells_[worker * m_ + sample] = v;
    }
    std::span<const Vote> row(std::size_t worker) const {
        return {cells_.data() + worker * m_, m_};
    }
    void set_row(std::size_t worker, std::span<const Vote> votes) {
        if (votes.size() != m_) throw ValidationError("vote row has wrong length");
        std::copy(votes.begin(), votes.end(), cells_.begin() + worker * m_);
    }

    friend bool operator==(const VoteMatrix& a, const VoteMatrix& b) = default;

private:
    std::size_t n_ = 0;
    std::size_t m_ = 0;
    std::vector<Vote> cells_;
};

// Reward and aggregation configuration shared by all workers.
struct MechanismParams {
    double lambda = 1.0;       // reward scale
    double beta = 1.0;         // penalty term
    std::uint32_t n_classes = 0;

    void validate() const {
        if (!(lambda > 0.0)) throw ValidationError("lambda must be > 0");
        if (beta < 0.0) throw ValidationError("beta must be >= 0");
        if (n_classes == 0 || n_classes > kMaxClasses)
            throw ValidationError("n_classes out of range");
    }
};

// Discrete class density; rows of R and R_i live here.
using PeerDensity = std::vector<double>;

}  // namespace ptsfd
