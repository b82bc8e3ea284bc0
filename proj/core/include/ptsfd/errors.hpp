#pragma once

#include <stdexcept>
#include <string>

namespace ptsfd {

// Error categories double as CLI exit codes (0 = success, 1 = unclassified).
enum class ErrorCategory : int {
    validation = 2,    // malformed values, broken preconditions
    parse = 3,         // unreadable config / CSV / JSON input
    verification = 4,  // commitment or reveal check failed
    degenerate = 5,    // zero-density / empty-peer-set conditions
    io = 6,            // filesystem failures
    ledger = 7,        // rejected transactions, federation failure
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const { return category_; }
    int exit_code() const { return static_cast<int>(category_); }

private:
    ErrorCategory category_;
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& what)
        : Error(ErrorCategory::validation, what) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& what)
        : Error(ErrorCategory::parse, what) {}
};

struct VerificationError : Error {
    explicit VerificationError(const std::string& what)
        : Error(ErrorCategory::verification, what) {}
};

// All peers abstained: the excluded label distribution has no mass.
struct DegeneratePeerSetError : Error {
    explicit DegeneratePeerSetError(const std::string& what)
        : Error(ErrorCategory::degenerate, what) {}
};

// A density that a formula divides by is zero.
struct UndefinedDensityError : Error {
    explicit UndefinedDensityError(const std::string& what)
        : Error(ErrorCategory::degenerate, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what)
        : Error(ErrorCategory::io, what) {}
};

struct LedgerError : Error {
    explicit LedgerError(const std::string& what)
        : Error(ErrorCategory::ledger, what) {}
};

// A revealed labelCount does not match the counts recomputed from the votes.
// Identifies the offending worker so the ledger can slash it.
struct CountMismatchError : Error {
    CountMismatchError(std::size_t worker, const std::string& what)
        : Error(ErrorCategory::validation, what), worker_index(worker) {}

    std::size_t worker_index;
};

struct EncodingRangeError : Error {
    explicit EncodingRangeError(const std::string& what)
        : Error(ErrorCategory::validation, what) {}
};

struct UnvotedSampleError : Error {
    UnvotedSampleError(std::size_t sample, const std::string& what)
        : Error(ErrorCategory::validation, what), sample_index(sample) {}

    std::size_t sample_index;
};

}  // namespace ptsfd
