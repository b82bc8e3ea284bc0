#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ptsfd/rng.hpp"
#include "ptsfd/types.hpp"

namespace ptsfd::datagen {

// Class distribution; validated to be a proper probability vector.
struct ClassPrior {
    std::vector<double> probs;

    void validate() const;
    static ClassPrior uniform(std::uint32_t n_classes);
};

// Per-worker, per-class private sample counts.
struct Partition {
    std::vector<std::vector<std::uint64_t>> per_worker_counts;  // [worker][class]
};

struct PublicDataset {
    std::vector<ClassLabel> true_classes;
    ClassPrior prior;

    std::size_t size() const { return true_classes.size(); }
};

enum class AssignmentMode { Full, KPeers };

struct Assignment {
    std::vector<std::vector<std::uint32_t>> per_sample_workers;  // sorted worker ids
    std::vector<std::vector<std::uint32_t>> per_worker_samples;
};

// Splits each class total across workers with symmetric Dirichlet(alpha)
// shares, rounded by largest remainder so class totals are conserved exactly.
Partition dirichlet_partition(const std::vector<std::uint64_t>& total_counts,
                              std::size_t n_workers, double alpha, Rng& rng);

// m i.i.d. class draws from the prior.
PublicDataset make_public_dataset(std::size_t m, const ClassPrior& prior, Rng& rng);

// Full: every worker classifies every sample. KPeers(k): each sample gets
// exactly k distinct workers and per-worker loads differ by at most one.
Assignment assign_samples(std::size_t m, std::size_t n_workers, AssignmentMode mode,
                          std::size_t k, Rng& rng);

// Reproducibility record for a generated dataset.
std::string dataset_manifest(std::uint64_t seed, const ClassPrior& public_prior,
                             const ClassPrior& private_prior, double alpha,
                             AssignmentMode mode, std::size_t k, std::size_t m,
                             std::size_t n_workers);

}  // namespace ptsfd::datagen
