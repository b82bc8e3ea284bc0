#include "ptsfd/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ptsfd::datagen {

void ClassPrior::validate() const {
    if (probs.empty() || probs.size() > kMaxClasses)
        throw ValidationError("class prior has invalid length");
    double total = 0.0;
    for (double p : probs) {
        if (p < 0.0 || !std::isfinite(p)) throw ValidationError("class prior entry < 0");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ValidationError("class prior does not sum to 1");
}

ClassPrior ClassPrior::uniform(std::uint32_t n_classes) {
    if (n_classes == 0) throw ValidationError("uniform prior needs >= 1 class");
    return {std::vector<double>(n_classes, 1.0 / n_classes)};
}

Partition dirichlet_partition(const std::vector<std::uint64_t>& total_counts,
                              std::size_t n_workers, double alpha, Rng& rng) {
    if (!(alpha > 0.0)) throw ValidationError("dirichlet alpha must be > 0");
    if (n_workers == 0) throw ValidationError("partition needs >= 1 worker");
    if (total_counts.empty()) throw ValidationError("partition needs >= 1 class");

    Partition part;
    part.per_worker_counts.assign(n_workers, std::vector<std::uint64_t>(total_counts.size(), 0));

    const std::vector<double> sym_alpha(n_workers, alpha);
    for (std::size_t c = 0; c < total_counts.size(); ++c) {
        const std::uint64_t total = total_counts[c];
        if (total == 0) continue;
        const std::vector<double> shares = rng.dirichlet(sym_alpha);

        // largest-remainder rounding, ties to the lower worker index
        std::vector<std::uint64_t> base(n_workers);
        std::vector<std::pair<double, std::size_t>> remainders(n_workers);
        std::uint64_t assigned = 0;
        for (std::size_t w = 0; w < n_workers; ++w) {
            const double exact = shares[w] * static_cast<double>(total);
            base[w] = static_cast<std::uint64_t>(std::floor(exact));
            remainders[w] = {exact - std::floor(exact), w};
            assigned += base[w];
        }
        std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (std::uint64_t r = 0; r < total - assigned; ++r)
            ++base[remainders[r % n_workers].second];
        for (std::size_t w = 0; w < n_workers; ++w) part.per_worker_counts[w][c] = base[w];
    }
    return part;
}

PublicDataset make_public_dataset(std::size_t m, const ClassPrior& prior, Rng& rng) {
    if (m == 0) throw ValidationError("public dataset must have m >= 1");
    prior.validate();
    PublicDataset ds;
    ds.prior = prior;
    ds.true_classes.resize(m);
    for (std::size_t j = 0; j < m; ++j)
        ds.true_classes[j] = static_cast<ClassLabel>(rng.sample_discrete(prior.probs));
    return ds;
}

Assignment assign_samples(std::size_t m, std::size_t n_workers, AssignmentMode mode,
                          std::size_t k, Rng& rng) {
    if (m == 0 || n_workers == 0) throw ValidationError("assignment needs m, n >= 1");
    Assignment out;
    out.per_sample_workers.resize(m);
    out.per_worker_samples.resize(n_workers);

    if (mode == AssignmentMode::Full) {
        std::vector<std::uint32_t> everyone(n_workers);
        std::iota(everyone.begin(), everyone.end(), 0);
        for (std::size_t j = 0; j < m; ++j) out.per_sample_workers[j] = everyone;
        for (std::size_t w = 0; w < n_workers; ++w) {
            out.per_worker_samples[w].resize(m);
            std::iota(out.per_worker_samples[w].begin(), out.per_worker_samples[w].end(), 0);
        }
        return out;
    }

    if (k < 2)
        throw ValidationError("KPeers assignment needs k >= 2: a lone vote has no peer");
    if (k > n_workers) throw ValidationError("KPeers assignment needs k <= n_workers");

    // Walk a shuffled worker cycle k slots per sample: consecutive window
    // entries are distinct and every worker appears once per n slots, so
    // loads differ by at most one.
    std::vector<std::uint32_t> cycle(n_workers);
    std::iota(cycle.begin(), cycle.end(), 0);
    rng.shuffle(cycle);
    std::size_t cursor = 0;
    for (std::size_t j = 0; j < m; ++j) {
        auto& workers = out.per_sample_workers[j];
        workers.reserve(k);
        for (std::size_t t = 0; t < k; ++t)
            workers.push_back(cycle[(cursor + t) % n_workers]);
        cursor += k;
        std::sort(workers.begin(), workers.end());
        for (const std::uint32_t w : workers)
            out.per_worker_samples[w].push_back(static_cast<std::uint32_t>(j));
    }
    return out;
}

std::string dataset_manifest(std::uint64_t seed, const ClassPrior& public_prior,
                             const ClassPrior& private_prior, double alpha,
                             AssignmentMode mode, std::size_t k, std::size_t m,
                             std::size_t n_workers) {
    std::ostringstream os;
    os.precision(17);
    os << "seed=" << seed << "\n";
    os << "m=" << m << "\n";
    os << "n_workers=" << n_workers << "\n";
    os << "alpha=" << alpha << "\n";
    os << "assignment=" << (mode == AssignmentMode::Full ? "full" : "kpeers:" + std::to_string(k))
       << "\n";
    os << "public_prior=";
    for (std::size_t c = 0; c < public_prior.probs.size(); ++c)
        os << (c ? "," : "") << public_prior.probs[c];
    os << "\n";
    os << "private_prior=";
    for (std::size_t c = 0; c < private_prior.probs.size(); ++c)
        os << (c ? "," : "") << private_prior.probs[c];
    os << "\n";
    return os.str();
}

}  // namespace ptsfd::datagen
