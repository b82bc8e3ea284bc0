#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace ptsfd {

// Self-contained xoshiro256** stream. std::random distributions are not
// bit-stable across standard libraries, and all simulation outputs must be
// reproducible from (scenario, seed) alone, so sampling is implemented here.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform on [0, 1) with 53 random bits.
    double next_double();

    // Unbiased uniform on [0, bound).
    std::uint64_t uniform_below(std::uint64_t bound);

    double normal();

    // Marsaglia-Tsang; shape > 0, unit scale.
    double gamma(double shape);

    // Dirichlet draw; switches to log-space gamma sampling when a shape is
    // small enough that plain draws would underflow to zero.
    std::vector<double> dirichlet(std::span<const double> alpha);

    // Index sampled proportionally to probs (need not be normalized).
    std::size_t sample_discrete(std::span<const double> probs);

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = uniform_below(i);
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::array<std::uint64_t, 4> state_;
    double spare_normal_ = 0.0;
    bool has_spare_normal_ = false;
};

// Mixes a root seed, a purpose tag, and an index into an independent
// stream seed. Identical inputs give identical streams everywhere.
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t index = 0);

}  // namespace ptsfd
