#include "ptsfd/rng.hpp"

#include <bit>
#include <cmath>

#include "ptsfd/errors.hpp"

namespace ptsfd {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : s) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& lane : state_) lane = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = std::rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = std::rotl(state_[3], 45);
    return result;
}

double Rng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_below(std::uint64_t bound) {
    if (bound == 0) throw ValidationError("uniform_below: bound must be positive");
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r >= threshold) return r % bound;
    }
}

double Rng::normal() {
    if (has_spare_normal_) {
        has_spare_normal_ = false;
        return spare_normal_;
    }
    double u1;
    do {
        u1 = next_double();
    } while (u1 <= 0.0);
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_normal_ = r * std::sin(theta);
    has_spare_normal_ = true;
    return r * std::cos(theta);
}

double Rng::gamma(double shape) {
    if (!(shape > 0.0)) throw ValidationError("gamma: shape must be > 0");
    if (shape < 1.0) {
        // Boost to shape+1, then scale by U^(1/shape).
        const double g = gamma(shape + 1.0);
        double u;
        do {
            u = next_double();
        } while (u <= 0.0);
        return g * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = next_double();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::vector<double> Rng::dirichlet(std::span<const double> alpha) {
    if (alpha.empty()) throw ValidationError("dirichlet: empty alpha");
    bool tiny = false;
    for (double a : alpha) {
        if (!(a > 0.0)) throw ValidationError("dirichlet: alpha entries must be > 0");
        if (a < 0.25) tiny = true;
    }

    std::vector<double> w(alpha.size());
    if (!tiny) {
        double total = 0.0;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            w[i] = gamma(alpha[i]);
            total += w[i];
        }
        for (double& v : w) v /= total;
        return w;
    }

    // log-gamma draws: log G(a) = log G(a+1) + log(U)/a, normalized by
    // log-sum-exp so extreme small-alpha draws cannot underflow to 0/0.
    std::vector<double> lg(alpha.size());
    double max_lg = -1e300;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        double u;
        do {
            u = next_double();
        } while (u <= 0.0);
        lg[i] = std::log(gamma(alpha[i] + 1.0)) + std::log(u) / alpha[i];
        max_lg = std::max(max_lg, lg[i]);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        w[i] = std::exp(lg[i] - max_lg);
        total += w[i];
    }
    for (double& v : w) v /= total;
    return w;
}

std::size_t Rng::sample_discrete(std::span<const double> probs) {
    double total = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw ValidationError("sample_discrete: negative probability");
        total += p;
    }
    if (!(total > 0.0)) throw ValidationError("sample_discrete: zero mass");
    const double target = next_double() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (target < acc) return i;
    }
    return probs.size() - 1;
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t index) {
    std::uint64_t x = root ^ (fnv1a(tag) + 0x9E3779B97F4A7C15ULL * (index + 1));
    std::uint64_t out = splitmix64(x);
    out ^= splitmix64(x);
    return out;
}

}  // namespace ptsfd
