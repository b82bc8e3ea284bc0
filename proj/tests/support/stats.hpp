#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace stats {

inline double mean(const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

inline double stderr_of_mean(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double mu = mean(xs);
    double ss = 0.0;
    for (const double x : xs) ss += (x - mu) * (x - mu);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
}

inline std::vector<double> ranks(const std::vector<double>& xs) {
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> rank(xs.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) rank[order[t]] = avg;
        i = j + 1;
    }
    return rank;
}

inline double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double mx = mean(xs), my = mean(ys);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

inline double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    return pearson(ranks(xs), ranks(ys));
}

// Pearson chi-square statistic against expected counts.
inline double chi_square(const std::vector<double>& observed,
                         const std::vector<double>& expected) {
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double d = observed[i] - expected[i];
        stat += d * d / expected[i];
    }
    return stat;
}

// Plug-in mutual information (in bits) of a joint count table.
inline double mutual_information_bits(const std::vector<std::vector<double>>& joint_counts) {
    double total = 0.0;
    for (const auto& row : joint_counts) total += std::accumulate(row.begin(), row.end(), 0.0);
    std::vector<double> px(joint_counts.size(), 0.0);
    std::vector<double> py(joint_counts[0].size(), 0.0);
    for (std::size_t x = 0; x < joint_counts.size(); ++x)
        for (std::size_t y = 0; y < joint_counts[x].size(); ++y) {
            px[x] += joint_counts[x][y] / total;
            py[y] += joint_counts[x][y] / total;
        }
    double mi = 0.0;
    for (std::size_t x = 0; x < joint_counts.size(); ++x)
        for (std::size_t y = 0; y < joint_counts[x].size(); ++y) {
            const double pxy = joint_counts[x][y] / total;
            if (pxy > 0.0) mi += pxy * std::log2(pxy / (px[x] * py[y]));
        }
    return mi;
}

}  // namespace stats
