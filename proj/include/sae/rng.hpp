#pragma once

#include <cstdint>
#include <random>

#include "sae/linalg.hpp"

namespace sae {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of the independent stream used by trial `index` of a run seeded with `master`.
constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) { return splitmix64(master + index); }

/// Matrix with i.i.d. N(0, stddev^2) entries, filled column by column.
inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double stddev = 1.0) {
    std::normal_distribution<double> dist(0.0, stddev);
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
    return m;
}

}  // namespace sae
