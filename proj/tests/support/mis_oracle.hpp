#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "insitu/core/rng.hpp"
#include "insitu/filter/similarity.hpp"

namespace oracle {

/// Largest subset with every pairwise similarity <= alpha, by enumerating all 2^n subsets.
inline std::size_t mis_bruteforce(const insitu::filter::SimilarityMatrix& s, double alpha)
{
    const std::size_t n = s.n;
    std::vector<std::uint32_t> bad(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && s(i, j) > alpha) bad[i] |= 1u << j;
        }
    }
    std::size_t best = 0;
    for (std::uint32_t m = 0; m < (1u << n); ++m) {
        const std::size_t c = static_cast<std::size_t>(std::popcount(m));
        if (c <= best) continue;
        bool ok = true;
        for (std::uint32_t r = m; r && ok; r &= r - 1) ok = (bad[std::countr_zero(r)] & m) == 0;
        if (ok) best = c;
    }
    return best;
}

/// Symmetric unit-diagonal matrix; entries spread over [-1, 1] with a
/// cluster of values near each threshold so ties and near-ties occur.
inline insitu::filter::SimilarityMatrix random_similarity(std::size_t n, insitu::Rng& rng)
{
    std::vector<std::vector<double>> rows(n, std::vector<double>(n, 1.0));
    static constexpr double kNear[] = {0.5, 0.8, 0.9};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double v = rng.uniform(-1.0, 1.0);
            if (rng.bernoulli(0.3)) v = kNear[rng.below(3)] + rng.uniform(-0.02, 0.02);
            rows[i][j] = rows[j][i] = v;
        }
    }
    return insitu::filter::SimilarityMatrix::from_rows(rows);
}

} // namespace oracle
