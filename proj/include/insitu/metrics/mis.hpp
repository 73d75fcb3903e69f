#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "insitu/filter/similarity.hpp"

namespace insitu::metrics {

inline constexpr double kDefaultAlpha = 0.8;
/// Largest task count searched exactly unless forced.
inline constexpr std::size_t kExactLimit = 64;

struct MISResult {
    std::vector<std::size_t> subset; ///< ascending task indices
    std::size_t size = 0;
    bool exact = false;
    double alpha = kDefaultAlpha;
};

struct MisOptions {
    std::size_t exact_limit = kExactLimit;
    bool force_exact = false;
    /// Branch-and-bound nodes before giving up and falling back to greedy;
    /// 0 means no limit.
    std::uint64_t node_budget = 0;
};

/// Conflict graph adjacency: i and j conflict when S_ij > alpha.
std::vector<std::vector<bool>> conflict_graph(const filter::SimilarityMatrix& s, double alpha);

/**
 * Largest subset whose pairwise similarities are all <= alpha. Up to
 * `exact_limit` tasks (or always, when forced) a branch-and-bound search
 * with a clique-cover bound returns a maximum set, and the witness is the
 * lexicographically least one. Above the limit, or when the node budget
 * runs out, a greedy pass repeatedly takes the task with the fewest
 * remaining conflicts (exact = false).
 * Throws Errc::precondition unless 0 < alpha < 1.
 */
MISResult mis(const filter::SimilarityMatrix& s, double alpha = kDefaultAlpha, const MisOptions& options = {});

/// The greedy heuristic alone.
MISResult mis_greedy(const filter::SimilarityMatrix& s, double alpha = kDefaultAlpha);

/// Size of a maximum independent set of an explicit conflict graph.
std::size_t max_independent_set_size(const std::vector<std::vector<bool>>& conflicts);

/// Principal submatrix on `idx`, in the given order.
filter::SimilarityMatrix submatrix(const filter::SimilarityMatrix& s, const std::vector<std::size_t>& idx);

struct MirResult {
    std::size_t mis_size = 0;
    std::size_t total = 0;
    bool exact = false;
    double value() const noexcept { return static_cast<double>(mis_size) / static_cast<double>(total); }
    /// "0.62 (53/86)"
    std::string display(int decimals = 2) const;
};

/// |MIS| / n as an exact pair of counts. Throws Errc::empty_task_set when n = 0.
MirResult mir(const filter::SimilarityMatrix& s, double alpha = kDefaultAlpha, const MisOptions& options = {});
/// Ratio from known counts (for tables); same errors.
MirResult mir_from_counts(std::size_t mis_size, std::size_t total);

struct MirEResult {
    std::size_t mis_union = 0;
    std::size_t mis_initial = 0;
    std::size_t mis_evolve = 0;
    double value = 0.0;
    bool clamped = false; ///< numerator was negative and was set to 0
    bool exact = false;
    std::vector<std::string> notes;
};

/**
 * (|MIS(initial + evolve)| - |MIS(initial)|) / |MIS(evolve)| over a joint
 * similarity matrix. Throws Errc::precondition when the index sets overlap
 * or fall outside the matrix, Errc::empty_evolved_set when |MIS(evolve)| = 0.
 */
MirEResult mir_e(const filter::SimilarityMatrix& joint, const std::vector<std::size_t>& initial,
                 const std::vector<std::size_t>& evolve, double alpha = kDefaultAlpha, const MisOptions& options = {});

} // namespace insitu::metrics
