#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "insitu/filter/similarity.hpp"

namespace insitu::filter {

struct ClusterConfig {
    std::uint64_t seed = 0;
    int restarts = 8;
    int max_iterations = 100;
};

struct ClusterResult {
    std::vector<int> labels;      ///< cluster of each task, in [0, k)
    int k = 0;
    std::vector<std::size_t> degenerate; ///< tasks with no positive affinity to any other task
    std::vector<std::string> notes;
};

/**
 * Spectral clustering: affinity clamp(S, 0, 1), symmetric normalized
 * Laplacian, the k eigenvectors of smallest eigenvalue with rows scaled to
 * unit length, then k-means++ with seeded restarts (best inertia kept).
 * Tasks whose affinity to every other task is zero get clusters of their
 * own while k allows. Labels are renumbered in order of first appearance.
 * Throws Errc::precondition unless 1 <= k <= n.
 */
ClusterResult spectral_cluster(const SimilarityMatrix& s, int k, const ClusterConfig& config = {});

/// Lloyd iterations from k-means++ seeding; returns labels, writes inertia.
std::vector<int> kmeans(const std::vector<std::vector<double>>& points, int k, std::uint64_t seed, int restarts,
                        int max_iterations, double* inertia = nullptr);

/**
 * One representative per cluster, in cluster order: the member with the
 * highest mean similarity to the other members (a singleton is its own
 * representative). Ties go to the member whose id sorts first.
 */
std::vector<std::size_t> select_representatives(const std::vector<std::string>& ids, const std::vector<int>& labels,
                                                 const SimilarityMatrix& s);

} // namespace insitu::filter
