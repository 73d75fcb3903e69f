#pragma once

#include "insitu/filter/cluster.hpp"

namespace insitu::filter {

struct FilterResult {
    SimilarityMatrix similarity;
    ClusterResult clusters;
    std::vector<std::size_t> representative_indices;
    std::vector<task::TaskInstance> representatives;
};

/**
 * Similarity, spectral clustering into min(k, n) clusters and one medoid per
 * cluster. An empty task list gives an empty result. Throws
 * Errc::precondition when k < 1.
 */
FilterResult filter_tasks(const std::vector<task::TaskInstance>& tasks, int k, const EncoderSet& encoders,
                          const ClusterConfig& config = {});

} // namespace insitu::filter
