#include "insitu/filter/filter.hpp"

#include <algorithm>

#include "insitu/core/error.hpp"

namespace insitu::filter {

FilterResult filter_tasks(const std::vector<task::TaskInstance>& tasks, int k, const EncoderSet& encoders,
                          const ClusterConfig& config)
{
    require(k >= 1, "filter k must be >= 1");
    FilterResult r;
    if (tasks.empty()) return r;
    r.similarity = similarity(tasks, encoders);
    const int kk = std::min(k, static_cast<int>(tasks.size()));
    r.clusters = spectral_cluster(r.similarity, kk, config);
    std::vector<std::string> ids;
    ids.reserve(tasks.size());
    for (const auto& t : tasks) ids.push_back(t.id);
    r.representative_indices = select_representatives(ids, r.clusters.labels, r.similarity);
    for (std::size_t i : r.representative_indices) r.representatives.push_back(tasks[i]);
    return r;
}

} // namespace insitu::filter
