#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "insitu/task/task.hpp"

namespace insitu::task {

/// Injective vertex mapping from a pattern graph into a host graph.
using VertexMapping = std::map<VertexId, VertexId>;

struct MatchOptions {
    std::size_t node_limit = 32; ///< either graph above this throws SearchBudgetExceeded
    std::size_t max_results = static_cast<std::size_t>(-1);
    /// Exact mode requires equal slot-name sets and edge counts, turning the
    /// search into an isomorphism test when vertex counts match.
    bool exact = false;
};

/**
 * All injective mappings of `pattern` into `host` that preserve semantic
 * type, slot names (subset, or equality in exact mode), edge endpoints,
 * relation kinds and edge slot names. Attribute values are ignored.
 * Mappings are returned in lexicographic order of the host ids assigned to
 * the pattern's vertices, taken in pattern id order.
 */
std::vector<VertexMapping> substructure_mappings(const TaskGraph& pattern, const TaskGraph& host,
                                                 const MatchOptions& options = {});

/// pattern ⪯ host.
bool is_substructure(const TaskGraph& pattern, const TaskGraph& host, const MatchOptions& options = {});

bool isomorphic(const TaskGraph& a, const TaskGraph& b, std::size_t node_limit = 32);

/**
 * Task-level structure: the final graph with every slot name tagged by
 * whether it is given ("in:") or added by the final state ("out:").
 */
TaskGraph annotated_structure(const Task& t);

/// Tasks match when their annotated structures are isomorphic.
bool tasks_isomorphic(const Task& a, const Task& b);

} // namespace insitu::task
