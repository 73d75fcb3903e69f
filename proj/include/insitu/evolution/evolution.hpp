#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "insitu/filter/encoders.hpp"
#include "insitu/sim/scene.hpp"
#include "insitu/task/task.hpp"

namespace insitu::evolution {

/// Slot names that may be exchanged between same-typed vertices.
using SlotPair = std::pair<std::string, std::string>;

/// The rule set beta.
struct EvolutionRules {
    bool reuse = true;
    bool recombination = true;
    std::vector<SlotPair> exchangeable{{"label", "image_ref"}, {"position", "bbox3d"}};
    /// Instances of other types are never emitted.
    std::set<task::TaskType> enabled_types{task::kGeneratedTaskTypes.begin(), task::kGeneratedTaskTypes.end()};
    std::size_t budget = 5000; ///< new instances per call
};

/**
 * Reuse: for every source whose final graph contains the template's final
 * graph (target ⪯ source), one instance per mapping, bound to the mapped
 * entities and grounded against the source's observation so ground truth is
 * recomputed. Sources that fail grounding are skipped. Results carry
 * Source::reuse and are unique by (type, binding, record).
 */
std::vector<task::TaskInstance> reuse(const task::Task& target_template, const std::vector<task::TaskInstance>& sources,
                                      const sim::Scene& scene, const filter::RecordLookup& lookup = {});

/**
 * Recombination: for each pair of same-typed vertices (one in a, one in b)
 * whose given slots differ, a copy of a in which a given slot of a's vertex
 * is exchanged for its whitelisted partner found on b's vertex (and the
 * same with the roles swapped). Exchanges that would collide with an
 * existing slot are skipped. Outputs isomorphic to a parent or to each
 * other are dropped. Structurally equal parents give an empty set; parents
 * with no same-typed vertex pair whose slots differ throw
 * Errc::no_exchangeable_vertices.
 */
std::vector<task::Task> recombine(const task::Task& a, const task::Task& b, const EvolutionRules& rules = {});

struct EvolveResult {
    std::vector<task::TaskInstance> instances; ///< new instances only
    std::vector<task::Task> templates;         ///< every template known at the end
    std::vector<task::Task> new_templates;     ///< those created by recombination
    bool budget_exceeded = false;
    std::vector<std::string> notes;
};

/**
 * Evo(tau; beta): template closure under recombination, then reuse of every
 * known template over tau. Recombined templates of a known type are also
 * grounded with the bindings of the instances of the parent they came from.
 * Composite templates are kept but not grounded. Consults only tau and the
 * scene. Stops at the budget with budget_exceeded set. Throws
 * Errc::precondition on an empty tau.
 */
EvolveResult evolve(const std::vector<task::TaskInstance>& tau, const sim::Scene& scene,
                    const EvolutionRules& rules = {}, const filter::RecordLookup& lookup = {});

/// Templates of tau, one per isomorphism class, in first-seen order.
std::vector<task::Task> templates_of(const std::vector<task::TaskInstance>& tau);

} // namespace insitu::evolution
