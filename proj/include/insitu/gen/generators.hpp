#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "insitu/core/rng.hpp"
#include "insitu/gen/dataset.hpp"
#include "insitu/sim/planner.hpp"
#include "insitu/sim/scene.hpp"
#include "insitu/task/task.hpp"

namespace insitu::gen {

/// Generator g_i: one instance from one record, or a domain error
/// (NoEligibleLabel, NoVisibleEntity, NoEntityPair, NoDistantTarget) when
/// the record does not support the task type.
using GeneratorFn =
    std::function<task::TaskInstance(const sim::ObservationRecord&, const sim::Scene&, Rng&)>;

/// Stand-in for model-written commands: turns a grounded instance into text.
class PromptRenderer {
public:
    virtual ~PromptRenderer() = default;
    virtual std::string render(const task::TaskInstance& inst, const sim::Scene& scene) const = 0;
};

/// Deterministic fill-in-the-blanks commands.
class TemplatePromptRenderer final : public PromptRenderer {
public:
    std::string render(const task::TaskInstance& inst, const sim::Scene& scene) const override;
};

struct GeneratorRegistry {
    std::map<task::TaskType, GeneratorFn> rule_based;
    std::shared_ptr<const PromptRenderer> semantic;

    /// All ten generators with the template renderer.
    static GeneratorRegistry defaults();
    /// Throws Errc::precondition if an enabled type lacks a generator.
    void check_covers(const std::set<task::TaskType>& enabled) const;
};

task::TaskInstance g_classification(const sim::ObservationRecord& r, const sim::Scene& s, Rng& rng);
task::TaskInstance g_localization(const sim::ObservationRecord& r, const sim::Scene& s, Rng& rng);
task::TaskInstance g_depth(const sim::ObservationRecord& r, const sim::Scene& s, Rng& rng);
task::TaskInstance g_embodied_count(const sim::ObservationRecord& r, const sim::Scene& s, Rng& rng);
task::TaskInstance g_pattern_count(const sim::ObservationRecord& r, const sim::Scene& s, Rng& rng);
task::TaskInstance g_mirror_count(const sim::ObservationRecord& r, const sim::Scene& s, Rng& rng);
task::TaskInstance g_relationship(const sim::ObservationRecord& r, const sim::Scene& s, Rng& rng);
task::TaskInstance g_in_view(const sim::ObservationRecord& r, const sim::Scene& s, Rng& rng);

enum class NavMode { label, picture };
/// Targets are floor entities at least 2 m away that an oracle planner can
/// reach and see within the step cap.
task::TaskInstance g_navigation(const sim::ObservationRecord& r, const sim::Scene& s, Rng& rng, NavMode mode,
                                const sim::PlannerConfig& planner = {});

/// Minimum start-to-target footprint distance for navigation tasks, m.
inline constexpr double kMinNavDistance = 2.0;
/// Entities covering fewer pixels are not offered to the per-entity generators.
inline constexpr int kMinVisiblePixels = 20;

/// Counting, in-view and navigation tasks are posed from the ego view only.
bool ego_only(task::TaskType t) noexcept;

/// Whether the oracle plan from `start` ends within the success radius with
/// the target in view.
bool navigation_feasible(const sim::Scene& s, const sim::AgentPose& start, const sim::SceneEntity& target,
                         const sim::PlannerConfig& planner = {});

/// Duplicate key: type, binding, and pose binned to 0.5 m / 15 degrees.
struct DedupKey {
    task::TaskType type;
    task::Binding binding;
    long bx, by, byaw;
    friend auto operator<=>(const DedupKey&, const DedupKey&) = default;
};
DedupKey dedup_key(const task::TaskInstance& inst);

/**
 * G: every enabled generator applied to every record. Per-record draws come
 * from a substream keyed by (seed, record id, type), so adding records never
 * changes what the existing ones produce. Instances are numbered
 * `<id_prefix><NNNNN>` in generation order and prompts come from the
 * registry's renderer. Throws Errc::precondition on an empty data set.
 */
std::vector<task::TaskInstance> generate_tasks(const DataSet& data, const GeneratorRegistry& registry,
                                               const sim::Scene& scene, const LoopConfig& config,
                                               const std::string& id_prefix = "t");

} // namespace insitu::gen
