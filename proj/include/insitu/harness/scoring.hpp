#pragma once

#include <map>
#include <string>
#include <vector>

#include "insitu/harness/episode.hpp"

namespace insitu::harness {

/// Relative error under which a depth answer counts as correct.
inline constexpr double kDepthTolerance = 0.10;
/// IoU at which a localization answer counts toward accuracy.
inline constexpr double kIouHit = 0.5;

struct TypeScore {
    int n = 0;
    int correct = 0;
    double iou_sum = 0.0; ///< over localization tasks only
    int iou_n = 0;        ///< localization tasks counted in iou_sum
    int failures = 0;     ///< solver errors, scored incorrect

    double accuracy() const noexcept { return n ? static_cast<double>(correct) / n : 0.0; }
    /// Mean IoU over the localization tasks; 0 when there were none.
    double miou() const noexcept { return iou_n ? iou_sum / iou_n : 0.0; }
};

struct StaticScores {
    std::map<task::TaskType, TypeScore> per_type;
    TypeScore overall;
};

/// Whether `answer` matches `truth` for `type`; IoU goes to `iou` for boxes.
bool answer_correct(task::TaskType type, const task::AttributeValue& answer, const task::AttributeValue& truth,
                    double* iou = nullptr);

/**
 * Scores non-interactive instances. Each observation is re-rendered from the
 * instance pose. Solver errors count as incorrect. Solvers that declare
 * themselves thread safe are queried concurrently.
 */
StaticScores run_static(const std::vector<task::TaskInstance>& tasks, Solver& solver, const sim::Scene& scene);

struct NavMetrics {
    double nav_gain = 0.0;            ///< [-1, 1]
    double success_rate = 0.0;        ///< [0, 1]
    double step_number = 0.0;         ///< [0, 10]
    double target_neglect_rate = 0.0; ///< [0, 1]
    double lack_3d_awareness = 0.0;   ///< [0, 1]
    int episodes = 0;
};

/// (d0 - dT) / d0 clamped to [-1, 1]; 0 when d0 is 0.
double nav_gain(const NavEpisode& e) noexcept;

/// Lack of 3D awareness: failed, and either stopped early without ever
/// seeing the target or stepped toward its mirror image.
bool lacks_3d_awareness(const NavEpisode& e) noexcept;

/**
 * Aggregates episodes. target_neglect_rate and lack_3d_awareness are
 * fractions of all episodes. Throws Errc::precondition on an empty list.
 */
NavMetrics compute_nav_metrics(const std::vector<NavEpisode>& episodes);

struct NavigationRun {
    std::vector<NavEpisode> episodes;
    NavMetrics metrics;
};

/// Runs every navigation instance sequentially with one solver.
NavigationRun run_navigation(const std::vector<task::TaskInstance>& tasks, Solver& solver, const sim::Scene& scene,
                             const EpisodeConfig& config = {});

/// "type,n,accuracy,miou,failures" rows, overall last; miou is empty without localization tasks.
std::string static_scores_csv(const StaticScores& s);
std::string nav_metrics_csv(const NavMetrics& m);

} // namespace insitu::harness
