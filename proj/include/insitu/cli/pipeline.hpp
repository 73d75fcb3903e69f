#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "insitu/core/io.hpp"
#include "insitu/gen/loop.hpp"
#include "insitu/harness/scoring.hpp"
#include "insitu/metrics/mis.hpp"
#include "insitu/metrics/stats.hpp"

namespace insitu::cli {

inline constexpr const char* kRunSchema = "insitu.run";
inline constexpr int kRunSchemaVersion = 1;
inline constexpr const char* kMetricsSchema = "insitu.metrics";
inline constexpr const char* kSpatialSchema = "insitu.spatial";
inline constexpr const char* kEpisodesSchema = "insitu.episodes";
inline constexpr int kCsvSchemaVersion = 1;

/// Search nodes allowed per MIS under exact_force before greedy takes over.
inline constexpr std::uint64_t kExactForceNodes = 50'000'000;

struct RunOptions {
    gen::LoopConfig loop;
    int loops = 2;
    double alpha = metrics::kDefaultAlpha;
    bool ablation = true;   ///< also run the loop with the filter off
    bool sidecars = true;   ///< dump observation rasters next to the tasks
    bool exact_force = false; ///< exact MIS at any size
};

json run_options_to_json(const RunOptions& o);
std::uint64_t config_hash(const json& resolved);

/// MIR of one named task set.
struct SetMir {
    std::string name;
    metrics::MirResult mir;
};

struct PipelineResult {
    std::vector<gen::LoopArtifacts> loops;
    std::vector<gen::LoopArtifacts> ablation; ///< empty when the ablation is off
    /// loop_<i> for each loop, pooled, then ablation_loop_<i> (i >= 1) and ablation_pooled.
    std::vector<SetMir> mir;
    metrics::SpatialStats spatial;             ///< over the pooled set
    std::optional<harness::NavMetrics> nav;    ///< over every executed episode
};

/// Lookup over the records of every loop in `loops`.
filter::RecordLookup records_lookup(const std::vector<gen::LoopArtifacts>& loops);

/// MIR of `tasks` under the default encoders; the empty set gives 0/0.
metrics::MirResult task_mir(const std::vector<task::TaskInstance>& tasks, const sim::Scene& scene,
                            const filter::RecordLookup& lookup, double alpha, const metrics::MisOptions& mis = {});

PipelineResult run_pipeline(const sim::Scene& scene, const RunOptions& options, harness::Solver* solver);

/// "# schema insitu.metrics v1", then set,n,mis,mir,exact,alpha.
std::string mir_csv(const std::vector<SetMir>& rows, double alpha);
/// "# schema insitu.spatial v1", then one row of the spatial statistics.
std::string spatial_csv(const metrics::SpatialStats& s);

/**
 * Run directory: manifest.json (resolved config and hash), scene.json,
 * loop_<i>.jsonl, loop_<i>.filtered.jsonl, ablation/loop_<i>.jsonl,
 * episodes.jsonl, metrics.csv, spatial.csv, nav.csv and, with sidecars,
 * records/loop_<i>/. No wall-clock data is written, so equal inputs give
 * equal bytes.
 */
void write_run(const std::filesystem::path& dir, const sim::Scene& scene, const RunOptions& options,
               const PipelineResult& result);

/// Parsed metrics.csv: set name -> (mis, total).
std::map<std::string, std::pair<std::size_t, std::size_t>> read_mir_csv(const std::filesystem::path& path);

/**
 * Report bundle for one run directory or a directory of run directories:
 * mir_table.md, mir.csv, spatial_table.md, spatial.csv and, when navigation
 * ran, nav.csv. Rows are ordered by directory name. Throws
 * Errc::missing_artifact when no run is found or a run lacks a file.
 * Returns the directory written.
 */
std::filesystem::path export_report(const std::filesystem::path& runs, const std::filesystem::path& out = {});

} // namespace insitu::cli
