#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "insitu/sim/scene.hpp"

namespace insitu::sim {

enum class View { ego, surveillance };
std::string_view to_string(View v) noexcept;

/// Result of casting one primary ray.
struct PixelSample {
    std::uint32_t instance = 0; ///< 0 = nothing hit
    double depth = 0.0;         ///< planar depth; +inf when nothing is hit
    std::uint8_t mirror = 0;    ///< one of the kMirror* states below
};

inline constexpr std::uint8_t kMirrorNone = 0;       ///< direct view
inline constexpr std::uint8_t kMirrorReflection = 1; ///< mirror surface showing a reflected entity
inline constexpr std::uint8_t kMirrorEmpty = 2;      ///< mirror surface whose reflection hits nothing

/// Per-pixel buffers, row-major, index v * width + u.
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<std::uint32_t> instance;
    std::vector<double> depth;
    std::vector<std::uint8_t> mirror; ///< kMirror* state per pixel

    friend bool operator==(const Raster&, const Raster&) = default;
};

struct VisibleEntity {
    std::string id;
    std::uint32_t instance = 0;
    PixelBox box;
    int pixel_count = 0;
    double mean_depth = 0.0;
    bool via_mirror = false;

    friend bool operator==(const VisibleEntity&, const VisibleEntity&) = default;
};

struct EntitySnapshot {
    std::string id;
    std::string label;
    std::string color;
    Vec3 position;
    Aabb bbox3d;
    bool is_mirror = false;

    friend bool operator==(const EntitySnapshot&, const EntitySnapshot&) = default;
};

struct ObservationRecord {
    std::uint64_t timestamp = 0;
    std::string record_id;
    View view = View::ego;
    AgentPose pose;
    Raster raster;
    std::vector<VisibleEntity> visible_entities; ///< sorted by (instance, via_mirror)
    std::vector<EntitySnapshot> entity_ground_truth;

    const VisibleEntity* find_visible(std::string_view entity_id, bool via_mirror) const noexcept;
    bool directly_visible(std::string_view entity_id) const noexcept { return find_visible(entity_id, false) != nullptr; }

    friend bool operator==(const ObservationRecord&, const ObservationRecord&) = default;
};

/// Casts a ray from `origin` along `dir`, with single-bounce mirror reflection.
PixelSample trace_ray(const Scene& scene, Vec3 origin, Vec3 dir) noexcept;

/// Reference implementation: one thread, row by row.
Raster render_raster_serial(const Scene& scene, const AgentPose& pose);
/// OpenMP kernel, parallel over rows. Output is identical to the serial one.
Raster render_raster(const Scene& scene, const AgentPose& pose);

/// Collects per-entity pixel statistics from a raster.
std::vector<VisibleEntity> extract_visible(const Scene& scene, const Raster& raster);

std::string record_id_for(std::uint64_t timestamp, View view);

/**
 * Renders the ego or surveillance view at `pose`. Pure in (scene, pose,
 * view, timestamp). Throws Errc::pose_out_of_bounds if the eye is outside
 * the scene bounds.
 */
ObservationRecord render(const Scene& scene, const AgentPose& pose, View view, std::uint64_t timestamp = 0);

} // namespace insitu::sim
