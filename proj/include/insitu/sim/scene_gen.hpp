#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "insitu/sim/scene.hpp"

namespace insitu::sim {

struct CategorySpec {
    std::string label;
    Vec3 size_min;
    Vec3 size_max;
    bool surface = false; ///< small objects may be placed on top
};

struct SceneProfile {
    double room_x_min = 5.0;
    double room_x_max = 9.0;
    double room_y_min = 5.0;
    double room_y_max = 10.0;
    double room_height = 3.0;
    int floor_min = 6;
    int floor_max = 10;
    int small_min = 3;
    int small_max = 8;
    std::vector<CategorySpec> floor_palette = default_floor_palette();
    std::vector<CategorySpec> small_palette = default_small_palette();
    std::vector<std::string> colors = default_colors();
    double mirror_probability = 0.3;
    double furniture_gap = 0.5;       ///< min footprint gap between floor items
    double max_floor_density = 0.25; ///< floor items per m^2; caps floor_max in small rooms
    double spawn_clearance = 0.5;
    int max_retries = 200;    ///< attempts per item
    int layout_attempts = 10; ///< full-layout restarts before giving up
    Camera camera;

    static std::vector<CategorySpec> default_floor_palette();
    static std::vector<CategorySpec> default_small_palette();
    static std::vector<std::string> default_colors();
};

/// Throws Errc::precondition for inconsistent ranges.
void validate_profile(const SceneProfile& p);

/**
 * Procedural room: floor furniture, small objects resting on surfaces, at
 * most one wall mirror, an ego spawn and a corner surveillance camera.
 * Deterministic per (seed, profile). Throws Errc::placement_failure when a
 * required item cannot be placed within `max_retries` attempts.
 */
Scene generate_scene(std::uint64_t seed, const SceneProfile& profile = {});

} // namespace insitu::sim
