#pragma once

#include <filesystem>
#include <string>

#include "insitu/core/io.hpp"
#include "insitu/sim/render.hpp"

namespace insitu::sim {

inline constexpr const char* kObservationSchema = "insitu.observation";
inline constexpr int kObservationSchemaVersion = 1;

/// Sidecar metadata without the raster buffers.
json observation_meta(const ObservationRecord& rec);

/**
 * Writes `<dir>/<record_id>.bin` (little-endian: magic "INSR", u32 version,
 * u32 width, u32 height, u32 instance[W*H], f64 depth[W*H], u8 mirror[W*H])
 * and `<dir>/<record_id>.json`.
 */
void write_observation(const std::filesystem::path& dir, const ObservationRecord& rec);
ObservationRecord read_observation(const std::filesystem::path& dir, const std::string& record_id);

} // namespace insitu::sim
