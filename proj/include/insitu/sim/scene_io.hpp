#pragma once

#include <filesystem>

#include "insitu/core/io.hpp"
#include "insitu/sim/render.hpp"
#include "insitu/sim/scene.hpp"

namespace insitu::sim {

inline constexpr const char* kSceneSchema = "insitu.scene";
inline constexpr int kSceneSchemaVersion = 1;

void to_json(json& j, const Camera& c);
void from_json(const json& j, Camera& c);
void to_json(json& j, const AgentPose& p);
void from_json(const json& j, AgentPose& p);
void to_json(json& j, const MirrorPlane& m);
void from_json(const json& j, MirrorPlane& m);
void to_json(json& j, const SceneEntity& e);
void from_json(const json& j, SceneEntity& e);

/// Scene with schema header. Units are metres, right-handed, Z up.
json scene_to_json(const Scene& s);
/// Checks the header and the scene invariants (Errc::precondition on violation).
Scene scene_from_json(const json& j);

void save_scene(const std::filesystem::path& path, const Scene& s);
Scene load_scene(const std::filesystem::path& path);

} // namespace insitu::sim
