#include "insitu/sim/render.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>

#include "insitu/core/error.hpp"

namespace insitu::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Nearest {
    std::size_t index = static_cast<std::size_t>(-1);
    RayBoxHit hit{};
    double t = kInf;
};

Nearest nearest_hit(const Scene& scene, Vec3 origin, Vec3 dir, std::size_t skip) noexcept
{
    Nearest best;
    for (std::size_t i = 0; i < scene.entities.size(); ++i) {
        if (i == skip) continue;
        const auto hit = intersect_ray_box(origin, dir, scene.entities[i].bbox3d);
        if (!hit || hit->t_near <= 0.0) continue;
        if (hit->t_near < best.t) {
            best.index = i;
            best.hit = *hit;
            best.t = hit->t_near;
        }
    }
    return best;
}

bool hits_mirror_face(const SceneEntity& e, const RayBoxHit& hit, Vec3 point) noexcept
{
    if (!e.mirror_plane || hit.entry_axis < 0) return false;
    const MirrorPlane& m = *e.mirror_plane;
    const double n = m.normal[hit.entry_axis];
    if (n == 0.0 || (n > 0 ? 1 : -1) != hit.entry_side) return false;
    return m.contains(point, 1e-9);
}

} // namespace

std::string_view to_string(View v) noexcept { return v == View::ego ? "ego" : "surveillance"; }

const VisibleEntity* ObservationRecord::find_visible(std::string_view entity_id, bool via_mirror) const noexcept
{
    for (const auto& v : visible_entities) {
        if (v.id == entity_id && v.via_mirror == via_mirror) return &v;
    }
    return nullptr;
}

PixelSample trace_ray(const Scene& scene, Vec3 origin, Vec3 dir) noexcept
{
    const Nearest first = nearest_hit(scene, origin, dir, static_cast<std::size_t>(-1));
    if (first.index == static_cast<std::size_t>(-1)) {
        return {0, kInf, kMirrorNone};
    }
    const SceneEntity& e = scene.entities[first.index];
    const Vec3 p = origin + dir * first.t;
    if (!hits_mirror_face(e, first.hit, p)) {
        return {static_cast<std::uint32_t>(first.index + 1), first.t, kMirrorNone};
    }
    const Vec3 reflected = reflect_direction(dir, e.mirror_plane->normal);
    const Nearest bounce = nearest_hit(scene, p, reflected, first.index);
    if (bounce.index == static_cast<std::size_t>(-1)) {
        return {static_cast<std::uint32_t>(first.index + 1), first.t, kMirrorEmpty};
    }
    return {static_cast<std::uint32_t>(bounce.index + 1), first.t + bounce.t, kMirrorReflection};
}

namespace {

void check_pose(const Scene& scene, const AgentPose& pose)
{
    require(camera_valid(pose.camera), "camera must have 0 < fov < 180 and at least 8x8 pixels");
    if (!scene.bounds.contains(pose.eye()) || !scene.bounds.contains(pose.position)) {
        throw Error(Errc::pose_out_of_bounds, "pose outside scene bounds");
    }
}

Raster blank_raster(const AgentPose& pose)
{
    Raster r;
    r.width = pose.camera.width;
    r.height = pose.camera.height;
    const auto n = static_cast<std::size_t>(r.width) * static_cast<std::size_t>(r.height);
    r.instance.assign(n, 0);
    r.depth.assign(n, kInf);
    r.mirror.assign(n, 0);
    return r;
}

inline void shade_row(const Scene& scene, const CameraFrame& frame, Raster& r, int v) noexcept
{
    for (int u = 0; u < r.width; ++u) {
        const PixelSample s = trace_ray(scene, frame.eye, frame.pixel_ray(u + 0.5, v + 0.5)); // pixel centre
        const auto idx = static_cast<std::size_t>(v) * static_cast<std::size_t>(r.width) + static_cast<std::size_t>(u);
        r.instance[idx] = s.instance;
        r.depth[idx] = s.depth;
        r.mirror[idx] = s.mirror;
    }
}

} // namespace

Raster render_raster_serial(const Scene& scene, const AgentPose& pose)
{
    check_pose(scene, pose);
    const CameraFrame frame = camera_frame(pose);
    Raster r = blank_raster(pose);
    for (int v = 0; v < r.height; ++v) {
        shade_row(scene, frame, r, v);
    }
    return r;
}

Raster render_raster(const Scene& scene, const AgentPose& pose)
{
    check_pose(scene, pose);
    const CameraFrame frame = camera_frame(pose);
    Raster r = blank_raster(pose);
    const int height = r.height;
#pragma omp parallel for schedule(static)
    for (int v = 0; v < height; ++v) {
        shade_row(scene, frame, r, v);
    }
    return r;
}

std::vector<VisibleEntity> extract_visible(const Scene& scene, const Raster& raster)
{
    struct Acc {
        PixelBox box{std::numeric_limits<int>::max(), std::numeric_limits<int>::max(), -1, -1};
        int count = 0;
        double depth_sum = 0.0;
    };
    std::map<std::pair<std::uint32_t, bool>, Acc> acc;
    for (int v = 0; v < raster.height; ++v) {
        for (int u = 0; u < raster.width; ++u) {
            const auto idx = static_cast<std::size_t>(v) * static_cast<std::size_t>(raster.width) + static_cast<std::size_t>(u);
            const std::uint32_t inst = raster.instance[idx];
            if (inst == 0) continue;
            const bool reflected = raster.mirror[idx] == kMirrorReflection;
            Acc& a = acc[{inst, reflected}];
            a.box.u0 = std::min(a.box.u0, u);
            a.box.v0 = std::min(a.box.v0, v);
            a.box.u1 = std::max(a.box.u1, u + 1);
            a.box.v1 = std::max(a.box.v1, v + 1);
            a.count += 1;
            a.depth_sum += raster.depth[idx];
        }
    }
    std::vector<VisibleEntity> out;
    out.reserve(acc.size());
    for (const auto& [key, a] : acc) {
        const SceneEntity* e = scene.by_instance(key.first);
        out.push_back({e ? e->id : std::string{}, key.first, a.box, a.count, a.depth_sum / a.count, key.second});
    }
    return out;
}

std::string record_id_for(std::uint64_t timestamp, View view)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "rec_%06llu_%s", static_cast<unsigned long long>(timestamp),
                  view == View::ego ? "ego" : "srv");
    return buf;
}

ObservationRecord render(const Scene& scene, const AgentPose& pose, View view, std::uint64_t timestamp)
{
    ObservationRecord rec;
    rec.timestamp = timestamp;
    rec.record_id = record_id_for(timestamp, view);
    rec.view = view;
    rec.pose = pose;
    rec.raster = render_raster(scene, pose);
    rec.visible_entities = extract_visible(scene, rec.raster);
    rec.entity_ground_truth.reserve(scene.entities.size());
    for (const auto& e : scene.entities) {
        rec.entity_ground_truth.push_back({e.id, e.label, e.color, e.position, e.bbox3d, e.is_mirror});
    }
    return rec;
}

} // namespace insitu::sim
