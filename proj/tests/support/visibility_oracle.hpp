#pragma once
// Sampling reference for direct visibility: 10^4 jittered rays per entity,
// stratified over the entity's projected screen rectangle.

#include <algorithm>
#include <set>
#include <string>

#include "insitu/core/rng.hpp"
#include "ray_oracle.hpp"

namespace oracle {

inline bool sampled_visible(const insitu::sim::Scene& s, const insitu::sim::AgentPose& pose, int index,
                            insitu::Rng& rng, int strata = 100)
{
    const auto& box = s.entities[index].bbox3d;
    const Basis b = basis(pose.yaw_deg, pose.pitch_deg);
    const Vec3 eye = pose.position + Vec3{0, 0, pose.camera.eye_height};
    const double th = std::tan(pose.camera.hfov_deg * M_PI / 360.0);
    const double w = pose.camera.width;
    const double h = pose.camera.height;
    double x0 = 0, x1 = w, y0 = 0, y1 = h;
    bool behind = false;
    double mnx = 1e300, mxx = -1e300, mny = 1e300, mxy = -1e300;
    for (int c = 0; c < 8; ++c) {
        const Vec3 p{(c & 1) ? box.max.x : box.min.x, (c & 2) ? box.max.y : box.min.y, (c & 4) ? box.max.z : box.min.z};
        const Vec3 d = p - eye;
        const double z = insitu::dot(d, b.forward);
        if (z <= 1e-9) {
            behind = true;
            break;
        }
        const double px = (insitu::dot(d, b.right) / z / th + 1.0) * 0.5 * w;
        const double py = (1.0 - insitu::dot(d, b.up) / z / (th * h / w)) * 0.5 * h;
        mnx = std::min(mnx, px);
        mxx = std::max(mxx, px);
        mny = std::min(mny, py);
        mxy = std::max(mxy, py);
    }
    if (!behind) {
        x0 = std::max(0.0, mnx);
        x1 = std::min(w, mxx);
        y0 = std::max(0.0, mny);
        y1 = std::min(h, mxy);
        if (x0 >= x1 || y0 >= y1) return false;
    }
    for (int i = 0; i < strata; ++i) {
        for (int j = 0; j < strata; ++j) {
            const double x = x0 + (x1 - x0) * (i + rng.uniform()) / strata;
            const double y = y0 + (y1 - y0) * (j + rng.uniform()) / strata;
            if (first_hit(s, eye, image_ray(pose, x, y)).index == index) return true;
        }
    }
    return false;
}

/// Ids of non-mirror entities the sampling oracle sees directly.
inline std::set<std::string> sampled_visible_set(const insitu::sim::Scene& s, const insitu::sim::AgentPose& pose,
                                                 std::uint64_t seed)
{
    insitu::Rng rng(seed);
    std::set<std::string> out;
    for (int i = 0; i < static_cast<int>(s.entities.size()); ++i) {
        if (s.entities[i].is_mirror) continue;
        if (sampled_visible(s, pose, i, rng)) out.insert(s.entities[i].id);
    }
    return out;
}

} // namespace oracle
