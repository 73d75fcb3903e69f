#pragma once
// Independent ray-casting reference used to check the renderer. Shares no
// code with src/sim beyond the plain data types.

#include <cmath>
#include <limits>
#include <optional>

#include "insitu/sim/scene.hpp"

namespace oracle {

using insitu::Aabb;
using insitu::Vec3;

struct Basis {
    Vec3 forward, right, up;
};

/// Rotation-matrix construction: R_z(yaw) * R_y(-pitch) applied to the body axes.
inline Basis basis(double yaw_deg, double pitch_deg)
{
    const double y = yaw_deg * M_PI / 180.0;
    const double p = pitch_deg * M_PI / 180.0;
    auto rz = [&](Vec3 v) { return Vec3{v.x * std::cos(y) - v.y * std::sin(y), v.x * std::sin(y) + v.y * std::cos(y), v.z}; };
    auto ry = [&](Vec3 v) { return Vec3{v.x * std::cos(-p) + v.z * std::sin(-p), v.y, -v.x * std::sin(-p) + v.z * std::cos(-p)}; };
    Basis b;
    b.forward = rz(ry({1, 0, 0}));
    b.right = rz({0, -1, 0});
    b.up = rz(ry({0, 0, 1}));
    return b;
}

/// Ray through continuous image point (x, y) in pixel units, origin top-left.
inline Vec3 image_ray(const insitu::sim::AgentPose& pose, double x, double y)
{
    const Basis b = basis(pose.yaw_deg, pose.pitch_deg);
    const double th = std::tan(pose.camera.hfov_deg * M_PI / 360.0);
    const double w = pose.camera.width;
    const double h = pose.camera.height;
    const double sx = (2.0 * x / w - 1.0) * th;
    const double sy = (1.0 - 2.0 * y / h) * th * (h / w);
    return {b.forward.x + sx * b.right.x + sy * b.up.x, b.forward.y + sx * b.right.y + sy * b.up.y,
            b.forward.z + sx * b.right.z + sy * b.up.z};
}

/// Smallest t > 0 where origin + t*dir lies on a face of `box`, by testing
/// each of the six face planes directly.
inline std::optional<double> face_hit(Vec3 o, Vec3 d, const Aabb& box)
{
    std::optional<double> best;
    const double lo[3] = {box.min.x, box.min.y, box.min.z};
    const double hi[3] = {box.max.x, box.max.y, box.max.z};
    const double oo[3] = {o.x, o.y, o.z};
    const double dd[3] = {d.x, d.y, d.z};
    for (int a = 0; a < 3; ++a) {
        if (dd[a] == 0.0) continue;
        for (double plane : {lo[a], hi[a]}) {
            const double t = (plane - oo[a]) / dd[a];
            if (!(t > 1e-12)) continue;
            bool inside = true;
            for (int b = 0; b < 3 && inside; ++b) {
                if (b == a) continue;
                const double c = oo[b] + t * dd[b];
                inside = c >= lo[b] - 1e-12 && c <= hi[b] + 1e-12;
            }
            if (inside && (!best || t < *best)) best = t;
        }
    }
    return best;
}

struct FirstHit {
    int index = -1;
    double t = std::numeric_limits<double>::infinity();
};

inline FirstHit first_hit(const insitu::sim::Scene& s, Vec3 o, Vec3 d, int skip = -1)
{
    FirstHit f;
    for (int i = 0; i < static_cast<int>(s.entities.size()); ++i) {
        if (i == skip) continue;
        if (auto t = face_hit(o, d, s.entities[i].bbox3d); t && *t < f.t) {
            f.index = i;
            f.t = *t;
        }
    }
    return f;
}

} // namespace oracle
