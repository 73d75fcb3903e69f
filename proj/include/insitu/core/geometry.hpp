#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace insitu {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr double operator[](int axis) const noexcept { return axis == 0 ? x : (axis == 1 ? y : z); }
    constexpr double& at(int axis) noexcept { return axis == 0 ? x : (axis == 1 ? y : z); }

    friend constexpr Vec3 operator+(Vec3 a, Vec3 b) noexcept { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend constexpr Vec3 operator-(Vec3 a, Vec3 b) noexcept { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend constexpr Vec3 operator*(Vec3 a, double s) noexcept { return {a.x * s, a.y * s, a.z * s}; }
    friend constexpr Vec3 operator*(double s, Vec3 a) noexcept { return a * s; }
    friend constexpr bool operator==(Vec3, Vec3) = default;
};

constexpr double dot(Vec3 a, Vec3 b) noexcept { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b) noexcept
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) noexcept { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(Vec3 a) noexcept { return a * (1.0 / norm(a)); }

/// Reflects direction `d` across a plane with unit normal `n`.
constexpr Vec3 reflect_direction(Vec3 d, Vec3 n) noexcept { return d - n * (2.0 * dot(d, n)); }
/// Reflects point `p` across the plane through `origin` with unit normal `n`.
constexpr Vec3 reflect_point(Vec3 p, Vec3 origin, Vec3 n) noexcept { return p - n * (2.0 * dot(p - origin, n)); }

constexpr double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

/// Wraps an angle in degrees into [0, 360).
inline double wrap_degrees(double deg) noexcept
{
    double w = std::fmod(deg, 360.0);
    if (w < 0.0) {
        w += 360.0;
    }
    return w >= 360.0 ? 0.0 : w;
}

struct Aabb {
    Vec3 min;
    Vec3 max;

    constexpr Vec3 center() const noexcept { return (min + max) * 0.5; }
    constexpr Vec3 extent() const noexcept { return max - min; }
    constexpr double volume() const noexcept
    {
        const Vec3 e = extent();
        return e.x * e.y * e.z;
    }
    constexpr bool valid() const noexcept { return min.x <= max.x && min.y <= max.y && min.z <= max.z; }
    constexpr bool contains(Vec3 p) const noexcept
    {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z && p.z <= max.z;
    }
    constexpr bool contains(const Aabb& b) const noexcept { return contains(b.min) && contains(b.max); }

    Aabb merged(const Aabb& o) const noexcept
    {
        return {{std::min(min.x, o.min.x), std::min(min.y, o.min.y), std::min(min.z, o.min.z)},
                {std::max(max.x, o.max.x), std::max(max.y, o.max.y), std::max(max.z, o.max.z)}};
    }

    friend constexpr bool operator==(const Aabb&, const Aabb&) = default;
};

/// True when the open XY footprints overlap.
constexpr bool footprints_overlap(const Aabb& a, const Aabb& b) noexcept
{
    return a.min.x < b.max.x && b.min.x < a.max.x && a.min.y < b.max.y && b.min.y < a.max.y;
}

/// Horizontal distance from point `p` to the XY footprint of `box` (0 inside).
inline double footprint_distance(Vec3 p, const Aabb& box) noexcept
{
    const double dx = std::max({box.min.x - p.x, 0.0, p.x - box.max.x});
    const double dy = std::max({box.min.y - p.y, 0.0, p.y - box.max.y});
    return std::hypot(dx, dy);
}

struct RayBoxHit {
    double t_near = 0.0;
    double t_far = 0.0;
    int entry_axis = -1; ///< axis of the slab that produced t_near, -1 if origin is inside
    int entry_side = 0;  ///< -1 entered through the min face, +1 through the max face
};

/**
 * Slab test for the ray origin + t * dir against `box`. Returns the entry
 * and exit parameters when the ray meets the box at some t > 0.
 */
inline std::optional<RayBoxHit> intersect_ray_box(Vec3 origin, Vec3 dir, const Aabb& box) noexcept
{
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    int axis = -1;
    int side = 0;
    for (int a = 0; a < 3; ++a) {
        const double o = origin[a];
        const double d = dir[a];
        const double lo = box.min[a];
        const double hi = box.max[a];
        if (d == 0.0) {
            if (o < lo || o > hi) {
                return std::nullopt;
            }
            continue;
        }
        const double inv = 1.0 / d;
        double ta = (lo - o) * inv;
        double tb = (hi - o) * inv;
        int s = -1;
        if (ta > tb) {
            std::swap(ta, tb);
            s = 1;
        }
        if (ta > t0) {
            t0 = ta;
            axis = a;
            side = s;
        }
        t1 = std::min(t1, tb);
        if (t0 > t1) {
            return std::nullopt;
        }
    }
    if (t1 <= 0.0) {
        return std::nullopt;
    }
    if (t0 <= 0.0) {
        return RayBoxHit{0.0, t1, -1, 0};
    }
    return RayBoxHit{t0, t1, axis, side};
}

/// Half-open pixel rectangle [u0, u1) x [v0, v1).
struct PixelBox {
    int u0 = 0;
    int v0 = 0;
    int u1 = 0;
    int v1 = 0;

    constexpr int width() const noexcept { return std::max(0, u1 - u0); }
    constexpr int height() const noexcept { return std::max(0, v1 - v0); }
    constexpr long area() const noexcept { return static_cast<long>(width()) * height(); }
    constexpr bool empty() const noexcept { return area() == 0; }
    friend constexpr bool operator==(const PixelBox&, const PixelBox&) = default;
};

inline double iou(const PixelBox& a, const PixelBox& b) noexcept
{
    const PixelBox inter{std::max(a.u0, b.u0), std::max(a.v0, b.v0), std::min(a.u1, b.u1), std::min(a.v1, b.v1)};
    const double i = static_cast<double>(inter.area());
    const double u = static_cast<double>(a.area() + b.area()) - i;
    return u > 0.0 ? i / u : 0.0;
}

} // namespace insitu
