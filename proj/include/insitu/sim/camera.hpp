#pragma once

#include "insitu/core/geometry.hpp"

namespace insitu::sim {

struct Camera {
    double hfov_deg = 90.0;
    int width = 128;
    int height = 96;
    double eye_height = 1.6;

    friend bool operator==(const Camera&, const Camera&) = default;
};

/// Pitch used for the agent's ego camera by generated scenes. Tilting down
/// lets a 1.6 m eye see furniture within 1 m.
inline constexpr double kDefaultEgoPitchDeg = -20.0;

/**
 * Agent or camera pose. `position` is the floor point (z = 0 for the agent);
 * the eye sits `camera.eye_height` above it. Yaw 0 looks along +x and grows
 * counter-clockwise; positive pitch looks up.
 */
struct AgentPose {
    Vec3 position;
    double yaw_deg = 0.0;
    double pitch_deg = 0.0;
    Camera camera;

    Vec3 eye() const noexcept { return position + Vec3{0.0, 0.0, camera.eye_height}; }
    friend bool operator==(const AgentPose&, const AgentPose&) = default;
};

/// Checks 0 < FOV < 180 and resolution >= 8x8.
bool camera_valid(const Camera& c) noexcept;

/// Orthonormal camera frame. `forward` has unit length.
struct CameraFrame {
    Vec3 eye;
    Vec3 forward;
    Vec3 right;
    Vec3 up;
    double tan_half_h = 1.0;
    double aspect = 0.75; ///< height / width
    int width = 0;
    int height = 0;

    /// Ray through the top-left corner of pixel (u, v). The direction is
    /// scaled so its dot product with `forward` is 1, making the ray
    /// parameter equal to planar (optical-axis) depth. Pixel grids nest
    /// exactly under 2x refinement.
    Vec3 pixel_ray(double u, double v) const noexcept
    {
        const double x = (2.0 * (u / width) - 1.0) * tan_half_h;
        const double y = (1.0 - 2.0 * (v / height)) * tan_half_h * aspect;
        return forward + right * x + up * y;
    }

    /// Planar depth and continuous pixel coordinates of world point `p`;
    /// depth <= 0 means behind the camera.
    struct Projection {
        double depth;
        double u;
        double v;
    };
    Projection project(Vec3 p) const noexcept
    {
        const Vec3 d = p - eye;
        const double z = dot(d, forward);
        const double x = dot(d, right) / z;
        const double y = dot(d, up) / z;
        return {z, (x / tan_half_h + 1.0) * 0.5 * width, (1.0 - y / (tan_half_h * aspect)) * 0.5 * height};
    }
};

CameraFrame camera_frame(const AgentPose& pose) noexcept;

} // namespace insitu::sim
