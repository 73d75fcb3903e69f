#include "insitu/sim/camera.hpp"

#include <cmath>

namespace insitu::sim {

bool camera_valid(const Camera& c) noexcept
{
    return c.hfov_deg > 0.0 && c.hfov_deg < 180.0 && c.width >= 8 && c.height >= 8 && c.eye_height >= 0.0;
}

CameraFrame camera_frame(const AgentPose& pose) noexcept
{
    const double yaw = deg_to_rad(pose.yaw_deg);
    const double pitch = deg_to_rad(pose.pitch_deg);
    const double cy = std::cos(yaw);
    const double sy = std::sin(yaw);
    const double cp = std::cos(pitch);
    const double sp = std::sin(pitch);
    CameraFrame f;
    f.eye = pose.eye();
    f.forward = {cp * cy, cp * sy, sp};
    f.right = {sy, -cy, 0.0};
    f.up = {-cy * sp, -sy * sp, cp};
    f.tan_half_h = std::tan(deg_to_rad(pose.camera.hfov_deg) * 0.5);
    f.width = pose.camera.width;
    f.height = pose.camera.height;
    f.aspect = static_cast<double>(pose.camera.height) / static_cast<double>(pose.camera.width);
    return f;
}

} // namespace insitu::sim
