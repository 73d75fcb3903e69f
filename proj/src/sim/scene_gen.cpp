#include "insitu/sim/scene_gen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "insitu/core/error.hpp"
#include "insitu/core/rng.hpp"

namespace insitu::sim {

std::vector<CategorySpec> SceneProfile::default_floor_palette()
{
    return {
        {"table", {0.8, 0.6, 0.70}, {1.6, 1.0, 0.80}, true},
        {"chair", {0.4, 0.4, 0.80}, {0.55, 0.55, 1.00}, false},
        {"sofa", {1.6, 0.8, 0.70}, {2.2, 1.0, 0.90}, false},
        {"bed", {1.4, 1.9, 0.45}, {1.8, 2.1, 0.60}, false},
        {"cabinet", {0.6, 0.4, 0.80}, {1.2, 0.6, 1.20}, true},
        {"plant", {0.3, 0.3, 0.60}, {0.5, 0.5, 1.40}, false},
        {"lamp", {0.25, 0.25, 1.20}, {0.4, 0.4, 1.70}, false},
        {"shelf", {0.8, 0.3, 1.40}, {1.2, 0.4, 2.00}, false},
    };
}

std::vector<CategorySpec> SceneProfile::default_small_palette()
{
    return {
        {"cup", {0.08, 0.08, 0.10}, {0.10, 0.10, 0.12}, false},
        {"apple", {0.07, 0.07, 0.07}, {0.09, 0.09, 0.09}, false},
        {"book", {0.15, 0.20, 0.03}, {0.25, 0.30, 0.05}, false},
        {"vase", {0.10, 0.10, 0.20}, {0.15, 0.15, 0.35}, false},
        {"laptop", {0.30, 0.22, 0.02}, {0.35, 0.25, 0.03}, false},
        {"bowl", {0.14, 0.14, 0.06}, {0.18, 0.18, 0.08}, false},
    };
}

std::vector<std::string> SceneProfile::default_colors()
{
    return {"red", "green", "blue", "yellow", "white", "black", "brown", "gray"};
}

void validate_profile(const SceneProfile& p)
{
    require(p.room_x_min > 0 && p.room_x_min <= p.room_x_max, "room x range invalid");
    require(p.room_y_min > 0 && p.room_y_min <= p.room_y_max, "room y range invalid");
    require(p.room_height > p.camera.eye_height + 0.3, "room too low for the cameras");
    require(p.floor_min >= 1 && p.floor_min <= p.floor_max, "floor entity count range invalid");
    require(p.small_min >= 0 && p.small_min <= p.small_max, "small entity count range invalid");
    require(!p.floor_palette.empty() && !p.colors.empty(), "palette and colors must be nonempty");
    require(p.small_max == 0 || !p.small_palette.empty(), "small palette empty");
    require(p.mirror_probability >= 0.0 && p.mirror_probability <= 1.0, "mirror probability outside [0, 1]");
    require(p.max_retries >= 1 && p.layout_attempts >= 1, "retry limits must be positive");
    require(camera_valid(p.camera), "profile camera invalid");
}

namespace {

Vec3 sample_size(Rng& rng, const CategorySpec& c)
{
    return {rng.uniform(c.size_min.x, c.size_max.x), rng.uniform(c.size_min.y, c.size_max.y),
            rng.uniform(c.size_min.z, c.size_max.z)};
}

bool gap_ok(const Aabb& a, const Aabb& b, double gap)
{
    const Aabb grown{a.min - Vec3{gap, gap, 0.0}, a.max + Vec3{gap, gap, 0.0}};
    return !footprints_overlap(grown, b);
}

bool boxes_overlap(const Aabb& a, const Aabb& b, double margin)
{
    for (int axis = 0; axis < 3; ++axis) {
        if (a.max[axis] + margin <= b.min[axis] || b.max[axis] + margin <= a.min[axis]) return false;
    }
    return true;
}

class Builder {
public:
    Builder(std::uint64_t seed, const SceneProfile& p) : p_(p), rng_(Rng(seed).substream("scene-gen")) {}

    Scene build(std::uint64_t seed)
    {
        char name[32];
        std::snprintf(name, sizeof name, "scene_%llu", static_cast<unsigned long long>(seed));
        scene_.id = name;
        const double x = rng_.uniform(p_.room_x_min, p_.room_x_max);
        const double y = rng_.uniform(p_.room_y_min, p_.room_y_max);
        scene_.bounds = {{0.0, 0.0, 0.0}, {x, y, p_.room_height}};

        int n_floor = p_.floor_min + static_cast<int>(rng_.below(static_cast<std::uint64_t>(p_.floor_max - p_.floor_min + 1)));
        n_floor = std::min(n_floor, std::max(p_.floor_min, static_cast<int>(x * y * p_.max_floor_density)));
        const int n_small = p_.small_min + static_cast<int>(rng_.below(static_cast<std::uint64_t>(p_.small_max - p_.small_min + 1)));
        // The first item is a surface so small objects always have a home.
        // Large footprints go down first; random sequential packing fails far
        // less often that way.
        std::vector<const CategorySpec*> floor{&first_surface()};
        for (int i = 1; i < n_floor; ++i) floor.push_back(&p_.floor_palette[rng_.index(p_.floor_palette.size())]);
        std::stable_sort(floor.begin(), floor.end(), [](const CategorySpec* a, const CategorySpec* b) {
            return a->size_max.x * a->size_max.y > b->size_max.x * b->size_max.y;
        });
        // A dead-end packing restarts the whole layout, a bounded number of times.
        for (int layout = 1;; ++layout) {
            try {
                for (const CategorySpec* c : floor) place_floor(*c);
                for (int i = 0; i < n_small; ++i) place_small();
                if (rng_.bernoulli(p_.mirror_probability)) place_mirror();
                place_spawn();
                break;
            } catch (const Error& e) {
                if (e.code() != Errc::placement_failure || layout >= p_.layout_attempts) throw;
                scene_.entities.clear();
                surface_.clear();
                counters_.clear();
            }
        }
        place_surveillance();
        return scene_;
    }

private:
    const CategorySpec& first_surface() const
    {
        for (const auto& c : p_.floor_palette) {
            if (c.surface) return c;
        }
        return p_.floor_palette.front();
    }

    std::string next_id(const std::string& label)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s_%02d", label.c_str(), ++counters_[label]);
        return buf;
    }

    void add(const std::string& label, const std::string& color, const Aabb& box, bool surface,
             std::optional<MirrorPlane> mirror = std::nullopt)
    {
        SceneEntity e;
        e.id = next_id(label);
        e.label = label;
        e.color = color;
        e.bbox3d = box;
        e.position = box.center();
        e.is_mirror = mirror.has_value();
        e.mirror_plane = mirror;
        scene_.entities.push_back(std::move(e));
        surface_.push_back(surface);
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw Error(Errc::placement_failure, "could not place " + what + " in " + scene_.id);
    }

    void place_floor(const CategorySpec& cat)
    {
        const Aabb& room = scene_.bounds;
        for (int attempt = 0; attempt < p_.max_retries; ++attempt) {
            Vec3 s = sample_size(rng_, cat);
            if (rng_.bernoulli(0.5)) std::swap(s.x, s.y);
            const double hx = s.x * 0.5;
            const double hy = s.y * 0.5;
            if (room.max.x - 0.1 < 2 * hx || room.max.y - 0.1 < 2 * hy) continue;
            const double cx = rng_.uniform(0.05 + hx, room.max.x - 0.05 - hx);
            const double cy = rng_.uniform(0.05 + hy, room.max.y - 0.05 - hy);
            const Aabb box{{cx - hx, cy - hy, 0.0}, {cx + hx, cy + hy, s.z}};
            bool ok = true;
            for (const auto& e : scene_.entities) {
                if (!gap_ok(e.bbox3d, box, p_.furniture_gap)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            add(cat.label, p_.colors[rng_.index(p_.colors.size())], box, cat.surface);
            return;
        }
        fail(cat.label);
    }

    /// The category is redrawn on every attempt so a crowded surface does not
    /// stall on one large item.
    void place_small()
    {
        std::vector<std::size_t> supports;
        for (std::size_t i = 0; i < scene_.entities.size(); ++i) {
            if (surface_[i]) supports.push_back(i);
        }
        if (supports.empty()) fail("small object");
        for (int attempt = 0; attempt < p_.max_retries; ++attempt) {
            const CategorySpec& cat = p_.small_palette[rng_.index(p_.small_palette.size())];
            const Aabb top = scene_.entities[supports[rng_.index(supports.size())]].bbox3d;
            Vec3 s = sample_size(rng_, cat);
            if (rng_.bernoulli(0.5)) std::swap(s.x, s.y);
            const double hx = s.x * 0.5;
            const double hy = s.y * 0.5;
            if (top.extent().x < 2 * hx + 0.04 || top.extent().y < 2 * hy + 0.04) continue;
            const double cx = rng_.uniform(top.min.x + 0.02 + hx, top.max.x - 0.02 - hx);
            const double cy = rng_.uniform(top.min.y + 0.02 + hy, top.max.y - 0.02 - hy);
            const Aabb box{{cx - hx, cy - hy, top.max.z}, {cx + hx, cy + hy, top.max.z + s.z}};
            if (box.max.z > scene_.bounds.max.z) continue;
            bool ok = true;
            for (const auto& e : scene_.entities) {
                if (boxes_overlap(e.bbox3d, box, 0.02) && !(e.bbox3d.max.z <= box.min.z)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            add(cat.label, p_.colors[rng_.index(p_.colors.size())], box, false);
            return;
        }
        fail("small object");
    }

    void place_mirror()
    {
        const Aabb& room = scene_.bounds;
        constexpr double kThick = 0.03;
        for (int attempt = 0; attempt < p_.max_retries; ++attempt) {
            const int wall = static_cast<int>(rng_.below(4)); // 0:-x 1:+x 2:-y 3:+y
            const double width = rng_.uniform(0.8, 1.5);
            const double z0 = rng_.uniform(0.3, 0.8);
            const double height = rng_.uniform(1.0, 1.6);
            const bool along_y = wall < 2;
            const double span = along_y ? room.max.y : room.max.x;
            if (span < width + 0.2) continue;
            const double c = rng_.uniform(0.1 + width / 2, span - 0.1 - width / 2);
            Aabb box;
            MirrorPlane m;
            m.half_u = width / 2;
            m.half_v = height / 2;
            m.v_axis = {0, 0, 1};
            if (along_y) {
                const double x0 = wall == 0 ? 0.0 : room.max.x - kThick;
                box = {{x0, c - width / 2, z0}, {x0 + kThick, c + width / 2, z0 + height}};
                m.normal = {wall == 0 ? 1.0 : -1.0, 0, 0};
                m.u_axis = {0, 1, 0};
                m.center = {wall == 0 ? box.max.x : box.min.x, c, z0 + height / 2};
            } else {
                const double y0 = wall == 2 ? 0.0 : room.max.y - kThick;
                box = {{c - width / 2, y0, z0}, {c + width / 2, y0 + kThick, z0 + height}};
                m.normal = {0, wall == 2 ? 1.0 : -1.0, 0};
                m.u_axis = {1, 0, 0};
                m.center = {c, wall == 2 ? box.max.y : box.min.y, z0 + height / 2};
            }
            bool ok = true;
            for (const auto& e : scene_.entities) {
                if (boxes_overlap(e.bbox3d, box, 0.05)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            add("mirror", "silver", box, false, m);
            return;
        }
        // No free wall stretch: the scene simply has no mirror.
    }

    void place_spawn()
    {
        const Aabb& room = scene_.bounds;
        const double c = p_.spawn_clearance;
        for (int attempt = 0; attempt < p_.max_retries * 5; ++attempt) {
            AgentPose pose;
            pose.camera = p_.camera;
            pose.pitch_deg = kDefaultEgoPitchDeg;
            pose.position = {rng_.uniform(c, room.max.x - c), rng_.uniform(c, room.max.y - c), 0.0};
            pose.yaw_deg = rng_.uniform(0.0, 360.0);
            bool ok = true;
            for (const auto& e : scene_.entities) {
                if (is_solid_for(e, pose) && footprint_distance(pose.position, e.bbox3d) < c) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            scene_.agent_spawn = pose;
            return;
        }
        fail("agent spawn");
    }

    void place_surveillance()
    {
        const Aabb& room = scene_.bounds;
        AgentPose pose;
        pose.camera = p_.camera;
        pose.camera.eye_height = room.max.z - 0.3;
        pose.position = {room.min.x + 0.3, room.min.y + 0.3, 0.0};
        const Vec3 eye = pose.eye();
        const Vec3 target = room.center();
        pose.yaw_deg = wrap_degrees(rad_to_deg(std::atan2(target.y - eye.y, target.x - eye.x)));
        pose.pitch_deg = rad_to_deg(std::atan2(target.z - eye.z, std::hypot(target.x - eye.x, target.y - eye.y)));
        scene_.surveillance_pose = pose;
    }

    const SceneProfile& p_;
    Rng rng_;
    Scene scene_;
    std::vector<bool> surface_;
    std::map<std::string, int> counters_;
};

} // namespace

Scene generate_scene(std::uint64_t seed, const SceneProfile& profile)
{
    validate_profile(profile);
    return Builder(seed, profile).build(seed);
}

} // namespace insitu::sim
