#include "insitu/sim/observation_io.hpp"

#include <bit>
#include <cstring>

#include "insitu/core/error.hpp"
#include "insitu/sim/scene_io.hpp"

namespace insitu::sim {

static_assert(std::endian::native == std::endian::little, "raster dumps assume a little-endian host");

namespace {

constexpr char kMagic[4] = {'I', 'N', 'S', 'R'};
constexpr std::uint32_t kRasterVersion = 1;

template <class T>
void put(std::string& out, const T& v)
{
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

template <class T>
T take(const std::string& in, std::size_t& at)
{
    if (at + sizeof(T) > in.size()) throw Error(Errc::io, "truncated raster dump");
    T v;
    std::memcpy(&v, in.data() + at, sizeof(T));
    at += sizeof(T);
    return v;
}

} // namespace

json observation_meta(const ObservationRecord& rec)
{
    json j = schema_header(kObservationSchema, kObservationSchemaVersion);
    j["record_id"] = rec.record_id;
    j["timestamp"] = rec.timestamp;
    j["view"] = std::string(to_string(rec.view));
    j["pose"] = rec.pose;
    j["raster"] = rec.record_id + ".bin";
    json vis = json::array();
    for (const auto& v : rec.visible_entities) {
        vis.push_back({{"id", v.id},
                       {"instance", v.instance},
                       {"box", v.box},
                       {"pixel_count", v.pixel_count},
                       {"mean_depth", v.mean_depth},
                       {"via_mirror", v.via_mirror}});
    }
    j["visible_entities"] = vis;
    json gt = json::array();
    for (const auto& e : rec.entity_ground_truth) {
        gt.push_back({{"id", e.id},
                      {"label", e.label},
                      {"color", e.color},
                      {"position", e.position},
                      {"bbox3d", e.bbox3d},
                      {"is_mirror", e.is_mirror}});
    }
    j["entity_ground_truth"] = gt;
    return j;
}

void write_observation(const std::filesystem::path& dir, const ObservationRecord& rec)
{
    const Raster& r = rec.raster;
    std::string bin;
    const std::size_t n = r.instance.size();
    bin.reserve(16 + n * 13);
    bin.append(kMagic, 4);
    put(bin, kRasterVersion);
    put(bin, static_cast<std::uint32_t>(r.width));
    put(bin, static_cast<std::uint32_t>(r.height));
    for (auto v : r.instance) put(bin, v);
    for (auto v : r.depth) put(bin, v);
    for (auto v : r.mirror) put(bin, v);
    write_file(dir / (rec.record_id + ".bin"), bin);
    write_json(dir / (rec.record_id + ".json"), observation_meta(rec));
}

ObservationRecord read_observation(const std::filesystem::path& dir, const std::string& record_id)
{
    const json j = read_json(dir / (record_id + ".json"));
    check_schema(j, kObservationSchema, kObservationSchemaVersion);
    ObservationRecord rec;
    rec.record_id = j.at("record_id").get<std::string>();
    rec.timestamp = j.at("timestamp").get<std::uint64_t>();
    rec.view = j.at("view").get<std::string>() == "ego" ? View::ego : View::surveillance;
    rec.pose = j.at("pose").get<AgentPose>();
    for (const auto& v : j.at("visible_entities")) {
        rec.visible_entities.push_back({v.at("id").get<std::string>(), v.at("instance").get<std::uint32_t>(),
                                        v.at("box").get<PixelBox>(), v.at("pixel_count").get<int>(),
                                        v.at("mean_depth").get<double>(), v.at("via_mirror").get<bool>()});
    }
    for (const auto& e : j.at("entity_ground_truth")) {
        rec.entity_ground_truth.push_back({e.at("id").get<std::string>(), e.at("label").get<std::string>(),
                                           e.at("color").get<std::string>(), e.at("position").get<Vec3>(),
                                           e.at("bbox3d").get<Aabb>(), e.at("is_mirror").get<bool>()});
    }

    const std::string bin = read_file(dir / j.at("raster").get<std::string>());
    if (bin.size() < 16 || std::memcmp(bin.data(), kMagic, 4) != 0) throw Error(Errc::io, "bad raster magic");
    std::size_t at = 4;
    if (take<std::uint32_t>(bin, at) != kRasterVersion) throw Error(Errc::schema_version, "unknown raster version");
    Raster& r = rec.raster;
    r.width = static_cast<int>(take<std::uint32_t>(bin, at));
    r.height = static_cast<int>(take<std::uint32_t>(bin, at));
    const auto n = static_cast<std::size_t>(r.width) * static_cast<std::size_t>(r.height);
    r.instance.resize(n);
    r.depth.resize(n);
    r.mirror.resize(n);
    for (auto& v : r.instance) v = take<std::uint32_t>(bin, at);
    for (auto& v : r.depth) v = take<double>(bin, at);
    for (auto& v : r.mirror) v = take<std::uint8_t>(bin, at);
    if (at != bin.size()) throw Error(Errc::io, "trailing bytes in raster dump");
    return rec;
}

} // namespace insitu::sim
