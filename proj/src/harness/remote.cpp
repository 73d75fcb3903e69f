#include "insitu/harness/remote.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "insitu/core/error.hpp"
#include "insitu/sim/scene_io.hpp"
#include "insitu/task/task_io.hpp"

namespace insitu::harness {

using namespace task;

json observation_payload(const sim::ObservationRecord& obs, bool attach_raster)
{
    json pose;
    sim::to_json(pose, obs.pose);
    json vis = json::array();
    for (const auto& v : obs.visible_entities) {
        vis.push_back({{"id", v.id}, {"box", v.box}, {"pixel_count", v.pixel_count}, {"mean_depth", v.mean_depth},
                       {"via_mirror", v.via_mirror}});
    }
    json j{{"record_id", obs.record_id},
           {"view", sim::to_string(obs.view)},
           {"pose", pose},
           {"width", obs.raster.width},
           {"height", obs.raster.height},
           {"visible_entities", vis}};
    if (attach_raster) {
        json depth = json::array();
        for (double d : obs.raster.depth) depth.push_back(std::isfinite(d) ? json(d) : json(nullptr));
        j["depth"] = depth;
    }
    return j;
}

AttributeValue answer_from_json(TaskType type, const json& a)
{
    try {
        switch (type) {
        case TaskType::classification: return Label{a.get<std::string>()};
        case TaskType::localization: return BBox2D{a.get<PixelBox>()};
        case TaskType::depth_estimation: return Depth{a.get<double>()};
        case TaskType::embodied_counting:
        case TaskType::pattern_counting:
        case TaskType::mirror_counting: return Count{a.get<std::uint32_t>()};
        case TaskType::relationship_detection: return RelationName{a.get<std::string>()};
        case TaskType::in_view_check: return AnswerBool{a.get<bool>()};
        default: break;
        }
    } catch (const json::exception& e) {
        throw Error(Errc::malformed_response, std::string("answer has the wrong shape: ") + e.what());
    }
    throw Error(Errc::malformed_response, "no static answer for " + std::string(to_string(type)));
}

RemoteSolver::RemoteSolver(RemoteConfig config) : config_(std::move(config))
{
    require(!config_.endpoint.empty(), "remote solver needs an endpoint");
    require(config_.retries >= 0 && config_.timeout_s > 0.0, "bad remote solver settings");
}

RemoteSolver::~RemoteSolver() = default;

json RemoteSolver::post(const std::string& path, const json& body) const
{
    const std::string payload = body.dump();
    int backoff = config_.backoff_ms;
    bool last_timeout = false;
    std::string last_error;
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
            backoff *= 2;
        }
        httplib::Client cli(config_.endpoint);
        const auto secs = static_cast<time_t>(config_.timeout_s);
        const auto usecs = static_cast<time_t>((config_.timeout_s - static_cast<double>(secs)) * 1e6);
        cli.set_connection_timeout(secs, usecs);
        cli.set_read_timeout(secs, usecs);
        cli.set_write_timeout(secs, usecs);
        auto res = cli.Post(path, payload, "application/json");
        if (!res) {
            last_timeout = res.error() == httplib::Error::Read || res.error() == httplib::Error::ConnectionTimeout;
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_timeout = false;
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) throw Error(Errc::malformed_response, path + " answered HTTP " + std::to_string(res->status));
        try {
            json j = json::parse(res->body);
            if (!j.is_object()) throw Error(Errc::malformed_response, path + " reply is not an object");
            return j;
        } catch (const json::exception& e) {
            throw Error(Errc::malformed_response, path + " reply is not JSON: " + e.what());
        }
    }
    throw Error(last_timeout ? Errc::timeout : Errc::unreachable,
                config_.endpoint + path + " failed after " + std::to_string(config_.retries + 1) + " attempts: " + last_error);
}

AttributeValue RemoteSolver::answer(const TaskInstance& inst, const sim::ObservationRecord& obs)
{
    const json req{{"task_id", inst.id},
                   {"task_type", to_string(inst.type())},
                   {"prompt", inst.prompt},
                   {"query", inst.task.initial},
                   {"observation", observation_payload(obs, config_.attach_raster)}};
    const json res = post("/solve", req);
    if (!res.contains("answer")) throw Error(Errc::malformed_response, "/solve reply lacks \"answer\"");
    return answer_from_json(inst.type(), res.at("answer"));
}

NavAction RemoteSolver::act(const TaskInstance& inst, const sim::ObservationRecord& obs, const NavContext& ctx)
{
    const json req{{"task_id", inst.id},
                   {"task_type", to_string(inst.type())},
                   {"prompt", inst.prompt},
                   {"query", inst.task.initial},
                   {"observation", observation_payload(obs, config_.attach_raster)},
                   {"step_index", ctx.step_index},
                   {"remaining_steps", ctx.remaining_steps}};
    const json res = post("/act", req);
    try {
        return {res.at("turn_degrees").get<double>(), res.at("forward_meters").get<double>(),
                res.at("terminate").get<bool>()};
    } catch (const json::exception& e) {
        throw Error(Errc::malformed_response, std::string("/act reply: ") + e.what());
    }
}

RemoteConfig remote_config_from_env()
{
    RemoteConfig c;
    if (const char* e = std::getenv(kSolverEndpointEnv)) c.endpoint = e;
    return c;
}

} // namespace insitu::harness
