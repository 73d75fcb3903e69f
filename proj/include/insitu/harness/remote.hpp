#pragma once

#include <memory>
#include <string>

#include "insitu/core/io.hpp"
#include "insitu/harness/solver.hpp"

namespace insitu::harness {

inline constexpr const char* kSolverEndpointEnv = "INSITU_SOLVER_ENDPOINT";

struct RemoteConfig {
    std::string endpoint;       ///< "http://host:port"
    double timeout_s = 10.0;    ///< per request
    int retries = 3;            ///< extra attempts after the first
    int backoff_ms = 50;        ///< doubled after every failed attempt
    bool attach_raster = false; ///< include the depth buffer in observations
};

/// Symbolic observation: pose, image size and per-entity boxes and depths.
json observation_payload(const sim::ObservationRecord& obs, bool attach_raster = false);

/// Parses a solver's "answer" field into the value kind `type` expects.
/// Throws Errc::malformed_response on a mismatch.
task::AttributeValue answer_from_json(task::TaskType type, const json& answer);

/**
 * HTTP solver. POST /solve with {task_id, task_type, prompt, query,
 * observation} expects {answer, confidence?}; POST /act adds {step_index,
 * remaining_steps} and expects {turn_degrees, forward_meters, terminate}.
 * Failed transports and 5xx replies are retried with exponential backoff,
 * then raise Errc::timeout (last attempt timed out) or Errc::unreachable.
 * Non-JSON or incomplete replies raise Errc::malformed_response at once.
 */
class RemoteSolver final : public Solver {
public:
    explicit RemoteSolver(RemoteConfig config);
    ~RemoteSolver() override;

    task::AttributeValue answer(const task::TaskInstance& inst, const sim::ObservationRecord& obs) override;
    NavAction act(const task::TaskInstance& inst, const sim::ObservationRecord& obs, const NavContext& ctx) override;
    bool thread_safe() const noexcept override { return true; }

    const RemoteConfig& config() const noexcept { return config_; }

private:
    json post(const std::string& path, const json& body) const;

    RemoteConfig config_;
};

/// RemoteConfig from the environment; empty endpoint when unset.
RemoteConfig remote_config_from_env();

} // namespace insitu::harness
