#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace insitu {

/// Domain error codes. Every failure the engine reports carries one of these.
enum class Errc {
    precondition,
    structural_regression,
    search_budget_exceeded,
    unbound_slot,
    missing_entity,
    pose_out_of_bounds,
    placement_failure,
    no_eligible_label,
    no_visible_entity,
    no_entity_pair,
    no_distant_target,
    solver_failure,
    zero_vector,
    no_exchangeable_vertices,
    empty_task_set,
    empty_evolved_set,
    no_spatial_binding,
    solver_timeout,
    unreachable,
    malformed_response,
    timeout,
    missing_artifact,
    schema_version,
    io,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// Throws Errc::precondition with `message` unless `cond` holds.
inline void require(bool cond, const std::string& message)
{
    if (!cond) {
        throw Error(Errc::precondition, message);
    }
}

} // namespace insitu
