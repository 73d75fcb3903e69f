#include "insitu/core/error.hpp"

namespace insitu {

std::string_view errc_name(Errc code)
{
    switch (code) {
    case Errc::precondition: return "Precondition";
    case Errc::structural_regression: return "StructuralRegression";
    case Errc::search_budget_exceeded: return "SearchBudgetExceeded";
    case Errc::unbound_slot: return "UnboundSlot";
    case Errc::missing_entity: return "MissingEntity";
    case Errc::pose_out_of_bounds: return "PoseOutOfBounds";
    case Errc::placement_failure: return "PlacementFailure";
    case Errc::no_eligible_label: return "NoEligibleLabel";
    case Errc::no_visible_entity: return "NoVisibleEntity";
    case Errc::no_entity_pair: return "NoEntityPair";
    case Errc::no_distant_target: return "NoDistantTarget";
    case Errc::solver_failure: return "SolverFailure";
    case Errc::zero_vector: return "ZeroVector";
    case Errc::no_exchangeable_vertices: return "NoExchangeableVertices";
    case Errc::empty_task_set: return "EmptyTaskSet";
    case Errc::empty_evolved_set: return "EmptyEvolvedSet";
    case Errc::no_spatial_binding: return "NoSpatialBinding";
    case Errc::solver_timeout: return "SolverTimeout";
    case Errc::unreachable: return "Unreachable";
    case Errc::malformed_response: return "MalformedResponse";
    case Errc::timeout: return "Timeout";
    case Errc::missing_artifact: return "MissingArtifact";
    case Errc::schema_version: return "SchemaVersion";
    case Errc::io: return "IO";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message)
    , code_(code)
{
}

} // namespace insitu
