#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "insitu/task/attribute.hpp"

namespace insitu::task {

/// Graph-local vertex id.
enum class VertexId : std::uint32_t {};

constexpr std::uint32_t to_int(VertexId id) noexcept { return static_cast<std::uint32_t>(id); }

enum class SemanticType { object, scene, agent, region };
enum class RelationKind { spatial, ownership, containment, visibility };

std::string_view to_string(SemanticType t) noexcept;
std::string_view to_string(RelationKind k) noexcept;
std::optional<SemanticType> parse_semantic_type(std::string_view s) noexcept;
std::optional<RelationKind> parse_relation_kind(std::string_view s) noexcept;

using Slots = std::map<std::string, AttributeValue>;

struct Vertex {
    VertexId id{};
    SemanticType semantic_type = SemanticType::object;
    Slots attributes;

    friend bool operator==(const Vertex&, const Vertex&) = default;
};

struct EdgeKey {
    VertexId src{};
    VertexId dst{};
    RelationKind relation_kind = RelationKind::spatial;

    friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

struct Edge {
    VertexId src{};
    VertexId dst{};
    RelationKind relation_kind = RelationKind::spatial;
    Slots attributes;

    EdgeKey key() const noexcept { return {src, dst, relation_kind}; }
    friend bool operator==(const Edge&, const Edge&) = default;
};

/**
 * One task state: vertices, edges and their attribute slots.
 *
 * Vertices are kept sorted by id and edges by (src, dst, kind), so two
 * graphs with the same content compare equal and serialize identically.
 */
class TaskGraph {
public:
    TaskGraph() = default;

    /// Validates and canonicalizes. Throws Errc::precondition on duplicate
    /// vertex ids, dangling or self-loop edges, or duplicate edges.
    TaskGraph(std::vector<Vertex> vertices, std::vector<Edge> edges);

    const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::size_t size() const noexcept { return vertices_.size(); }
    bool empty() const noexcept { return vertices_.empty(); }

    const Vertex* find(VertexId id) const noexcept;
    const Edge* find(const EdgeKey& key) const noexcept;

    /// Number of edges incident to `id` in either direction.
    std::size_t degree(VertexId id) const noexcept;

    /// Count of UNBOUND slots across vertices and edges.
    std::size_t unbound_count() const noexcept;

    friend bool operator==(const TaskGraph&, const TaskGraph&) = default;

private:
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
};

/// Where an added slot lives: on a vertex or on an edge.
struct SlotOwner {
    std::optional<VertexId> vertex;
    std::optional<EdgeKey> edge;

    friend bool operator==(const SlotOwner&, const SlotOwner&) = default;
};

struct AddedSlot {
    SlotOwner owner;
    std::string name;
    AttributeValue value;

    friend bool operator==(const AddedSlot&, const AddedSlot&) = default;
};

/// Elements present in a final state and absent from its initial state.
struct DiffSet {
    std::vector<Vertex> vertices;
    std::vector<Edge> edges;
    std::vector<AddedSlot> slots; ///< slots added to vertices/edges that already exist in the initial state

    bool empty() const noexcept { return vertices.empty() && edges.empty() && slots.empty(); }
    friend bool operator==(const DiffSet&, const DiffSet&) = default;
};

/// Throws Errc::structural_regression if `final_state` drops or changes any
/// element of `initial`.
DiffSet state_diff(const TaskGraph& initial, const TaskGraph& final_state);

/// Inverse of state_diff: initial plus diff.
TaskGraph apply_diff(const TaskGraph& initial, const DiffSet& diff);

} // namespace insitu::task
