#include "insitu/task/task_graph.hpp"

#include <algorithm>
#include <set>

#include "insitu/core/error.hpp"

namespace insitu::task {

std::string_view to_string(SemanticType t) noexcept
{
    switch (t) {
    case SemanticType::object: return "object";
    case SemanticType::scene: return "scene";
    case SemanticType::agent: return "agent";
    case SemanticType::region: return "region";
    }
    return "object";
}

std::string_view to_string(RelationKind k) noexcept
{
    switch (k) {
    case RelationKind::spatial: return "spatial";
    case RelationKind::ownership: return "ownership";
    case RelationKind::containment: return "containment";
    case RelationKind::visibility: return "visibility";
    }
    return "spatial";
}

std::optional<SemanticType> parse_semantic_type(std::string_view s) noexcept
{
    for (auto t : {SemanticType::object, SemanticType::scene, SemanticType::agent, SemanticType::region}) {
        if (to_string(t) == s) return t;
    }
    return std::nullopt;
}

std::optional<RelationKind> parse_relation_kind(std::string_view s) noexcept
{
    for (auto k : {RelationKind::spatial, RelationKind::ownership, RelationKind::containment, RelationKind::visibility}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

TaskGraph::TaskGraph(std::vector<Vertex> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices))
    , edges_(std::move(edges))
{
    std::sort(vertices_.begin(), vertices_.end(), [](const Vertex& a, const Vertex& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < vertices_.size(); ++i) {
        require(vertices_[i - 1].id != vertices_[i].id, "duplicate vertex id " + std::to_string(to_int(vertices_[i].id)));
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) { return a.key() < b.key(); });
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const Edge& e = edges_[i];
        require(e.src != e.dst, "edge endpoints must differ");
        require(find(e.src) != nullptr && find(e.dst) != nullptr, "edge endpoint does not resolve");
        if (i > 0) {
            require(!(edges_[i - 1].key() == e.key()), "duplicate edge");
        }
    }
}

const Vertex* TaskGraph::find(VertexId id) const noexcept
{
    auto it = std::lower_bound(vertices_.begin(), vertices_.end(), id,
                               [](const Vertex& v, VertexId x) { return v.id < x; });
    return (it != vertices_.end() && it->id == id) ? &*it : nullptr;
}

const Edge* TaskGraph::find(const EdgeKey& key) const noexcept
{
    auto it = std::lower_bound(edges_.begin(), edges_.end(), key,
                               [](const Edge& e, const EdgeKey& k) { return e.key() < k; });
    return (it != edges_.end() && it->key() == key) ? &*it : nullptr;
}

std::size_t TaskGraph::degree(VertexId id) const noexcept
{
    return static_cast<std::size_t>(
        std::count_if(edges_.begin(), edges_.end(), [id](const Edge& e) { return e.src == id || e.dst == id; }));
}

std::size_t TaskGraph::unbound_count() const noexcept
{
    std::size_t n = 0;
    auto count_slots = [&n](const Slots& s) {
        for (const auto& [name, value] : s) {
            n += is_unbound(value) ? 1 : 0;
        }
    };
    for (const auto& v : vertices_) count_slots(v.attributes);
    for (const auto& e : edges_) count_slots(e.attributes);
    return n;
}

namespace {

void diff_slots(const Slots& before, const Slots& after, const SlotOwner& owner, const std::string& where,
                std::vector<AddedSlot>& out)
{
    for (const auto& [name, value] : before) {
        auto it = after.find(name);
        if (it == after.end()) {
            throw Error(Errc::structural_regression, where + " drops slot '" + name + "'");
        }
        if (!(it->second == value)) {
            throw Error(Errc::structural_regression, where + " changes slot '" + name + "'");
        }
    }
    for (const auto& [name, value] : after) {
        if (!before.contains(name)) {
            out.push_back({owner, name, value});
        }
    }
}

} // namespace

DiffSet state_diff(const TaskGraph& initial, const TaskGraph& final_state)
{
    DiffSet diff;
    for (const auto& v : initial.vertices()) {
        const Vertex* f = final_state.find(v.id);
        const std::string where = "vertex " + std::to_string(to_int(v.id));
        if (f == nullptr) {
            throw Error(Errc::structural_regression, where + " removed");
        }
        if (f->semantic_type != v.semantic_type) {
            throw Error(Errc::structural_regression, where + " changes semantic type");
        }
        diff_slots(v.attributes, f->attributes, SlotOwner{v.id, std::nullopt}, where, diff.slots);
    }
    for (const auto& v : final_state.vertices()) {
        if (initial.find(v.id) == nullptr) {
            diff.vertices.push_back(v);
        }
    }
    for (const auto& e : initial.edges()) {
        const Edge* f = final_state.find(e.key());
        const std::string where = "edge " + std::to_string(to_int(e.src)) + "->" + std::to_string(to_int(e.dst));
        if (f == nullptr) {
            throw Error(Errc::structural_regression, where + " removed");
        }
        diff_slots(e.attributes, f->attributes, SlotOwner{std::nullopt, e.key()}, where, diff.slots);
    }
    for (const auto& e : final_state.edges()) {
        if (initial.find(e.key()) == nullptr) {
            diff.edges.push_back(e);
        }
    }
    return diff;
}

TaskGraph apply_diff(const TaskGraph& initial, const DiffSet& diff)
{
    std::vector<Vertex> vertices = initial.vertices();
    std::vector<Edge> edges = initial.edges();
    for (const auto& s : diff.slots) {
        Slots* target = nullptr;
        if (s.owner.vertex) {
            auto it = std::find_if(vertices.begin(), vertices.end(), [&](const Vertex& v) { return v.id == *s.owner.vertex; });
            require(it != vertices.end(), "diff slot owner vertex missing");
            target = &it->attributes;
        } else {
            require(s.owner.edge.has_value(), "diff slot without owner");
            auto it = std::find_if(edges.begin(), edges.end(), [&](const Edge& e) { return e.key() == *s.owner.edge; });
            require(it != edges.end(), "diff slot owner edge missing");
            target = &it->attributes;
        }
        require(!target->contains(s.name), "diff slot already present: " + s.name);
        target->emplace(s.name, s.value);
    }
    vertices.insert(vertices.end(), diff.vertices.begin(), diff.vertices.end());
    edges.insert(edges.end(), diff.edges.begin(), diff.edges.end());
    return TaskGraph(std::move(vertices), std::move(edges));
}

} // namespace insitu::task
