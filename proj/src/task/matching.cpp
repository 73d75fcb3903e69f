#include "insitu/task/matching.hpp"

#include <algorithm>
#include <numeric>

#include "insitu/core/error.hpp"

namespace insitu::task {

namespace {

bool slot_names_fit(const Slots& pattern, const Slots& host, bool exact)
{
    if (exact && pattern.size() != host.size()) {
        return false;
    }
    return std::all_of(pattern.begin(), pattern.end(), [&](const auto& kv) { return host.contains(kv.first); });
}

class Matcher {
public:
    Matcher(const TaskGraph& pattern, const TaskGraph& host, const MatchOptions& options)
        : p_(pattern)
        , h_(host)
        , opt_(options)
    {
        order_.resize(p_.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        // Most constrained first: high degree, then many slots.
        std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
            const auto& va = p_.vertices()[a];
            const auto& vb = p_.vertices()[b];
            const auto da = p_.degree(va.id);
            const auto db = p_.degree(vb.id);
            if (da != db) return da > db;
            return va.attributes.size() > vb.attributes.size();
        });
        candidates_.resize(p_.size());
        for (std::size_t i = 0; i < p_.size(); ++i) {
            const Vertex& pv = p_.vertices()[i];
            const auto pdeg = p_.degree(pv.id);
            for (std::size_t j = 0; j < h_.size(); ++j) {
                const Vertex& hv = h_.vertices()[j];
                const auto hdeg = h_.degree(hv.id);
                if (pv.semantic_type != hv.semantic_type) continue;
                if (opt_.exact ? pdeg != hdeg : pdeg > hdeg) continue;
                if (!slot_names_fit(pv.attributes, hv.attributes, opt_.exact)) continue;
                candidates_[i].push_back(j);
            }
        }
        assigned_.assign(p_.size(), kNone);
        used_.assign(h_.size(), false);
    }

    std::vector<VertexMapping> run()
    {
        search(0);
        std::sort(results_.begin(), results_.end());
        return std::move(results_);
    }

private:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

    std::size_t pattern_index(VertexId id) const
    {
        const Vertex* v = p_.find(id);
        return static_cast<std::size_t>(v - p_.vertices().data());
    }

    bool edges_consistent(std::size_t pi) const
    {
        const VertexId pid = p_.vertices()[pi].id;
        for (const Edge& e : p_.edges()) {
            if (e.src != pid && e.dst != pid) continue;
            const std::size_t si = pattern_index(e.src);
            const std::size_t di = pattern_index(e.dst);
            if (assigned_[si] == kNone || assigned_[di] == kNone) continue;
            const EdgeKey hk{h_.vertices()[assigned_[si]].id, h_.vertices()[assigned_[di]].id, e.relation_kind};
            const Edge* he = h_.find(hk);
            if (he == nullptr || !slot_names_fit(e.attributes, he->attributes, opt_.exact)) {
                return false;
            }
        }
        return true;
    }

    void search(std::size_t depth)
    {
        if (results_.size() >= opt_.max_results) return;
        if (depth == order_.size()) {
            VertexMapping m;
            for (std::size_t i = 0; i < p_.size(); ++i) {
                m.emplace(p_.vertices()[i].id, h_.vertices()[assigned_[i]].id);
            }
            results_.push_back(std::move(m));
            return;
        }
        const std::size_t pi = order_[depth];
        for (std::size_t hj : candidates_[pi]) {
            if (used_[hj]) continue;
            assigned_[pi] = hj;
            used_[hj] = true;
            if (edges_consistent(pi)) {
                search(depth + 1);
            }
            used_[hj] = false;
            assigned_[pi] = kNone;
            if (results_.size() >= opt_.max_results) return;
        }
    }

    const TaskGraph& p_;
    const TaskGraph& h_;
    MatchOptions opt_;
    std::vector<std::size_t> order_;
    std::vector<std::vector<std::size_t>> candidates_;
    std::vector<std::size_t> assigned_;
    std::vector<bool> used_;
    std::vector<VertexMapping> results_;
};

} // namespace

std::vector<VertexMapping> substructure_mappings(const TaskGraph& pattern, const TaskGraph& host,
                                                 const MatchOptions& options)
{
    if (pattern.size() > options.node_limit || host.size() > options.node_limit) {
        throw Error(Errc::search_budget_exceeded, "graph exceeds node limit of " + std::to_string(options.node_limit));
    }
    if (pattern.size() > host.size()) return {};
    if (options.exact && (pattern.size() != host.size() || pattern.edges().size() != host.edges().size())) return {};
    return Matcher(pattern, host, options).run();
}

bool is_substructure(const TaskGraph& pattern, const TaskGraph& host, const MatchOptions& options)
{
    MatchOptions o = options;
    o.max_results = 1;
    return !substructure_mappings(pattern, host, o).empty();
}

bool isomorphic(const TaskGraph& a, const TaskGraph& b, std::size_t node_limit)
{
    MatchOptions o;
    o.node_limit = node_limit;
    o.exact = true;
    o.max_results = 1;
    return !substructure_mappings(a, b, o).empty();
}

TaskGraph annotated_structure(const Task& t)
{
    auto tag = [](const Slots& given, const Slots& all) {
        Slots out;
        for (const auto& [name, value] : all) {
            out.emplace((given.contains(name) ? "in:" : "out:") + name, value);
        }
        return out;
    };
    static const Slots kNoSlots;
    std::vector<Vertex> vertices;
    for (const Vertex& v : t.final_state.vertices()) {
        const Vertex* iv = t.initial.find(v.id);
        vertices.push_back({v.id, v.semantic_type, tag(iv ? iv->attributes : kNoSlots, v.attributes)});
    }
    std::vector<Edge> edges;
    for (const Edge& e : t.final_state.edges()) {
        const Edge* ie = t.initial.find(e.key());
        edges.push_back({e.src, e.dst, e.relation_kind, tag(ie ? ie->attributes : kNoSlots, e.attributes)});
    }
    return TaskGraph(std::move(vertices), std::move(edges));
}

bool tasks_isomorphic(const Task& a, const Task& b)
{
    return isomorphic(annotated_structure(a), annotated_structure(b));
}

} // namespace insitu::task
