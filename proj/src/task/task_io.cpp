#include "insitu/task/task_io.hpp"

#include <sstream>

#include "insitu/core/error.hpp"
#include "insitu/sim/scene_io.hpp"

namespace insitu::task {

namespace {

template <class E, class Parse>
E parse_enum(const json& j, Parse parse, const char* what)
{
    auto v = parse(j.get<std::string>());
    if (!v) throw Error(Errc::precondition, std::string("unknown ") + what + " '" + j.get<std::string>() + "'");
    return *v;
}

json slots_json(const Slots& s)
{
    json j = json::object();
    for (const auto& [name, v] : s) j[name] = v;
    return j;
}

Slots slots_from(const json& j)
{
    Slots s;
    for (auto it = j.begin(); it != j.end(); ++it) s.emplace(it.key(), it.value().get<AttributeValue>());
    return s;
}

} // namespace

void to_json(json& j, const AttributeValue& v)
{
    j = json{{"kind", kind_name(v)}};
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ImageRef>) {
                j["record_id"] = x.record_id;
                j["box"] = x.box;
            } else if constexpr (!std::is_same_v<T, Unbound>) {
                j["value"] = x.value;
            }
        },
        v);
}

void from_json(const json& j, AttributeValue& v)
{
    const std::string k = j.at("kind").get<std::string>();
    if (k == "unbound") v = Unbound{};
    else if (k == "label") v = Label{j.at("value").get<std::string>()};
    else if (k == "image_ref") v = ImageRef{j.at("record_id").get<std::string>(), j.at("box").get<PixelBox>()};
    else if (k == "position") v = Position{j.at("value").get<Vec3>()};
    else if (k == "bbox2d") v = BBox2D{j.at("value").get<PixelBox>()};
    else if (k == "bbox3d") v = BBox3D{j.at("value").get<Aabb>()};
    else if (k == "count") v = Count{j.at("value").get<std::uint32_t>()};
    else if (k == "depth") v = Depth{j.at("value").get<double>()};
    else if (k == "relation_name") v = RelationName{j.at("value").get<std::string>()};
    else if (k == "answer_bool") v = AnswerBool{j.at("value").get<bool>()};
    else throw Error(Errc::precondition, "unknown attribute kind '" + k + "'");
}

void to_json(json& j, const TaskGraph& g)
{
    json vs = json::array();
    for (const auto& v : g.vertices()) {
        vs.push_back({{"id", to_int(v.id)}, {"semantic_type", to_string(v.semantic_type)}, {"attributes", slots_json(v.attributes)}});
    }
    json es = json::array();
    for (const auto& e : g.edges()) {
        es.push_back({{"src", to_int(e.src)},
                      {"dst", to_int(e.dst)},
                      {"relation_kind", to_string(e.relation_kind)},
                      {"attributes", slots_json(e.attributes)}});
    }
    j = json{{"vertices", vs}, {"edges", es}};
}

void from_json(const json& j, TaskGraph& g)
{
    std::vector<Vertex> vs;
    for (const auto& v : j.at("vertices")) {
        vs.push_back({VertexId{v.at("id").get<std::uint32_t>()},
                      parse_enum<SemanticType>(v.at("semantic_type"), parse_semantic_type, "semantic type"),
                      slots_from(v.at("attributes"))});
    }
    std::vector<Edge> es;
    for (const auto& e : j.at("edges")) {
        es.push_back({VertexId{e.at("src").get<std::uint32_t>()}, VertexId{e.at("dst").get<std::uint32_t>()},
                      parse_enum<RelationKind>(e.at("relation_kind"), parse_relation_kind, "relation kind"),
                      slots_from(e.at("attributes"))});
    }
    g = TaskGraph(std::move(vs), std::move(es));
}

void to_json(json& j, const Task& t)
{
    j = json{{"initial", t.initial}, {"final", t.final_state}, {"task_type", to_string(t.task_type)}, {"is_template", t.is_template}};
}

void from_json(const json& j, Task& t)
{
    t.initial = j.at("initial").get<TaskGraph>();
    t.final_state = j.at("final").get<TaskGraph>();
    t.task_type = parse_enum<TaskType>(j.at("task_type"), parse_task_type, "task type");
    t.is_template = j.at("is_template").get<bool>();
    validate_task(t);
}

void to_json(json& j, const TaskInstance& inst)
{
    json binding = json::object();
    for (const auto& [v, id] : inst.scene_binding) binding[std::to_string(to_int(v))] = id;
    json goal = nullptr;
    if (inst.nav_goal) {
        goal = {{"target_id", inst.nav_goal->target_id},
                {"success_radius", inst.nav_goal->success_radius},
                {"max_steps", inst.nav_goal->max_steps}};
    }
    json pose;
    sim::to_json(pose, inst.pose);
    j = json{{"kind", "instance"},     {"id", inst.id},
             {"task", inst.task},      {"scene_binding", binding},
             {"ground_truth", inst.ground_truth}, {"nav_goal", goal},
             {"prompt", inst.prompt},  {"created_at", inst.created_at},
             {"source", to_string(inst.source)}, {"scene_id", inst.scene_id},
             {"record_id", inst.record_id}, {"pose", pose}};
}

void from_json(const json& j, TaskInstance& inst)
{
    inst.id = j.at("id").get<std::string>();
    inst.task = j.at("task").get<Task>();
    inst.scene_binding.clear();
    for (auto it = j.at("scene_binding").begin(); it != j.at("scene_binding").end(); ++it) {
        inst.scene_binding[VertexId{static_cast<std::uint32_t>(std::stoul(it.key()))}] = it.value().get<std::string>();
    }
    inst.ground_truth = j.at("ground_truth").get<AttributeValue>();
    inst.nav_goal.reset();
    if (const auto& g = j.at("nav_goal"); !g.is_null()) {
        inst.nav_goal = NavGoal{g.at("target_id").get<std::string>(), g.at("success_radius").get<double>(),
                                g.at("max_steps").get<int>()};
    }
    inst.prompt = j.at("prompt").get<std::string>();
    inst.created_at = j.at("created_at").get<std::uint64_t>();
    inst.source = parse_enum<Source>(j.at("source"), parse_source, "source");
    inst.scene_id = j.at("scene_id").get<std::string>();
    inst.record_id = j.at("record_id").get<std::string>();
    sim::from_json(j.at("pose"), inst.pose);
}

std::string tasks_to_jsonl(const std::vector<TaskInstance>& instances, const std::vector<Task>& templates)
{
    std::string out = schema_header(kTasksSchema, kTasksSchemaVersion).dump() + "\n";
    for (const auto& i : instances) out += json(i).dump() + "\n";
    for (const auto& t : templates) out += json{{"kind", "template"}, {"task", t}}.dump() + "\n";
    return out;
}

TaskFile tasks_from_jsonl(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error(Errc::schema_version, "task file has no header line");
    json header;
    try {
        header = json::parse(line);
    } catch (const json::exception&) {
        throw Error(Errc::schema_version, "task file header is not JSON");
    }
    check_schema(header, kTasksSchema, kTasksSchemaVersion);
    TaskFile f;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            const std::string kind = j.at("kind").get<std::string>();
            if (kind == "instance") f.instances.push_back(j.get<TaskInstance>());
            else if (kind == "template") f.templates.push_back(j.at("task").get<Task>());
            else throw Error(Errc::precondition, "unknown record kind '" + kind + "'");
        } catch (const json::exception& e) {
            throw Error(Errc::precondition, "task file line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return f;
}

void write_tasks(const std::filesystem::path& path, const std::vector<TaskInstance>& instances,
                 const std::vector<Task>& templates)
{
    write_file(path, tasks_to_jsonl(instances, templates));
}

TaskFile read_tasks(const std::filesystem::path& path) { return tasks_from_jsonl(read_file(path)); }

} // namespace insitu::task
