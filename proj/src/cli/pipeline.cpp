#include "insitu/cli/pipeline.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <sstream>

#include "insitu/core/error.hpp"
#include "insitu/core/rng.hpp"
#include "insitu/filter/similarity.hpp"
#include "insitu/sim/observation_io.hpp"
#include "insitu/sim/scene_io.hpp"
#include "insitu/task/task_io.hpp"

namespace insitu::cli {

namespace fs = std::filesystem;
using task::TaskInstance;

namespace {

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string loop_name(int i) { return "loop_" + std::to_string(i); }

std::string schema_line(const char* schema, int version)
{
    return std::string("# schema ") + schema + " v" + std::to_string(version) + "\n";
}

void check_csv_schema(const std::string& first_line, const char* schema, const fs::path& path)
{
    const std::string want = schema_line(schema, kCsvSchemaVersion);
    if (first_line + "\n" != want) {
        throw Error(Errc::schema_version, path.string() + ": expected '" + want.substr(0, want.size() - 1) + "'");
    }
}

} // namespace

json run_options_to_json(const RunOptions& o)
{
    json types = json::array();
    for (auto t : o.loop.enabled_generators) types.push_back(std::string(task::to_string(t)));
    return json{
        {"seed", o.loop.seed},
        {"loops", o.loops},
        {"epsilon_schedule", o.loop.epsilon_schedule},
        {"epsilon_mode", o.loop.epsilon_mode == gen::EpsilonMode::per_loop ? "per_loop" : "per_step"},
        {"max_steps_per_task", o.loop.max_steps_per_task},
        {"walk_steps", o.loop.walk_steps},
        {"filter_k", o.loop.filter_k},
        {"use_filter", o.loop.use_filter},
        {"deduplicate", o.loop.deduplicate},
        {"enabled_generators", types},
        {"alpha", o.alpha},
        {"ablation", o.ablation},
        {"sidecars", o.sidecars},
        {"exact_force", o.exact_force},
    };
}

std::uint64_t config_hash(const json& resolved) { return mix64(fnv1a(resolved.dump())); }

filter::RecordLookup records_lookup(const std::vector<gen::LoopArtifacts>& loops)
{
    auto index = std::make_shared<std::map<std::string, const sim::ObservationRecord*>>();
    for (const auto& l : loops) {
        for (const auto& r : l.data.records) (*index)[r.record_id] = &r;
    }
    return [index](const TaskInstance&, const std::string& id) -> const sim::ObservationRecord* {
        auto it = index->find(id);
        return it == index->end() ? nullptr : it->second;
    };
}

metrics::MirResult task_mir(const std::vector<TaskInstance>& tasks, const sim::Scene& scene,
                            const filter::RecordLookup& lookup, double alpha, const metrics::MisOptions& mis)
{
    if (tasks.empty()) return metrics::MirResult{};
    const auto s = filter::similarity(tasks, filter::default_encoders(scene, lookup));
    return metrics::mir(s, alpha, mis);
}

PipelineResult run_pipeline(const sim::Scene& scene, const RunOptions& options, harness::Solver* solver)
{
    PipelineResult res;
    metrics::MisOptions mis;
    mis.force_exact = options.exact_force;
    if (options.exact_force) mis.node_budget = kExactForceNodes;
    res.loops = gen::run_loop(scene, gen::GeneratorRegistry::defaults(), options.loop, options.loops, solver);
    const auto lookup = records_lookup(res.loops);
    for (const auto& l : res.loops) res.mir.push_back({loop_name(l.loop_index), task_mir(l.tasks, scene, lookup, options.alpha, mis)});
    const auto pooled = gen::pooled_tasks(res.loops);
    res.mir.push_back({"pooled", task_mir(pooled, scene, lookup, options.alpha, mis)});

    if (options.ablation) {
        gen::LoopConfig c = options.loop;
        c.use_filter = false;
        res.ablation = gen::run_loop(scene, gen::GeneratorRegistry::defaults(), c, options.loops, solver);
        const auto alookup = records_lookup(res.ablation);
        for (std::size_t i = 1; i < res.ablation.size(); ++i) {
            res.mir.push_back({"ablation_" + loop_name(static_cast<int>(i)),
                               task_mir(res.ablation[i].tasks, scene, alookup, options.alpha, mis)});
        }
        res.mir.push_back({"ablation_pooled", task_mir(gen::pooled_tasks(res.ablation), scene, alookup, options.alpha, mis)});
    }

    if (!pooled.empty()) res.spatial = metrics::spatial_stats(pooled, scene);
    std::vector<harness::NavEpisode> eps;
    for (const auto& l : res.loops) eps.insert(eps.end(), l.episodes.begin(), l.episodes.end());
    if (!eps.empty()) res.nav = harness::compute_nav_metrics(eps);
    return res;
}

std::string mir_csv(const std::vector<SetMir>& rows, double alpha)
{
    std::string out = schema_line(kMetricsSchema, kCsvSchemaVersion) + "set,n,mis,mir,exact,alpha\n";
    for (const auto& r : rows) {
        out += r.name + "," + std::to_string(r.mir.total) + "," + std::to_string(r.mir.mis_size) + "," +
               num(r.mir.total ? r.mir.value() : 0.0) + "," + (r.mir.exact ? "1" : "0") + "," + num(alpha) + "\n";
    }
    return out;
}

std::string spatial_csv(const metrics::SpatialStats& s)
{
    std::string out = schema_line(kSpatialSchema, kCsvSchemaVersion) +
                      "v_all,delta_x,delta_y,delta_z,sigma_x,sigma_y,sigma_z,v_inst_mean,v_inst_sigma,n_obj\n";
    out += num(s.v_all);
    for (const auto& a : s.axes) out += "," + num(a.delta);
    for (const auto& a : s.axes) out += "," + num(a.sigma);
    out += "," + num(s.v_inst_mean) + "," + num(s.v_inst_sigma) + "," + std::to_string(s.n_obj) + "\n";
    return out;
}

void write_run(const fs::path& dir, const sim::Scene& scene, const RunOptions& options, const PipelineResult& result)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::io, "cannot create " + dir.string() + ": " + ec.message());

    const json resolved = run_options_to_json(options);
    json manifest = schema_header(kRunSchema, kRunSchemaVersion);
    manifest["scene_id"] = scene.id;
    manifest["config"] = resolved;
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016" PRIx64, config_hash(resolved));
    manifest["config_hash"] = hash;
    manifest["loops"] = json::array();
    for (const auto& l : result.loops) {
        manifest["loops"].push_back({{"loop", l.loop_index},
                                     {"epsilon", l.epsilon},
                                     {"explored", l.stats.explored},
                                     {"records", l.data.records.size()},
                                     {"tasks", l.tasks.size()},
                                     {"representatives", l.filtered.representatives.size()},
                                     {"episodes", l.stats.episodes},
                                     {"solver_failures", l.stats.solver_failures}});
    }
    write_json(dir / "manifest.json", manifest);
    sim::save_scene(dir / "scene.json", scene);

    std::string episodes = json{{"schema", kEpisodesSchema}, {"schema_version", 1}}.dump() + "\n";
    for (const auto& l : result.loops) {
        task::write_tasks(dir / (loop_name(l.loop_index) + ".jsonl"), l.tasks);
        task::write_tasks(dir / (loop_name(l.loop_index) + ".filtered.jsonl"), l.filtered.representatives);
        for (const auto& e : l.episodes) {
            json j = e;
            j["loop"] = l.loop_index;
            episodes += j.dump() + "\n";
        }
        if (options.sidecars) {
            const fs::path rd = dir / "records" / loop_name(l.loop_index);
            fs::create_directories(rd, ec);
            for (const auto& r : l.data.records) sim::write_observation(rd, r);
        }
    }
    write_file(dir / "episodes.jsonl", episodes);
    if (!result.ablation.empty()) {
        fs::create_directories(dir / "ablation", ec);
        for (const auto& l : result.ablation) task::write_tasks(dir / "ablation" / (loop_name(l.loop_index) + ".jsonl"), l.tasks);
    }
    write_file(dir / "metrics.csv", mir_csv(result.mir, options.alpha));
    write_file(dir / "spatial.csv", spatial_csv(result.spatial));
    if (result.nav) write_file(dir / "nav.csv", schema_line("insitu.nav", kCsvSchemaVersion) + harness::nav_metrics_csv(*result.nav));
}

namespace {

std::vector<std::string> csv_lines(const fs::path& path, const char* schema)
{
    if (!fs::exists(path)) throw Error(Errc::missing_artifact, "missing " + path.string());
    std::istringstream in(read_file(path));
    std::string line;
    std::vector<std::string> lines;
    if (!std::getline(in, line)) throw Error(Errc::missing_artifact, "empty " + path.string());
    check_csv_schema(line, schema, path);
    std::getline(in, line); // column names
    while (std::getline(in, line)) {
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

std::vector<std::string> split(const std::string& s)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(s);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    return out;
}

std::vector<fs::path> find_runs(const fs::path& root)
{
    if (!fs::is_directory(root)) throw Error(Errc::missing_artifact, "no run directory " + root.string());
    if (fs::exists(root / "manifest.json")) return {root};
    std::vector<fs::path> runs;
    for (const auto& e : fs::directory_iterator(root)) {
        if (e.is_directory() && fs::exists(e.path() / "manifest.json")) runs.push_back(e.path());
    }
    std::sort(runs.begin(), runs.end());
    if (runs.empty()) throw Error(Errc::missing_artifact, "no run artifacts under " + root.string());
    return runs;
}

std::string cell_mir(const std::map<std::string, std::pair<std::size_t, std::size_t>>& m, const std::string& key)
{
    auto it = m.find(key);
    if (it == m.end() || it->second.second == 0) return "-";
    return metrics::mir_from_counts(it->second.first, it->second.second).display();
}

double ratio(const std::pair<std::size_t, std::size_t>& p)
{
    return p.second ? static_cast<double>(p.first) / static_cast<double>(p.second) : 0.0;
}

} // namespace

std::map<std::string, std::pair<std::size_t, std::size_t>> read_mir_csv(const fs::path& path)
{
    std::map<std::string, std::pair<std::size_t, std::size_t>> out;
    for (const auto& line : csv_lines(path, kMetricsSchema)) {
        const auto c = split(line);
        if (c.size() < 3) throw Error(Errc::schema_version, "malformed row in " + path.string() + ": " + line);
        out[c[0]] = {std::stoull(c[2]), std::stoull(c[1])};
    }
    return out;
}

fs::path export_report(const fs::path& runs_root, const fs::path& out_dir)
{
    const auto runs = find_runs(runs_root);
    const fs::path out = out_dir.empty() ? runs_root / "report" : out_dir;

    std::string mir_md = "| scene | tau | tau' | tau + tau' | no-filter tau + tau' |\n|---|---|---|---|---|\n";
    std::string mir_rows = schema_line("insitu.report.mir", kCsvSchemaVersion) +
                           "scene,tau_mis,tau_n,tau_prime_mis,tau_prime_n,pooled_mis,pooled_n,ablation_mis,ablation_n\n";
    std::string sp_md = "| scene | V_all (m^3) | dx | dy | dz | sx | sy | sz | V_inst (m^3) | N_obj |\n"
                        "|---|---|---|---|---|---|---|---|---|---|\n";
    std::string sp_rows = schema_line("insitu.report.spatial", kCsvSchemaVersion) +
                          "scene,v_all,delta_x,delta_y,delta_z,sigma_x,sigma_y,sigma_z,v_inst_mean,v_inst_sigma,n_obj\n";
    std::string nav_rows;
    std::vector<double> pooled, ablation;

    for (const auto& run : runs) {
        const std::string name = run.filename().string();
        const auto m = read_mir_csv(run / "metrics.csv");
        const auto sp = csv_lines(run / "spatial.csv", kSpatialSchema);
        if (sp.size() != 1) throw Error(Errc::schema_version, "spatial.csv must hold one row: " + run.string());

        mir_md += "| " + name + " | " + cell_mir(m, "loop_0") + " | " + cell_mir(m, "loop_1") + " | " + cell_mir(m, "pooled") +
                  " | " + cell_mir(m, "ablation_pooled") + " |\n";
        auto pair_cells = [&](const std::string& key) {
            auto it = m.find(key);
            return it == m.end() ? std::string(",") : std::to_string(it->second.first) + "," + std::to_string(it->second.second);
        };
        mir_rows += name + "," + pair_cells("loop_0") + "," + pair_cells("loop_1") + "," + pair_cells("pooled") + "," +
                    pair_cells("ablation_pooled") + "\n";
        if (m.count("pooled") && m.count("ablation_pooled")) {
            pooled.push_back(ratio(m.at("pooled")));
            ablation.push_back(ratio(m.at("ablation_pooled")));
        }

        const auto c = split(sp.front());
        if (c.size() != 10) throw Error(Errc::schema_version, "malformed spatial row in " + run.string());
        sp_md += "| " + name + " | " + c[0] + " | " + c[1] + " | " + c[2] + " | " + c[3] + " | " + c[4] + " | " + c[5] + " | " +
                 c[6] + " | " + c[7] + " +- " + c[8] + " | " + c[9] + " |\n";
        sp_rows += name + "," + sp.front() + "\n";

        if (fs::exists(run / "nav.csv")) {
            std::istringstream in(read_file(run / "nav.csv"));
            std::string schema, header, row;
            std::getline(in, schema);
            std::getline(in, header);
            std::getline(in, row);
            if (nav_rows.empty()) nav_rows = schema + "\nscene," + header + "\n";
            nav_rows += name + "," + row + "\n";
        }
    }
    if (pooled.size() >= 3) {
        const auto t = metrics::paired_ttest(pooled, ablation);
        char buf[160];
        std::snprintf(buf, sizeof buf, "\npaired t-test, tau + tau' vs no-filter: t = %.4f, p = %.4g, n = %zu\n", t.t, t.p,
                      pooled.size());
        mir_md += buf;
    }

    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw Error(Errc::io, "cannot create " + out.string() + ": " + ec.message());
    write_file(out / "mir_table.md", mir_md);
    write_file(out / "mir.csv", mir_rows);
    write_file(out / "spatial_table.md", sp_md);
    write_file(out / "spatial.csv", sp_rows);
    if (!nav_rows.empty()) write_file(out / "nav.csv", nav_rows);
    return out;
}

} // namespace insitu::cli
