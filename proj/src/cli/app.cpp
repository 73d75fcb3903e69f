#include "insitu/cli/app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "insitu/cli/pipeline.hpp"
#include "insitu/core/error.hpp"
#include "insitu/evolution/evolution.hpp"
#include "insitu/filter/filter.hpp"
#include "insitu/filter/similarity.hpp"
#include "insitu/harness/remote.hpp"
#include "insitu/harness/solver.hpp"
#include "insitu/sim/observation_io.hpp"
#include "insitu/sim/scene_gen.hpp"
#include "insitu/sim/scene_io.hpp"
#include "insitu/task/task_io.hpp"

namespace insitu::cli {

namespace fs = std::filesystem;
using task::TaskInstance;

namespace {

std::set<task::TaskType> parse_types(const std::vector<std::string>& names)
{
    if (names.empty()) return gen::all_generated_types();
    std::set<task::TaskType> out;
    for (const auto& n : names) {
        auto t = task::parse_task_type(n);
        if (!t || *t == task::TaskType::composite) throw CLI::ValidationError("--types", "unknown task type " + n);
        out.insert(*t);
    }
    return out;
}

struct SolverChoice {
    std::string kind = "oracle";
    std::string endpoint;
};

std::unique_ptr<harness::Solver> make_solver(const SolverChoice& c, const sim::Scene& scene)
{
    if (c.kind == "oracle") return std::make_unique<harness::OracleSolver>(scene);
    harness::RemoteConfig rc = harness::remote_config_from_env();
    if (!c.endpoint.empty()) rc.endpoint = c.endpoint;
    require(!rc.endpoint.empty(), std::string("remote solver needs --endpoint or ") + harness::kSolverEndpointEnv);
    return std::make_unique<harness::RemoteSolver>(rc);
}

/// Records under `dir/<loop>/` or `dir/`, loaded on first use.
filter::RecordLookup disk_lookup(const fs::path& dir)
{
    if (dir.empty()) return {};
    auto cache = std::make_shared<std::map<std::string, std::optional<sim::ObservationRecord>>>();
    return [dir, cache](const TaskInstance&, const std::string& id) -> const sim::ObservationRecord* {
        auto it = cache->find(id);
        if (it == cache->end()) {
            std::optional<sim::ObservationRecord> rec;
            std::vector<fs::path> dirs{dir};
            for (const auto& e : fs::directory_iterator(dir)) {
                if (e.is_directory()) dirs.push_back(e.path());
            }
            for (const auto& d : dirs) {
                if (fs::exists(d / (id + ".json"))) {
                    rec = sim::read_observation(d, id);
                    break;
                }
            }
            it = cache->emplace(id, std::move(rec)).first;
        }
        return it->second ? &*it->second : nullptr;
    };
}

/// First numeric cell of every data row; '#' lines and a header are skipped.
std::vector<double> read_column(const fs::path& path, const std::string& column)
{
    std::istringstream in(read_file(path));
    std::string line;
    std::vector<double> out;
    int col = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> cells;
        std::string c;
        std::istringstream ls(line);
        while (std::getline(ls, c, ',')) cells.push_back(c);
        if (col < 0) {
            auto it = std::find(cells.begin(), cells.end(), column);
            if (it != cells.end()) {
                col = static_cast<int>(it - cells.begin());
                continue;
            }
            col = 0;
        }
        try {
            out.push_back(std::stod(cells.at(static_cast<std::size_t>(col))));
        } catch (const std::exception&) {
            if (out.empty() && col == 0) continue; // unnamed header row
            throw Error(Errc::precondition, path.string() + ": not a number in '" + line + "'");
        }
    }
    return out;
}

void write_or_print(const std::string& path, const std::string& text, std::ostream& out)
{
    if (path.empty()) out << text;
    else write_file(path, text);
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"in-situ task generation, evolution and scoring engine", "insitu"};
    app.set_config("--config", "", "TOML/INI file with the same keys as the flags; flags win");
    app.require_subcommand(1);
    bool quiet = false;
    app.add_flag("-q,--quiet", quiet, "Do not log the resolved configuration");

    // scene gen
    auto* scene_cmd = app.add_subcommand("scene", "Scene files");
    scene_cmd->require_subcommand(1);
    auto* scene_gen = scene_cmd->add_subcommand("gen", "Generate a procedural room");
    std::uint64_t scene_seed = 0;
    std::string scene_out;
    double mirror_p = sim::SceneProfile{}.mirror_probability;
    scene_gen->add_option("--seed", scene_seed, "Scene seed")->required();
    scene_gen->add_option("--out", scene_out, "Output scene JSON")->required();
    scene_gen->add_option("--mirror-probability", mirror_p, "Chance of a wall mirror")->check(CLI::Range(0.0, 1.0));

    // run
    auto* run_cmd = app.add_subcommand("run", "Agent-in-loop generation over one or more scenes");
    RunOptions ro;
    std::string run_scene, run_out;
    std::vector<std::uint64_t> run_scene_seeds;
    std::vector<std::string> type_names;
    std::string eps_mode = "per_loop";
    bool no_ablation = false, no_sidecars = false, no_filter = false;
    SolverChoice run_solver;
    auto* scene_opt = run_cmd->add_option("--scene", run_scene, "Scene JSON")->check(CLI::ExistingFile);
    run_cmd->add_option("--scene-seed", run_scene_seeds, "Generate scene(s) from seed(s); one subdirectory each")
        ->excludes(scene_opt);
    run_cmd->add_option("--loops", ro.loops, "Number of loops")->check(CLI::PositiveNumber)->capture_default_str();
    run_cmd->add_option("--epsilon-schedule", ro.loop.epsilon_schedule, "Per-loop epsilon; last entry repeats")
        ->delimiter(',')
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    run_cmd->add_option("--epsilon-mode", eps_mode, "per_loop or per_step")
        ->check(CLI::IsMember({"per_loop", "per_step"}))
        ->capture_default_str();
    run_cmd->add_option("--seed", ro.loop.seed, "Run seed")->capture_default_str();
    run_cmd->add_option("--k", ro.loop.filter_k, "Representatives kept per loop")->check(CLI::PositiveNumber)->capture_default_str();
    run_cmd->add_option("--max-steps", ro.loop.max_steps_per_task, "Step cap per executed task")->capture_default_str();
    run_cmd->add_option("--walk-steps", ro.loop.walk_steps, "Random-walk length")->capture_default_str();
    run_cmd->add_option("--alpha", ro.alpha, "Redundancy threshold for MIR")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    run_cmd->add_flag("--exact-force", ro.exact_force, "Exact MIS above the size cap (bounded node budget)");
    run_cmd->add_option("--types", type_names, "Enabled task types (default all)")->delimiter(',');
    run_cmd->add_flag("--no-filter", no_filter, "Carry every interactive task to the next loop");
    run_cmd->add_flag("--no-ablation", no_ablation, "Skip the no-filter comparison run");
    run_cmd->add_flag("--no-sidecars", no_sidecars, "Do not dump observation rasters");
    run_cmd->add_option("--solver", run_solver.kind, "oracle or remote")
        ->check(CLI::IsMember({"oracle", "remote"}))
        ->capture_default_str();
    run_cmd->add_option("--endpoint", run_solver.endpoint, "Remote solver base URL");
    run_cmd->add_option("--out", run_out, "Run directory")->required();

    // filter
    auto* filter_cmd = app.add_subcommand("filter", "Spectral-cluster a task file down to k representatives");
    std::string f_in, f_scene, f_out, f_sim, f_records;
    int f_k = 5;
    std::uint64_t f_seed = 0;
    filter_cmd->add_option("--in", f_in, "Task JSONL")->required()->check(CLI::ExistingFile);
    filter_cmd->add_option("--scene", f_scene, "Scene JSON")->required()->check(CLI::ExistingFile);
    filter_cmd->add_option("--k", f_k, "Clusters")->check(CLI::PositiveNumber)->capture_default_str();
    filter_cmd->add_option("--seed", f_seed, "Clustering seed")->capture_default_str();
    filter_cmd->add_option("--records", f_records, "Observation sidecar directory")->check(CLI::ExistingDirectory);
    filter_cmd->add_option("--out", f_out, "Representatives JSONL")->required();
    filter_cmd->add_option("--sim-out", f_sim, "Similarity matrix file");

    // evolve
    auto* evolve_cmd = app.add_subcommand("evolve", "Reuse and recombination over a task file");
    std::string e_in, e_scene, e_out, e_records;
    evolution::EvolutionRules rules;
    bool no_reuse = false, no_recomb = false;
    std::vector<std::string> e_types;
    evolve_cmd->add_option("--in", e_in, "Task JSONL")->required()->check(CLI::ExistingFile);
    evolve_cmd->add_option("--scene", e_scene, "Scene JSON")->required()->check(CLI::ExistingFile);
    evolve_cmd->add_option("--out", e_out, "Evolved JSONL")->required();
    evolve_cmd->add_option("--budget", rules.budget, "New instances per call")->capture_default_str();
    evolve_cmd->add_option("--records", e_records, "Observation sidecar directory")->check(CLI::ExistingDirectory);
    evolve_cmd->add_option("--types", e_types, "Emitted task types (default all)")->delimiter(',');
    evolve_cmd->add_flag("--no-reuse", no_reuse, "Disable reuse");
    evolve_cmd->add_flag("--no-recombination", no_recomb, "Disable recombination");

    // metrics
    auto* metrics_cmd = app.add_subcommand("metrics", "Diversity, spatial and significance metrics");
    metrics_cmd->require_subcommand(1);
    std::string m_sim, m_in, m_scene, m_out, m_records, m_initial, m_evolved, m_a, m_b, m_column = "mir", m_episodes;
    double m_alpha = metrics::kDefaultAlpha;
    auto* mir_cmd = metrics_cmd->add_subcommand("mir", "Maximum independent ratio");
    auto* sim_opt = mir_cmd->add_option("--sim", m_sim, "Similarity matrix file")->check(CLI::ExistingFile);
    mir_cmd->add_option("--in", m_in, "Task JSONL (with --scene)")->check(CLI::ExistingFile)->excludes(sim_opt);
    mir_cmd->add_option("--scene", m_scene, "Scene JSON")->check(CLI::ExistingFile);
    mir_cmd->add_option("--records", m_records, "Observation sidecar directory")->check(CLI::ExistingDirectory);
    mir_cmd->add_option("--alpha", m_alpha, "Redundancy threshold")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    mir_cmd->add_option("--out", m_out, "CSV output (default stdout)");
    bool m_exact = false;
    mir_cmd->add_flag("--exact-force", m_exact, "Exact MIS above the size cap (bounded node budget)");
    auto* mire_cmd = metrics_cmd->add_subcommand("mir-e", "Share of evolved tasks that enlarge the MIS");
    mire_cmd->add_option("--initial", m_initial, "Initial task JSONL")->required()->check(CLI::ExistingFile);
    mire_cmd->add_option("--evolved", m_evolved, "Evolved task JSONL")->required()->check(CLI::ExistingFile);
    mire_cmd->add_option("--scene", m_scene, "Scene JSON")->required()->check(CLI::ExistingFile);
    mire_cmd->add_option("--records", m_records, "Observation sidecar directory")->check(CLI::ExistingDirectory);
    mire_cmd->add_option("--alpha", m_alpha, "Redundancy threshold")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    auto* spatial_cmd = metrics_cmd->add_subcommand("spatial", "Spatial coverage of a task set");
    spatial_cmd->add_option("--in", m_in, "Task JSONL")->required()->check(CLI::ExistingFile);
    spatial_cmd->add_option("--scene", m_scene, "Scene JSON")->required()->check(CLI::ExistingFile);
    spatial_cmd->add_option("--out", m_out, "CSV output (default stdout)");
    auto* ttest_cmd = metrics_cmd->add_subcommand("ttest", "Paired two-sided t-test");
    ttest_cmd->add_option("--a", m_a, "CSV or one value per line")->required()->check(CLI::ExistingFile);
    ttest_cmd->add_option("--b", m_b, "CSV or one value per line")->required()->check(CLI::ExistingFile);
    ttest_cmd->add_option("--column", m_column, "Column name when the files have a header")->capture_default_str();
    auto* nav_cmd = metrics_cmd->add_subcommand("nav", "Navigation metrics from an episodes file");
    nav_cmd->add_option("--episodes", m_episodes, "episodes.jsonl")->required()->check(CLI::ExistingFile);

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "Score a solver on a task file");
    std::string b_in, b_scene, b_out;
    SolverChoice b_solver;
    bench_cmd->add_option("--in", b_in, "Task JSONL")->required()->check(CLI::ExistingFile);
    bench_cmd->add_option("--scene", b_scene, "Scene JSON")->required()->check(CLI::ExistingFile);
    bench_cmd->add_option("--solver", b_solver.kind, "oracle or remote")
        ->check(CLI::IsMember({"oracle", "remote"}))
        ->capture_default_str();
    bench_cmd->add_option("--endpoint", b_solver.endpoint, "Remote solver base URL");
    bench_cmd->add_option("--out", b_out, "Output directory")->required();

    // export
    auto* export_cmd = app.add_subcommand("export", "Report bundle from run directories");
    std::string x_run, x_out;
    export_cmd->add_option("--run", x_run, "Run directory, or a directory of them")->required();
    export_cmd->add_option("--out", x_out, "Report directory (default <run>/report)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        const CLI::App* sub = &app;
        while (!sub->get_subcommands().empty()) sub = sub->get_subcommands().front();
        err << sub->help();
        return kExitUsage;
    }

    const CLI::App* leaf = &app;
    std::string path;
    while (!leaf->get_subcommands().empty()) {
        leaf = leaf->get_subcommands().front();
        path += (path.empty() ? "" : " ") + leaf->get_name();
    }
    if (!quiet) err << "# insitu " << path << "\n" << leaf->config_to_str(true, false);

    try {
        if (scene_gen->parsed()) {
            sim::SceneProfile p;
            p.mirror_probability = mirror_p;
            const sim::Scene s = sim::generate_scene(scene_seed, p);
            sim::save_scene(scene_out, s);
            out << s.id << ": " << s.entities.size() << " entities -> " << scene_out << "\n";
        } else if (run_cmd->parsed()) {
            ro.loop.enabled_generators = parse_types(type_names);
            ro.loop.epsilon_mode = eps_mode == "per_step" ? gen::EpsilonMode::per_step : gen::EpsilonMode::per_loop;
            ro.loop.use_filter = !no_filter;
            ro.ablation = !no_ablation;
            ro.sidecars = !no_sidecars;
            std::vector<std::pair<sim::Scene, fs::path>> jobs;
            if (!run_scene.empty()) jobs.emplace_back(sim::load_scene(run_scene), fs::path(run_out));
            for (auto seed : run_scene_seeds) {
                jobs.emplace_back(sim::generate_scene(seed), fs::path(run_out) / ("scene_" + std::to_string(seed)));
            }
            if (jobs.empty()) throw CLI::RequiredError("--scene or --scene-seed");
            if (!quiet) err << "# run seed " << ro.loop.seed << ", config " << run_options_to_json(ro).dump() << "\n";
            for (const auto& [scene, dir] : jobs) {
                auto solver = make_solver(run_solver, scene);
                const PipelineResult r = run_pipeline(scene, ro, solver.get());
                write_run(dir, scene, ro, r);
                out << scene.id << " -> " << dir.string() << "\n" << mir_csv(r.mir, ro.alpha);
            }
        } else if (filter_cmd->parsed()) {
            const sim::Scene scene = sim::load_scene(f_scene);
            auto tf = task::read_tasks(f_in);
            filter::ClusterConfig cc;
            cc.seed = f_seed;
            const auto res = filter::filter_tasks(tf.instances, f_k, filter::encoders_from_env(scene, disk_lookup(f_records)), cc);
            task::write_tasks(f_out, res.representatives);
            if (!f_sim.empty()) {
                std::vector<std::string> ids;
                for (const auto& t : tf.instances) ids.push_back(t.id);
                filter::write_similarity(f_sim, res.similarity, ids);
            }
            out << res.representatives.size() << " of " << tf.instances.size() << " tasks kept -> " << f_out << "\n";
        } else if (evolve_cmd->parsed()) {
            const sim::Scene scene = sim::load_scene(e_scene);
            auto tf = task::read_tasks(e_in);
            rules.reuse = !no_reuse;
            rules.recombination = !no_recomb;
            rules.enabled_types = parse_types(e_types);
            const auto res = evolution::evolve(tf.instances, scene, rules, disk_lookup(e_records));
            task::write_tasks(e_out, res.instances, res.new_templates);
            for (const auto& n : res.notes) err << "note: " << n << "\n";
            out << res.instances.size() << " new instances, " << res.new_templates.size() << " new templates"
                << (res.budget_exceeded ? " (budget exceeded)" : "") << " -> " << e_out << "\n";
        } else if (mir_cmd->parsed()) {
            filter::SimilarityMatrix s;
            if (!m_sim.empty()) {
                s = filter::read_similarity(m_sim);
            } else {
                if (m_in.empty() || m_scene.empty()) throw CLI::RequiredError("--sim, or --in with --scene");
                const sim::Scene scene = sim::load_scene(m_scene);
                s = filter::similarity(task::read_tasks(m_in).instances, filter::encoders_from_env(scene, disk_lookup(m_records)));
            }
            metrics::MisOptions mo;
            mo.force_exact = m_exact;
            if (m_exact) mo.node_budget = kExactForceNodes;
            const auto m = metrics::mir(s, m_alpha, mo);
            write_or_print(m_out, mir_csv({{"input", m}}, m_alpha), out);
        } else if (mire_cmd->parsed()) {
            const sim::Scene scene = sim::load_scene(m_scene);
            auto a = task::read_tasks(m_initial).instances;
            const auto b = task::read_tasks(m_evolved).instances;
            std::vector<std::size_t> ia, ib;
            for (std::size_t i = 0; i < a.size(); ++i) ia.push_back(i);
            for (std::size_t i = 0; i < b.size(); ++i) ib.push_back(a.size() + i);
            a.insert(a.end(), b.begin(), b.end());
            const auto s = filter::similarity(a, filter::encoders_from_env(scene, disk_lookup(m_records)));
            const auto r = metrics::mir_e(s, ia, ib, m_alpha);
            out << "mis_union,mis_initial,mis_evolve,mir_e\n"
                << r.mis_union << "," << r.mis_initial << "," << r.mis_evolve << "," << r.value << "\n";
            for (const auto& n : r.notes) err << "note: " << n << "\n";
        } else if (spatial_cmd->parsed()) {
            const sim::Scene scene = sim::load_scene(m_scene);
            write_or_print(m_out, spatial_csv(metrics::spatial_stats(task::read_tasks(m_in).instances, scene)), out);
        } else if (ttest_cmd->parsed()) {
            const auto r = metrics::paired_ttest(read_column(m_a, m_column), read_column(m_b, m_column));
            for (const auto& n : r.notes) err << "note: " << n << "\n";
            char buf[96];
            std::snprintf(buf, sizeof buf, "t,p,df\n%.9g,%.9g,%d\n", r.t, r.p, r.df);
            out << buf;
        } else if (nav_cmd->parsed()) {
            std::istringstream in(read_file(m_episodes));
            std::string line;
            std::getline(in, line);
            check_schema(json::parse(line), kEpisodesSchema, 1);
            std::vector<harness::NavEpisode> eps;
            while (std::getline(in, line)) {
                if (!line.empty()) eps.push_back(json::parse(line).get<harness::NavEpisode>());
            }
            out << harness::nav_metrics_csv(harness::compute_nav_metrics(eps));
        } else if (bench_cmd->parsed()) {
            const sim::Scene scene = sim::load_scene(b_scene);
            const auto tasks = task::read_tasks(b_in).instances;
            std::vector<TaskInstance> stat, nav;
            for (const auto& t : tasks) (task::is_interactive(t.type()) ? nav : stat).push_back(t);
            auto solver = make_solver(b_solver, scene);
            std::error_code ec;
            fs::create_directories(b_out, ec);
            if (!stat.empty()) {
                const auto s = harness::run_static(stat, *solver, scene);
                write_file(fs::path(b_out) / "static.csv", harness::static_scores_csv(s));
                out << harness::static_scores_csv(s);
            }
            if (!nav.empty()) {
                const auto r = harness::run_navigation(nav, *solver, scene);
                write_file(fs::path(b_out) / "nav.csv", harness::nav_metrics_csv(r.metrics));
                std::string eps = json{{"schema", kEpisodesSchema}, {"schema_version", 1}}.dump() + "\n";
                for (const auto& e : r.episodes) eps += json(e).dump() + "\n";
                write_file(fs::path(b_out) / "episodes.jsonl", eps);
                out << harness::nav_metrics_csv(r.metrics);
            }
        } else if (export_cmd->parsed()) {
            const fs::path dir = export_report(x_run, x_out);
            out << "report -> " << dir.string() << "\n";
        }
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const json::exception& e) {
        err << "error [malformed input]: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitOk;
}

} // namespace insitu::cli
