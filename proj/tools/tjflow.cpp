// tjflow — T-junction crowd simulation and origin-distribution inference.
//
// Subcommands cover the whole data-production chain: simulate trajectories,
// ingest experiment files, featurize/curate heatmap datasets, train and
// evaluate the per-origin random forests, and export analysis artifacts.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tjflow/analysis.hpp"
#include "tjflow/errors.hpp"
#include "tjflow/floorfield.hpp"
#include "tjflow/heatmap.hpp"
#include "tjflow/parallel.hpp"
#include "tjflow/pipeline.hpp"
#include "tjflow/simulator.hpp"
#include "tjflow/text.hpp"
#include "tjflow/version.hpp"

namespace fs = std::filesystem;
using namespace tjflow;

namespace {

std::string g_command_line;

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open input file: " + path.string());
    return in;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open output file: " + path.string());
    return out;
}

/// Sidecar recording how an artifact was produced. Timestamps live only
/// here, so the artifacts themselves stay byte-stable across reruns.
void write_manifest(const fs::path& artifact, const nlohmann::json& extra = {}) {
    nlohmann::json j{{"tool", "tjflow"},
                     {"version", kVersion},
                     {"command", g_command_line},
                     {"artifact", artifact.filename().string()},
                     {"timestamp", std::chrono::duration_cast<std::chrono::seconds>(
                                       std::chrono::system_clock::now().time_since_epoch())
                                       .count()}};
    if (!extra.is_null() && !extra.empty()) j["inputs"] = extra;
    std::ofstream out(artifact.string() + ".manifest.json");
    if (out) out << j.dump(2) << '\n';
}

ScenarioConfig config_from_flags(const std::string& preset, const std::string& config_file,
                                 bool middle_is_entrance) {
    if (!preset.empty() && !config_file.empty())
        throw ValidationError("--preset and --config are mutually exclusive");
    if (!preset.empty()) return preset_by_name(preset, middle_is_entrance);
    if (!config_file.empty()) {
        auto in = open_input(config_file);
        return read_scenario_config(in);
    }
    throw ValidationError("one of --preset or --config is required");
}

Rect parse_rect(const std::string& spec) {
    std::istringstream ss(spec);
    Rect r;
    char c1, c2, c3;
    if (!(ss >> r.x0 >> c1 >> r.y0 >> c2 >> r.w >> c3 >> r.h) || c1 != ',' || c2 != ',' ||
        c3 != ',')
        throw ValidationError("expected rectangle as x0,y0,w,h, got '" + spec + "'");
    return r;
}

struct LoadedRun {
    TrajectorySet set;
    TrajectoryMeta meta;
};

LoadedRun load_run(const fs::path& traj_path) {
    LoadedRun run;
    auto in = open_input(traj_path);
    run.set = parse_trajectories(in, Units::m, 16.0);
    const fs::path meta_path = traj_path.string() + ".meta.json";
    if (fs::exists(meta_path)) {
        auto meta_in = open_input(meta_path);
        run.meta = read_trajectory_meta(meta_in, run.set);
    } else {
        run.set.name = traj_path.stem().string();
    }
    return run;
}

std::vector<fs::path> collect_trajectory_files(const std::vector<std::string>& inputs) {
    std::vector<fs::path> files;
    for (const std::string& input : inputs) {
        const fs::path p(input);
        if (fs::is_directory(p)) {
            for (const auto& entry : fs::directory_iterator(p)) {
                const fs::path& f = entry.path();
                if (f.extension() == ".txt" && f.string().find(".meta.") == std::string::npos)
                    files.push_back(f);
            }
        } else if (fs::exists(p)) {
            files.push_back(p);
        } else {
            throw IoError("no such input: " + input);
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ValidationError("no trajectory files found");
    return files;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string preset, config_file, out_dir;
    std::string split_cycle;
    int agents = -1;
    double split_left = -1.0;
    int runs = 1;
    std::uint64_t seed = 1;
    int jobs = 0;
    bool middle_is_entrance = false;
    SimParams params;
};

int cmd_simulate(const SimulateArgs& args) {
    ScenarioConfig base = config_from_flags(args.preset, args.config_file,
                                            args.middle_is_entrance);
    if (args.agents >= 0) base.agent_count = args.agents;
    if (args.split_left >= 0.0) base.split_left = args.split_left;

    std::vector<double> cycle;
    if (!args.split_cycle.empty()) {
        std::istringstream ss(args.split_cycle);
        std::string tok;
        while (std::getline(ss, tok, ',')) cycle.push_back(parse_double(trim(tok), 1));
        if (cycle.empty()) throw ValidationError("--split-cycle needs at least one value");
    }

    const SimContext ctx = build_sim_context(base, args.params);
    std::vector<TrajectorySet> results(args.runs);
    std::vector<ScenarioConfig> configs(args.runs, base);
    for (int r = 0; r < args.runs; ++r) {
        configs[r].seed = args.seed + static_cast<std::uint64_t>(r);
        if (!cycle.empty()) configs[r].split_left = cycle[r % cycle.size()];
    }

    const int workers = par::resolve_jobs(args.jobs);
#pragma omp parallel for schedule(dynamic) num_threads(workers) if (workers > 1)
    for (int r = 0; r < args.runs; ++r)
        results[r] = run_simulation(ctx, configs[r], args.params);

    for (int r = 0; r < args.runs; ++r) {
        char suffix[32];
        std::snprintf(suffix, sizeof(suffix), "_run%02d", r);
        const fs::path traj_path =
            fs::path(args.out_dir) / (base.name + std::string(suffix) + ".txt");
        {
            auto out = open_output(traj_path);
            write_trajectories(out, results[r]);
        }
        {
            auto out = open_output(traj_path.string() + ".meta.json");
            TrajectoryMeta meta;
            meta.has_config = true;
            meta.config = configs[r];
            write_trajectory_meta(out, results[r], meta);
        }
        write_manifest(traj_path);
        if (results[r].pedestrians.empty())
            std::cerr << "warning: run " << r << " produced an empty trajectory\n";
        if (results[r].stuck_agents > 0)
            std::cerr << "warning: run " << r << ": " << results[r].stuck_agents
                      << " agents did not reach the target within the step budget\n";
        std::cout << traj_path.string() << " pedestrians=" << results[r].pedestrians.size()
                  << " frames=" << (results[r].max_frame() + 1)
                  << " split_left=" << configs[r].split_left << '\n';
    }
    return 0;
}

// ------------------------------------------------------------------ ingest

int cmd_ingest(const std::string& in_file, const std::string& units, double fps,
               const std::string& out_file, const std::string& name) {
    auto in = open_input(in_file);
    const Units u = units == "cm" ? Units::cm : Units::m;
    if (units != "cm" && units != "m")
        throw ValidationError("--units must be cm or m");
    TrajectorySet set = parse_trajectories(in, u, fps);
    set.source = TrajSource::Experimental;
    set.name = name.empty() ? fs::path(in_file).stem().string() : name;
    set = assign_origins(set);

    long unknown = 0;
    for (const auto& [id, ped] : set.pedestrians) unknown += ped.origin == Origin::Unknown;
    if (unknown > 0)
        std::cerr << "warning: " << unknown << " pedestrians have Unknown origin\n";

    {
        auto out = open_output(out_file);
        write_trajectories(out, set);
    }
    {
        auto out = open_output(out_file + ".meta.json");
        write_trajectory_meta(out, set, {});
    }
    write_manifest(out_file);
    std::cout << out_file << " pedestrians=" << set.pedestrians.size()
              << " frames=" << (set.max_frame() - set.min_frame() + 1) << '\n';
    return 0;
}

// --------------------------------------------------------------- featurize

int cmd_featurize(const std::vector<std::string>& inputs, int area_id,
                  const std::string& area_rect, double sigma, double cell, int stride,
                  const std::string& out_file, int jobs) {
    if (area_id != 1 && area_id != 2)
        throw ValidationError("--area must be 1 (depth 1 m) or 2 (depth 2 m)");
    const auto files = collect_trajectory_files(inputs);
    std::vector<TrajectorySet> sets;
    Rect area{};
    bool have_area = false;
    if (!area_rect.empty()) {
        area = parse_rect(area_rect);
        have_area = true;
    }
    for (const auto& f : files) {
        LoadedRun run = load_run(f);
        if (!area_rect.empty()) {
            sets.push_back(std::move(run.set));
            continue;
        }
        // Scenario-based placement: pool runs from geometries with
        // different exit lengths by shifting each into a target-anchored
        // frame (target line at y = 0, junction centerline at x = 0).
        if (!run.meta.has_config)
            throw ValidationError(
                "no scenario config in sidecar of " + f.string() +
                "; pass --area-rect to place the observation area explicitly");
        ScenarioConfig c = run.meta.config;
        c.obs_area_depth = area_id == 2 ? 2.0 : 1.0;
        const Scenario scenario = build_tjunction(c);
        const Rect canonical{scenario.observation_area.x0, -c.obs_area_depth,
                             scenario.observation_area.w, c.obs_area_depth};
        if (!have_area) {
            area = canonical;
            have_area = true;
        } else if (!(area == canonical)) {
            throw ValidationError("inconsistent observation-area geometry across runs (" +
                                  f.string() + ")");
        }
        sets.push_back(translated(run.set, {0.0, -scenario.target.a.y}));
    }

    const Dataset ds = build_dataset(sets, area, cell, sigma, stride, jobs);
    auto out = open_output(out_file);
    write_dataset(out, ds);
    out.close();
    write_manifest(out_file);
    std::cout << out_file << " samples=" << ds.samples.size()
              << " features=" << ds.grid.nx * ds.grid.ny << '\n';
    return 0;
}

// ------------------------------------------------------------------ curate

int cmd_curate(const std::string& in_file, bool dedup, bool rebalance, long cap_equal,
               const std::string& out_file) {
    auto in = open_input(in_file);
    Dataset ds = read_dataset(in);
    const std::size_t before = ds.samples.size();
    if (dedup) ds = dedup_consecutive(ds);
    const std::size_t after_dedup = ds.samples.size();
    if (rebalance || cap_equal >= 0) {
        const long cap = cap_equal >= 0 ? cap_equal : default_equal_cap(ds);
        ds = rebalance_equal(ds, cap);
    }
    auto out = open_output(out_file);
    write_dataset(out, ds);
    out.close();
    write_manifest(out_file);
    std::cout << out_file << " samples " << before << " -> " << after_dedup << " -> "
              << ds.samples.size() << '\n';
    return 0;
}

// ------------------------------------------------------------- train/eval

ForestParams forest_flags(int trees, int min_leaf, int mtry, std::uint64_t seed, int jobs) {
    ForestParams p;
    p.n_trees = trees;
    p.min_leaf = min_leaf;
    p.mtry = mtry;
    p.seed = seed;
    p.jobs = jobs;
    return p;
}

int cmd_train(const std::string& in_file, const ForestParams& params,
              const std::string& out_file) {
    auto in = open_input(in_file);
    const Dataset ds = read_dataset(in);
    const OriginModels models = train_origin_models(ds, params);

    const Matrix X = feature_matrix(ds);
    std::vector<double> y_left(X.rows), y_right(X.rows);
    for (long i = 0; i < X.rows; ++i) {
        y_left[i] = 100.0 * ds.samples[i].label.frac_left();
        y_right[i] = 100.0 * ds.samples[i].label.frac_right();
    }
    const OobScores left = oob_scores(models.left, X, y_left);
    const OobScores right = oob_scores(models.right, X, y_right);

    auto out = open_output(out_file);
    out << "# origin-model v1 nx=" << models.grid.nx << " ny=" << models.grid.ny
        << " h=" << format_double(models.grid.h) << " area=" << format_double(models.grid.area.x0)
        << ',' << format_double(models.grid.area.y0) << ',' << format_double(models.grid.area.w)
        << ',' << format_double(models.grid.area.h) << '\n';
    write_forest(out, models.left, "left");
    write_forest(out, models.right, "right");
    out.close();
    write_manifest(out_file);
    std::cout << out_file << " n=" << ds.samples.size() << " oob_r2_left="
              << format_double(left.r2) << " oob_r2_right=" << format_double(right.r2) << '\n';
    return 0;
}

int cmd_evaluate(const std::string& mode_name, const std::string& train_file,
                 const std::string& test_file, int runs, std::uint64_t seed,
                 const ForestParams& params, const std::string& out_file) {
    const EvalMode mode = eval_mode_from_name(mode_name);
    auto train_in = open_input(train_file);
    const Dataset train = read_dataset(train_in);
    Dataset test;
    if (mode == EvalMode::Hybrid) {
        if (test_file.empty())
            throw ValidationError("--mode hybrid requires --test (experimental dataset)");
        auto test_in = open_input(test_file);
        test = read_dataset(test_in);
    } else {
        if (!test_file.empty() && test_file != train_file)
            throw ValidationError("--mode sim|exp splits --train per run; --test must be "
                                  "omitted or equal to --train");
        test = train;
    }

    const EvalReport report = run_experiment(mode, train, test, runs, seed, params);
    if (!out_file.empty()) {
        auto out = open_output(out_file);
        write_report_csv(out, report);
        out.close();
        write_manifest(out_file);
    }
    std::cout << format_report_table(report);
    return 0;
}

// ----------------------------------------------------------------- analyze

Scenario scenario_for_run(const LoadedRun& run, const std::string& preset,
                          const std::string& config_file) {
    if (!preset.empty() || !config_file.empty())
        return build_tjunction(config_from_flags(preset, config_file, false));
    if (run.meta.has_config) return build_tjunction(run.meta.config);
    throw ValidationError("no scenario available: pass --preset or --config, or use a "
                          "trajectory with a config sidecar");
}

int cmd_analyze_voronoi(const std::string& in_file, const std::string& preset,
                        const std::string& config_file, double cell,
                        const std::string& out_file, int jobs) {
    const LoadedRun run = load_run(in_file);
    const Scenario s = scenario_for_run(run, preset, config_file);
    GridField probe(s.bounds.x0, s.bounds.y0, cell,
                    std::max(1, static_cast<int>(std::llround(s.bounds.w / cell))),
                    std::max(1, static_cast<int>(std::llround(s.bounds.h / cell))));
    const auto blocked = obstacle_mask(s, probe);
    const VoronoiMap map = average_voronoi_map(run.set, s.bounds, cell, blocked, jobs);
    if (map.frames_used == 0)
        std::cerr << "warning: no frames with pedestrians; map is empty\n";
    auto out = open_output(out_file);
    write_grid_csv(out, map.field);
    out.close();
    write_manifest(out_file);
    std::cout << out_file << " frames=" << map.frames_used << '\n';
    return 0;
}

int cmd_analyze_fd(const std::string& in_file, const std::string& preset,
                   const std::string& config_file, int area_id, double cell,
                   const std::string& out_file) {
    if (area_id < 0 || area_id > 2)
        throw ValidationError("--area-id must be 0 (left arm), 1 (right arm) or 2 (exit)");
    const LoadedRun run = load_run(in_file);
    const Scenario s = scenario_for_run(run, preset, config_file);
    const auto points = fundamental_diagram(run.set, s.measurement_areas[area_id], area_id, cell);
    auto out = open_output(out_file);
    write_fd_csv(out, points);
    out.close();
    write_manifest(out_file);
    std::cout << out_file << " points=" << points.size() << '\n';
    return 0;
}

// ------------------------------------------------------------------ report

int cmd_report_distributions(const std::string& in_file) {
    auto in = open_input(in_file);
    const Dataset ds = read_dataset(in);
    const auto rows = distribution_report(ds);
    std::cout << "    Left      Right     #Heatmaps\n";
    char buf[80];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%10.6f %10.6f %9ld\n", r.frac_left(), r.frac_right(),
                      r.count);
        std::cout << buf;
    }
    std::cout << "total " << ds.samples.size() << " samples, " << rows.size()
              << " distinct distributions\n";
    return 0;
}

// ------------------------------------------------------------------ export

int cmd_export_scenario(const std::string& preset, const std::string& config_file,
                        bool middle_is_entrance, const std::string& out_file) {
    const Scenario s = build_tjunction(config_from_flags(preset, config_file, middle_is_entrance));
    auto out = open_output(out_file);
    write_scenario_geometry(out, s);
    out.close();
    write_manifest(out_file);
    std::cout << out_file << '\n';
    return 0;
}

int cmd_export_field(const std::string& preset, const std::string& config_file, double w_obs,
                     double cell, const std::string& kind, const std::string& out_file) {
    const Scenario s = build_tjunction(config_from_flags(preset, config_file, false));
    GridField field;
    if (kind == "travel-time")
        field = travel_time_field(s, w_obs, cell);
    else if (kind == "obstacle-density")
        field = obstacle_density(s, cell);
    else if (kind == "dijkstra")
        field = dijkstra_oracle(s, w_obs, cell);
    else
        throw ValidationError("--kind must be travel-time, obstacle-density or dijkstra");
    auto out = open_output(out_file);
    write_grid_csv(out, field);
    out.close();
    write_manifest(out_file);
    std::cout << out_file << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    std::ostringstream cmd;
    for (int i = 0; i < argc; ++i) cmd << (i ? " " : "") << argv[i];
    g_command_line = cmd.str();

    CLI::App app{"T-junction crowd simulation and origin-distribution inference"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    int jobs = 0;
    app.add_option("--jobs", jobs, "worker threads (0 = all, 1 = serial)")
        ->capture_default_str();

    // simulate
    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "run seeded crowd simulations");
    simulate->add_option("--preset", sim.preset, "scenario preset name (see `presets`)");
    simulate->add_option("--config", sim.config_file, "scenario config JSON file");
    simulate->add_option("--agents", sim.agents, "agent count override");
    simulate->add_option("--split-left", sim.split_left, "fraction spawned left");
    simulate->add_option("--split-cycle", sim.split_cycle,
                         "comma list cycled across runs, e.g. 0,0.25,0.5,0.75,1");
    simulate->add_option("--runs", sim.runs, "number of runs (seeds seed..seed+runs-1)")
        ->capture_default_str();
    simulate->add_option("--seed", sim.seed, "base seed")->capture_default_str();
    simulate->add_option("--out", sim.out_dir, "output directory")->required();
    simulate->add_flag("--middle-is-entrance", sim.middle_is_entrance,
                       "read preset names as (cor, entrance, exit)");
    simulate->add_option("--dt", sim.params.dt, "tick length [s]")->capture_default_str();
    simulate->add_option("--w-obs", sim.params.w_obs, "navigation-field obstacle weight")
        ->capture_default_str();
    simulate->add_option("--candidates", sim.params.candidate_count, "step candidates per tick")
        ->capture_default_str();

    // ingest
    std::string ingest_in, ingest_units = "cm", ingest_out, ingest_name;
    double ingest_fps = 16.0;
    auto* ingest = app.add_subcommand("ingest", "normalize an experiment trajectory file");
    ingest->add_option("--in", ingest_in)->required();
    ingest->add_option("--units", ingest_units, "cm or m")->capture_default_str();
    ingest->add_option("--fps", ingest_fps)->capture_default_str();
    ingest->add_option("--name", ingest_name, "run name (default: input stem)");
    ingest->add_option("--out", ingest_out)->required();

    // featurize
    std::vector<std::string> feat_in;
    std::string feat_rect, feat_out;
    int feat_area = 1, feat_stride = 1;
    double feat_sigma = 0.7, feat_cell = 0.1;
    auto* featurize = app.add_subcommand("featurize", "trajectories -> heatmap dataset");
    featurize->add_option("--in", feat_in, "trajectory files or directories")->required();
    featurize->add_option("--area", feat_area, "observation area preset: 1 (1 m) or 2 (2 m)")
        ->capture_default_str();
    featurize->add_option("--area-rect", feat_rect, "explicit area x0,y0,w,h (overrides --area)");
    featurize->add_option("--sigma", feat_sigma, "density kernel std [m]")->capture_default_str();
    featurize->add_option("--cell", feat_cell, "heatmap cell size [m]")->capture_default_str();
    featurize->add_option("--stride", feat_stride, "use every n-th frame")->capture_default_str();
    featurize->add_option("--out", feat_out)->required();

    // curate
    std::string curate_in, curate_out;
    bool curate_dedup = false, curate_rebalance = false;
    long curate_cap = -1;
    auto* curate = app.add_subcommand("curate", "dedup / rebalance a dataset");
    curate->add_option("--in", curate_in)->required();
    curate->add_flag("--dedup", curate_dedup, "drop identical consecutive heatmaps per run");
    curate->add_flag("--rebalance", curate_rebalance,
                     "cap 50/50 samples at the second most frequent label count");
    curate->add_option("--cap-equal", curate_cap, "explicit cap for 50/50 samples");
    curate->add_option("--out", curate_out)->required();

    // train
    std::string train_in, train_out;
    int train_trees = 50, train_min_leaf = 5, train_mtry = 0;
    std::uint64_t train_seed = 1;
    auto* train = app.add_subcommand("train", "fit the per-origin forests");
    train->add_option("--in", train_in)->required();
    train->add_option("--trees", train_trees)->capture_default_str();
    train->add_option("--min-leaf", train_min_leaf)->capture_default_str();
    train->add_option("--mtry", train_mtry, "features per split (0 = ceil(p/3))")
        ->capture_default_str();
    train->add_option("--seed", train_seed)->capture_default_str();
    train->add_option("--out", train_out)->required();

    // evaluate
    std::string eval_mode = "sim", eval_train, eval_test, eval_out;
    int eval_runs = 5, eval_trees = 50, eval_min_leaf = 5, eval_mtry = 0;
    std::uint64_t eval_seed = 1;
    auto* evaluate = app.add_subcommand("evaluate", "five-run split/train/test protocol");
    evaluate->add_option("--mode", eval_mode, "sim | exp | hybrid")->capture_default_str();
    evaluate->add_option("--train", eval_train, "dataset file")->required();
    evaluate->add_option("--test", eval_test, "test dataset (hybrid mode)");
    evaluate->add_option("--runs", eval_runs)->capture_default_str();
    evaluate->add_option("--seed", eval_seed)->capture_default_str();
    evaluate->add_option("--trees", eval_trees)->capture_default_str();
    evaluate->add_option("--min-leaf", eval_min_leaf)->capture_default_str();
    evaluate->add_option("--mtry", eval_mtry)->capture_default_str();
    evaluate->add_option("--out", eval_out, "report CSV path");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "density / speed analysis");
    analyze->require_subcommand(1);
    std::string ana_in, ana_preset, ana_config, ana_out;
    double ana_cell = 0.05;
    int ana_area_id = 2;
    auto* voronoi = analyze->add_subcommand("voronoi", "average Voronoi density map");
    voronoi->add_option("--in", ana_in)->required();
    voronoi->add_option("--preset", ana_preset);
    voronoi->add_option("--config", ana_config);
    voronoi->add_option("--cell", ana_cell)->capture_default_str();
    voronoi->add_option("--out", ana_out)->required();
    auto* fd = analyze->add_subcommand("fd", "fundamental diagram CSV");
    fd->add_option("--in", ana_in)->required();
    fd->add_option("--preset", ana_preset);
    fd->add_option("--config", ana_config);
    fd->add_option("--area-id", ana_area_id, "0 left arm, 1 right arm, 2 exit")
        ->capture_default_str();
    fd->add_option("--cell", ana_cell)->capture_default_str();
    fd->add_option("--out", ana_out)->required();

    // report
    auto* report = app.add_subcommand("report", "dataset reports");
    report->require_subcommand(1);
    std::string report_in;
    auto* distributions = report->add_subcommand("distributions", "label distribution table");
    distributions->add_option("--in", report_in)->required();

    // export
    auto* exporter = app.add_subcommand("export", "geometry / field artifacts");
    exporter->require_subcommand(1);
    std::string exp_preset, exp_config, exp_out, exp_kind = "travel-time";
    bool exp_mie = false;
    double exp_wobs = 0.3, exp_cell = 0.1;
    auto* exp_scn = exporter->add_subcommand("scenario", "geometry JSON for plotting");
    exp_scn->add_option("--preset", exp_preset);
    exp_scn->add_option("--config", exp_config);
    exp_scn->add_flag("--middle-is-entrance", exp_mie);
    exp_scn->add_option("--out", exp_out)->required();
    auto* exp_field = exporter->add_subcommand("field", "navigation field grid CSV");
    exp_field->add_option("--preset", exp_preset);
    exp_field->add_option("--config", exp_config);
    exp_field->add_option("--w-obs", exp_wobs)->capture_default_str();
    exp_field->add_option("--cell", exp_cell)->capture_default_str();
    exp_field->add_option("--kind", exp_kind, "travel-time | obstacle-density | dijkstra")
        ->capture_default_str();
    exp_field->add_option("--out", exp_out)->required();

    // presets
    auto* presets = app.add_subcommand("presets", "list scenario presets");

    CLI11_PARSE(app, argc, argv);
    par::set_max_threads(jobs);

    try {
        if (simulate->parsed()) {
            sim.jobs = jobs;
            return cmd_simulate(sim);
        }
        if (ingest->parsed())
            return cmd_ingest(ingest_in, ingest_units, ingest_fps, ingest_out, ingest_name);
        if (featurize->parsed())
            return cmd_featurize(feat_in, feat_area, feat_rect, feat_sigma, feat_cell,
                                 feat_stride, feat_out, jobs);
        if (curate->parsed())
            return cmd_curate(curate_in, curate_dedup, curate_rebalance, curate_cap, curate_out);
        if (train->parsed())
            return cmd_train(train_in,
                             forest_flags(train_trees, train_min_leaf, train_mtry, train_seed, jobs),
                             train_out);
        if (evaluate->parsed())
            return cmd_evaluate(eval_mode, eval_train, eval_test, eval_runs, eval_seed,
                                forest_flags(eval_trees, eval_min_leaf, eval_mtry, 0, jobs),
                                eval_out);
        if (voronoi->parsed())
            return cmd_analyze_voronoi(ana_in, ana_preset, ana_config, ana_cell, ana_out, jobs);
        if (fd->parsed())
            return cmd_analyze_fd(ana_in, ana_preset, ana_config, ana_area_id, ana_cell, ana_out);
        if (distributions->parsed()) return cmd_report_distributions(report_in);
        if (exp_scn->parsed())
            return cmd_export_scenario(exp_preset, exp_config, exp_mie, exp_out);
        if (exp_field->parsed())
            return cmd_export_field(exp_preset, exp_config, exp_wobs, exp_cell, exp_kind, exp_out);
        if (presets->parsed()) {
            for (const auto& c : scenario_presets())
                std::cout << c.name << "  b_entrance=" << c.b_entrance << " b_cor=" << c.b_cor
                          << " b_exit=" << c.b_exit << '\n';
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
