// Benchmark comparing the serial reference paths (jobs = 1) against the
// OpenMP kernels (jobs = all threads) for the three data-parallel hot
// spots: heatmap featurization, forest training, and per-frame Voronoi
// maps. Also times a batch of independent simulation runs.
//
// Usage: bench_kernels [n_repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "tjflow/analysis.hpp"
#include "tjflow/heatmap.hpp"
#include "tjflow/parallel.hpp"
#include "tjflow/pipeline.hpp"
#include "tjflow/simulator.hpp"

using namespace tjflow;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

template <class F>
double time_best_of(int repeats, F&& f) {
    double best = 1e30;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = Clock::now();
        f();
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-28s serial %8.3f s   parallel %8.3f s   speedup %5.2fx\n", name, serial,
                parallel, serial / parallel);
}

} // namespace

int main(int argc, char** argv) {
    const int repeats = argc > 1 ? std::atoi(argv[1]) : 1;
    std::printf("threads available: %d\n", par::max_threads());

    // One mid-size run feeds the featurize and voronoi benchmarks.
    ScenarioConfig config = preset_by_name("240-120-240");
    config.agent_count = 150;
    config.seed = 4;
    const SimParams params;
    const SimContext ctx = build_sim_context(config, params);
    const TrajectorySet run = run_simulation(ctx, config, params);
    std::printf("benchmark run: %zu pedestrians, %d frames\n", run.pedestrians.size(),
                run.max_frame() + 1);

    {
        const TrajectorySet runs[] = {run, run, run, run};
        const Rect area = ctx.scenario.observation_area;
        const double serial =
            time_best_of(repeats, [&] { build_dataset(runs, area, 0.1, 0.7, 1, 1); });
        const double parallel =
            time_best_of(repeats, [&] { build_dataset(runs, area, 0.1, 0.7, 1, 0); });
        report("featurize (4 runs)", serial, parallel);
    }

    {
        const TrajectorySet one[] = {run};
        Dataset ds = build_dataset(one, ctx.scenario.observation_area, 0.1, 0.7, 1, 0);
        // pad with jittered copies to forest-training size
        Rng rng(9);
        Dataset big = ds;
        while (big.samples.size() < 3000 && !ds.samples.empty()) {
            for (const HeatmapSample& s : ds.samples) {
                HeatmapSample copy = s;
                for (double& v : copy.values) v += rng.uniform(0.0, 1e-6);
                big.samples.push_back(std::move(copy));
                if (big.samples.size() >= 3000) break;
            }
        }
        const Matrix X = feature_matrix(big);
        std::vector<double> y(X.rows);
        for (long i = 0; i < X.rows; ++i)
            y[i] = 100.0 * big.samples[i].label.frac_left();
        ForestParams serial_params;
        serial_params.n_trees = 50;
        serial_params.jobs = 1;
        ForestParams parallel_params = serial_params;
        parallel_params.jobs = 0;
        const double serial =
            time_best_of(repeats, [&] { fit_forest(X, y, serial_params); });
        const double parallel =
            time_best_of(repeats, [&] { fit_forest(X, y, parallel_params); });
        std::printf("  (forest input: %ld samples x %d features)\n", X.rows, X.cols);
        report("forest fit (50 trees)", serial, parallel);
    }

    {
        const double serial = time_best_of(
            repeats, [&] { average_voronoi_map(run, ctx.scenario.bounds, 0.1, {}, 1); });
        const double parallel = time_best_of(
            repeats, [&] { average_voronoi_map(run, ctx.scenario.bounds, 0.1, {}, 0); });
        report("voronoi map (all frames)", serial, parallel);
    }

    {
        auto batch = [&](int jobs) {
            std::vector<TrajectorySet> out(4);
            const int workers = par::resolve_jobs(jobs);
#pragma omp parallel for num_threads(workers) if (workers > 1)
            for (int r = 0; r < 4; ++r) {
                ScenarioConfig c = config;
                c.seed = 100 + static_cast<std::uint64_t>(r);
                out[r] = run_simulation(ctx, c, params);
            }
        };
        const double serial = time_best_of(repeats, [&] { batch(1); });
        const double parallel = time_best_of(repeats, [&] { batch(0); });
        report("simulate (4 runs)", serial, parallel);
    }
    return 0;
}
