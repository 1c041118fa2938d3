#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "tjflow/errors.hpp"
#include "tjflow/heatmap.hpp"
#include "tjflow/simulator.hpp"

using namespace tjflow;
using namespace tjflow::testing;

namespace {

ScenarioConfig small_config(int agents, double split, std::uint64_t seed) {
    ScenarioConfig c = preset_by_name("240-240-240");
    c.agent_count = agents;
    c.split_left = split;
    c.seed = seed;
    return c;
}

} // namespace

TEST_CASE("spawn: split rounding, non-overlap, speed bounds") {
    const ScenarioConfig c = small_config(134, 0.5, 1);
    const Scenario s = build_tjunction(c);
    SimParams params;
    Rng rng(c.seed);
    const auto agents = spawn_agents(s, c, params, rng);
    REQUIRE(agents.size() == 134);
    int left = 0;
    for (const Agent& a : agents) left += a.origin == Origin::Left;
    CHECK(left == 67);

    for (std::size_t i = 0; i < agents.size(); ++i) {
        CHECK(s.walkable(agents[i].position));
        CHECK((s.origin_left.contains(agents[i].position) ||
               s.origin_right.contains(agents[i].position)));
        CHECK(agents[i].free_speed >= params.speed_min);
        CHECK(agents[i].free_speed <= params.speed_max);
        for (std::size_t j = i + 1; j < agents.size(); ++j)
            CHECK(dist(agents[i].position, agents[j].position) >=
                  2.0 * params.agent_radius - 1e-9);
    }
}

TEST_CASE("spawn: boundary splits and overfull pens") {
    const Scenario s = build_tjunction(small_config(40, 0.0, 2));
    SimParams params;
    Rng rng(2);
    const auto agents = spawn_agents(s, small_config(40, 0.0, 2), params, rng);
    for (const Agent& a : agents) CHECK(a.origin == Origin::Right);

    ScenarioConfig tiny = small_config(300, 1.0, 3);
    tiny.waiting_depth = 1.0;
    tiny.waiting_width = 3.0;
    const Scenario ts = build_tjunction(tiny);
    Rng rng2(3);
    CHECK_THROWS_WITH_AS(spawn_agents(ts, tiny, params, rng2), "waiting area too small",
                         ValidationError);
}

TEST_CASE("step_agent descends the travel time field when alone") {
    const Scenario s = corridor_scenario(2.0, 10.0);
    const GridField T = travel_time_field(s, 0.0, 0.1);
    const GridField D = obstacle_distance(s, 0.1);
    SimParams params;
    Agent a;
    a.position = {1.0, 2.0};
    a.free_speed = 1.34;
    Rng rng(5);
    for (int k = 0; k < 5; ++k) {
        const Vec2 next = step_agent(a, T, {}, D, params, rng);
        CHECK(bilinear_sample(T, next) < bilinear_sample(T, a.position));
        a.position = next;
    }
}

TEST_CASE("step_agent never overlaps a blocking neighbor head-on") {
    const Scenario s = corridor_scenario(0.6, 10.0); // narrow single-file corridor
    const GridField T = travel_time_field(s, 0.0, 0.1);
    const GridField D = obstacle_distance(s, 0.1);
    SimParams params;
    Agent mover;
    mover.position = {0.3, 3.0};
    mover.free_speed = 2.0;
    const Vec2 blocker{0.3, 3.6}; // dead ahead on the path to the target
    Rng rng(6);
    const std::vector<Vec2> neighbors{blocker};
    for (int k = 0; k < 50; ++k) {
        const Vec2 next = step_agent(mover, T, neighbors, D, params, rng);
        CHECK(dist(next, blocker) >= 2.0 * params.agent_radius - 1e-12);
        CHECK(s.walkable(next));
        mover.position = next;
    }
}

TEST_CASE("empty run produces an empty trajectory set") {
    const TrajectorySet empty = run_simulation(small_config(0, 0.5, 4), SimParams{});
    CHECK(empty.pedestrians.empty());
    CHECK(empty.sample_count() == 0);
    CHECK(empty.stuck_agents == 0);
}

TEST_CASE("simulation is deterministic byte-for-byte") {
    const ScenarioConfig c = small_config(25, 0.4, 99);
    SimParams params;
    const TrajectorySet a = run_simulation(c, params);
    const TrajectorySet b = run_simulation(c, params);
    std::ostringstream fa, fb;
    write_trajectories(fa, a);
    write_trajectories(fb, b);
    CHECK(fa.str() == fb.str());
    CHECK(!fa.str().empty());

    ScenarioConfig other = c;
    other.seed = 100;
    std::ostringstream fc;
    write_trajectories(fc, run_simulation(other, params));
    CHECK(fc.str() != fa.str());
}

TEST_CASE("small run: everyone arrives, no penetration, no contact") {
    const ScenarioConfig c = small_config(30, 0.5, 7);
    const SimContext ctx = build_sim_context(c, SimParams{});
    const TrajectorySet run = run_simulation(ctx, c, SimParams{});
    CHECK(run.stuck_agents == 0);
    CHECK(run.source == TrajSource::Simulated);
    CHECK(run.fps == doctest::Approx(2.5));

    const SimParams params;
    for (int frame = run.min_frame(); frame <= run.max_frame(); ++frame) {
        const auto present = frame_positions(run, frame);
        for (std::size_t i = 0; i < present.size(); ++i) {
            CHECK(ctx.scenario.walkable(present[i].first));
            for (std::size_t j = i + 1; j < present.size(); ++j)
                CHECK(dist(present[i].first, present[j].first) >=
                      2.0 * params.agent_radius - 1e-9);
        }
    }
    // origin labels carried through
    int left = 0, right = 0;
    for (const auto& [id, ped] : run.pedestrians) {
        left += ped.origin == Origin::Left;
        right += ped.origin == Origin::Right;
    }
    CHECK(left == 15);
    CHECK(right == 15);
}

TEST_CASE("exhausted step budget flags remaining agents") {
    ScenarioConfig c = small_config(12, 0.5, 8);
    SimParams params;
    params.budget_factor = 0.05; // far too little time to cross
    const TrajectorySet run = run_simulation(c, params);
    CHECK(run.stuck_agents > 0);
    CHECK(run.sample_count() > 0);
}

TEST_CASE("sim params are validated") {
    SimParams p;
    p.dt = 0.0;
    CHECK_THROWS_AS(validate(p), ValidationError);
    p = SimParams{};
    p.candidate_count = 2;
    CHECK_THROWS_AS(validate(p), ValidationError);
    p = SimParams{};
    p.speed_min = 2.0;
    p.speed_mean = 1.0;
    CHECK_THROWS_AS(validate(p), ValidationError);
}
