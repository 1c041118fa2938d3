#pragma once

#include <span>
#include <vector>

#include "tjflow/floorfield.hpp"
#include "tjflow/rng.hpp"
#include "tjflow/scenario.hpp"
#include "tjflow/trajectory.hpp"

namespace tjflow {

struct Agent {
    int id = 0;
    Origin origin = Origin::Left;
    Vec2 position;
    double free_speed = 1.34; // [m/s]
    double radius = 0.195;    // [m]
    bool arrived = false;
};

struct SimParams {
    double dt = 0.4;                   // step duration [s]; frame rate is 1/dt
    int candidate_count = 20;          // step candidates per agent per tick
    double agent_radius = 0.195;       // [m]
    double repulsion_strength_ped = 1.0;
    double repulsion_range_ped = 0.5;  // [m]
    double repulsion_strength_obs = 0.6;
    double repulsion_range_obs = 0.3;  // [m]
    double speed_mean = 1.34;          // truncated normal [m/s]
    double speed_std = 0.26;
    double speed_min = 0.5;
    double speed_max = 2.2;
    double w_obs = 0.3;                // navigation-field obstacle weight
    double grid_h = 0.1;               // floor-field resolution [m]
    double arrive_dist = 0.25;         // agents within this of the target leave [m]
    double budget_factor = 10.0;       // of the slowest agent's free-flow time
};

void validate(const SimParams& params);

/// Precomputed fields for one geometry; shareable across runs.
struct SimContext {
    Scenario scenario;
    GridField travel_time;
    GridField wall_distance;
};

SimContext build_sim_context(const ScenarioConfig& config, const SimParams& params);

/// Uniform non-overlapping placement in the waiting areas,
/// round(agent_count * split_left) on the left; free speeds from the
/// truncated normal. Throws ValidationError if placement fails.
std::vector<Agent> spawn_agents(const Scenario& scenario, const ScenarioConfig& config,
                                const SimParams& params, Rng& rng);

/// One optimal-steps move: the feasible candidate (current position plus
/// candidate_count random points in the step disk) with the best utility
/// -T(x) - pedestrian repulsion - wall repulsion. Candidates closer than
/// 2r to a neighbor or overlapping a wall are infeasible; the current
/// position always is feasible, so the result is well defined.
Vec2 step_agent(const Agent& agent, const GridField& travel_time,
                std::span<const Vec2> neighbors, const GridField& wall_distance,
                const SimParams& params, Rng& rng);

/// Whole run: synchronous ticks, randomized agent order, positions recorded
/// every dt. Fully determined by (config, params, config.seed). Agents that
/// have not crossed the target when the step budget runs out are counted in
/// TrajectorySet::stuck_agents.
TrajectorySet run_simulation(const SimContext& ctx, const ScenarioConfig& config,
                             const SimParams& params);
TrajectorySet run_simulation(const ScenarioConfig& config, const SimParams& params);

} // namespace tjflow
