#include "tjflow/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "tjflow/errors.hpp"

namespace tjflow {

void validate(const SimParams& p) {
    if (!(p.dt > 0.0)) throw ValidationError("dt must be positive");
    if (p.candidate_count < 4) throw ValidationError("candidate_count must be >= 4");
    if (!(p.agent_radius > 0.0)) throw ValidationError("agent_radius must be positive");
    if (!(p.speed_min <= p.speed_mean && p.speed_mean <= p.speed_max))
        throw ValidationError("speed bounds must satisfy min <= mean <= max");
    if (!(p.speed_min > 0.0)) throw ValidationError("speed_min must be positive");
    if (p.w_obs < 0.0) throw ValidationError("w_obs must be non-negative");
}

SimContext build_sim_context(const ScenarioConfig& config, const SimParams& params) {
    validate(params);
    SimContext ctx;
    ctx.scenario = build_tjunction(config);
    ctx.travel_time = travel_time_field(ctx.scenario, params.w_obs, params.grid_h);
    ctx.wall_distance = obstacle_distance(ctx.scenario, params.grid_h);
    return ctx;
}

std::vector<Agent> spawn_agents(const Scenario& scenario, const ScenarioConfig& config,
                                const SimParams& params, Rng& rng) {
    const double r = params.agent_radius;
    const double min_dist_sq = 4.0 * r * r;
    const int n_left = static_cast<int>(std::llround(config.agent_count * config.split_left));
    const int n_right = config.agent_count - n_left;

    std::vector<Agent> agents;
    agents.reserve(config.agent_count);
    auto place = [&](const Rect& pen, Origin origin, int count) {
        const Rect inner{pen.x0 + r, pen.y0 + r, pen.w - 2.0 * r, pen.h - 2.0 * r};
        if (count > 0 && (inner.w <= 0.0 || inner.h <= 0.0))
            throw ValidationError("waiting area too small");
        for (int k = 0; k < count; ++k) {
            bool placed = false;
            for (int attempt = 0; attempt < 2000 && !placed; ++attempt) {
                const Vec2 p{rng.uniform(inner.x0, inner.x1()),
                             rng.uniform(inner.y0, inner.y1())};
                placed = true;
                for (const Agent& other : agents)
                    if (dist_sq(p, other.position) < min_dist_sq) {
                        placed = false;
                        break;
                    }
                if (placed) {
                    Agent a;
                    a.id = static_cast<int>(agents.size()) + 1;
                    a.origin = origin;
                    a.position = p;
                    a.radius = r;
                    agents.push_back(a);
                }
            }
            if (!placed) throw ValidationError("waiting area too small");
        }
    };
    place(scenario.origin_left, Origin::Left, n_left);
    place(scenario.origin_right, Origin::Right, n_right);
    for (Agent& a : agents)
        a.free_speed = rng.truncated_normal(params.speed_mean, params.speed_std,
                                            params.speed_min, params.speed_max);
    return agents;
}

namespace {

double utility(Vec2 x, const GridField& tt, std::span<const Vec2> neighbors,
               const GridField& dobs, const SimParams& p) {
    const double T = bilinear_sample(tt, x);
    if (std::isinf(T)) return -kInf;
    double u = -T;
    const double two_r = 2.0 * p.agent_radius;
    for (const Vec2& n : neighbors) {
        const double d = dist(x, n);
        u -= p.repulsion_strength_ped * std::exp(-(d - two_r) / p.repulsion_range_ped);
    }
    u -= p.repulsion_strength_obs *
         std::exp(-bilinear_sample(dobs, x) / p.repulsion_range_obs);
    return u;
}

bool feasible(Vec2 x, const GridField& tt, const GridField& dobs,
              std::span<const Vec2> neighbors, const SimParams& p) {
    if (!tt.in_bounds(x)) return false;
    if (bilinear_sample(dobs, x) < p.agent_radius) return false;
    if (std::isinf(bilinear_sample(tt, x))) return false;
    const double min_dist_sq = 4.0 * p.agent_radius * p.agent_radius;
    for (const Vec2& n : neighbors)
        if (dist_sq(x, n) < min_dist_sq) return false;
    return true;
}

} // namespace

Vec2 step_agent(const Agent& agent, const GridField& tt, std::span<const Vec2> neighbors,
                const GridField& dobs, const SimParams& params, Rng& rng) {
    const double step_radius = agent.free_speed * params.dt;
    Vec2 best = agent.position;
    double best_u = utility(agent.position, tt, neighbors, dobs, params);
    for (int k = 0; k < params.candidate_count; ++k) {
        const double rr = step_radius * std::sqrt(rng.uniform());
        const double phi = 2.0 * M_PI * rng.uniform();
        const Vec2 cand = agent.position + Vec2{rr * std::cos(phi), rr * std::sin(phi)};
        if (!feasible(cand, tt, dobs, neighbors, params)) continue;
        const double u = utility(cand, tt, neighbors, dobs, params);
        if (u > best_u) {
            best_u = u;
            best = cand;
        }
    }
    return best;
}

namespace {

/// Dense uniform grid of agent indices for neighbor queries.
class NeighborGrid {
public:
    NeighborGrid(const Rect& bounds, double cell)
        : x0_(bounds.x0), y0_(bounds.y0), cell_(cell),
          nx_(std::max(1, static_cast<int>(std::ceil(bounds.w / cell)))),
          ny_(std::max(1, static_cast<int>(std::ceil(bounds.h / cell)))),
          cells_(static_cast<std::size_t>(nx_) * ny_) {}

    void insert(int agent, Vec2 p) { cells_[cell_index(p)].push_back(agent); }

    void remove(int agent, Vec2 p) {
        auto& v = cells_[cell_index(p)];
        v.erase(std::find(v.begin(), v.end(), agent));
    }

    void move(int agent, Vec2 from, Vec2 to) {
        const std::size_t a = cell_index(from), b = cell_index(to);
        if (a == b) return;
        auto& v = cells_[a];
        v.erase(std::find(v.begin(), v.end(), agent));
        cells_[b].push_back(agent);
    }

    template <class F>
    void for_each_in_disk(Vec2 center, double radius, F&& f) const {
        const int ix0 = std::clamp(static_cast<int>((center.x - radius - x0_) / cell_), 0, nx_ - 1);
        const int ix1 = std::clamp(static_cast<int>((center.x + radius - x0_) / cell_), 0, nx_ - 1);
        const int iy0 = std::clamp(static_cast<int>((center.y - radius - y0_) / cell_), 0, ny_ - 1);
        const int iy1 = std::clamp(static_cast<int>((center.y + radius - y0_) / cell_), 0, ny_ - 1);
        for (int iy = iy0; iy <= iy1; ++iy)
            for (int ix = ix0; ix <= ix1; ++ix)
                for (int agent : cells_[static_cast<std::size_t>(iy) * nx_ + ix]) f(agent);
    }

private:
    std::size_t cell_index(Vec2 p) const {
        const int ix = std::clamp(static_cast<int>((p.x - x0_) / cell_), 0, nx_ - 1);
        const int iy = std::clamp(static_cast<int>((p.y - y0_) / cell_), 0, ny_ - 1);
        return static_cast<std::size_t>(iy) * nx_ + ix;
    }

    double x0_, y0_, cell_;
    int nx_, ny_;
    std::vector<std::vector<int>> cells_;
};

} // namespace

TrajectorySet run_simulation(const SimContext& ctx, const ScenarioConfig& config,
                             const SimParams& params) {
    validate(config);
    validate(params);
    Rng rng(config.seed);
    std::vector<Agent> agents = spawn_agents(ctx.scenario, config, params, rng);

    TrajectorySet out;
    out.fps = 1.0 / params.dt;
    out.source = TrajSource::Simulated;
    out.name = config.name + "_seed" + std::to_string(config.seed);

    if (agents.empty()) return out;

    // Step budget from the slowest agent's free-flow crossing time.
    double worst = 0.0;
    for (const Agent& a : agents) {
        const double T = bilinear_sample(ctx.travel_time, a.position);
        if (std::isinf(T))
            throw ValidationError("agent spawned in a cell unreachable from the target");
        worst = std::max(worst, T / a.free_speed);
    }
    const long budget =
        std::max<long>(16, static_cast<long>(std::ceil(params.budget_factor * worst / params.dt)));

    // Neighbor interactions beyond 6 repulsion ranges are below 2.5e-3 of
    // the strength and are cut off.
    const double cutoff = 2.0 * params.agent_radius + 6.0 * params.repulsion_range_ped;
    const double max_step = params.speed_max * params.dt;
    NeighborGrid grid(ctx.scenario.bounds, std::max(1.0, cutoff / 2.0));
    for (std::size_t i = 0; i < agents.size(); ++i)
        grid.insert(static_cast<int>(i), agents[i].position);

    auto record = [&](int frame) {
        for (const Agent& a : agents)
            if (!a.arrived) out.pedestrians[a.id].samples.push_back({frame, a.position});
    };
    for (Agent& a : agents) out.pedestrians[a.id].origin = a.origin;
    record(0);

    std::vector<int> order(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i) order[i] = static_cast<int>(i);
    std::vector<Vec2> neighbors;

    int active = static_cast<int>(agents.size());
    for (long tick = 1; tick <= budget && active > 0; ++tick) {
        rng.shuffle(order);
        for (int idx : order) {
            Agent& a = agents[idx];
            if (a.arrived) continue;
            neighbors.clear();
            grid.for_each_in_disk(a.position, cutoff + max_step, [&](int other) {
                if (other != idx) neighbors.push_back(agents[other].position);
            });
            const Vec2 next = step_agent(a, ctx.travel_time, neighbors,
                                         ctx.wall_distance, params, rng);
            if (dist_point_segment(next, ctx.scenario.target) <= params.arrive_dist) {
                a.arrived = true;
                grid.remove(idx, a.position);
                a.position = next;
                --active;
            } else {
                grid.move(idx, a.position, next);
                a.position = next;
            }
        }
        record(static_cast<int>(tick));
    }
    out.stuck_agents = active;
    return out;
}

TrajectorySet run_simulation(const ScenarioConfig& config, const SimParams& params) {
    const SimContext ctx = build_sim_context(config, params);
    return run_simulation(ctx, config, params);
}

} // namespace tjflow
