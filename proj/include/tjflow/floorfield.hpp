#pragma once

#include <cstdint>
#include <vector>

#include "tjflow/grid.hpp"
#include "tjflow/scenario.hpp"

namespace tjflow {

/// Cost model c(x) = 1 + kObstacleWeightScale * w_obs * rho_obs(x) per
/// meter; rho_obs is the blurred obstacle indicator below.
constexpr double kObstacleWeightScale = 5.0;
constexpr double kDefaultSigmaObs = 0.5;

/// Grid laid over the scenario bounds at resolution h.
GridField make_grid(const Scenario& scenario, double h);

/// 1 = cell center inside an obstacle polygon (or outside bounds).
std::vector<std::uint8_t> obstacle_mask(const Scenario& scenario, const GridField& grid);

/// Walkable cells seeded with T = 0: centers within h/2 of the target
/// segment, or within h when the segment falls exactly on a cell-row
/// boundary and the nearer row is wall. Throws when empty.
std::vector<std::size_t> rasterize_target(const Scenario& scenario, const GridField& grid,
                                          const std::vector<std::uint8_t>& blocked);

/// Gaussian blur (std sigma_obs, kernel cut at 3 sigma) of the obstacle
/// indicator, sampled at cell centers; values in [0, 1].
GridField obstacle_density(const Scenario& scenario, double h,
                           double sigma_obs = kDefaultSigmaObs);

/// Travel time to the target by first-order fast marching (upwind Godunov)
/// on the cost field above. T = 0 on target cells, +inf on obstacle cells
/// and unreachable pockets. Throws if the target rasterizes to no walkable
/// cell.
GridField travel_time_field(const Scenario& scenario, double w_obs, double h,
                            double sigma_obs = kDefaultSigmaObs);

/// Reference solver: 8-neighbor shortest path, edge weight = step length *
/// average endpoint cost, same boundary conditions as travel_time_field.
GridField dijkstra_oracle(const Scenario& scenario, double w_obs, double h,
                          double sigma_obs = kDefaultSigmaObs);

/// Euclidean distance from each cell center to the nearest obstacle cell
/// center (0 inside obstacles). Exact two-pass transform.
GridField obstacle_distance(const Scenario& scenario, double h);

} // namespace tjflow
