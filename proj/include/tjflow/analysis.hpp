#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "tjflow/grid.hpp"
#include "tjflow/heatmap.hpp"
#include "tjflow/trajectory.hpp"

namespace tjflow {

struct DensitySpeedPoint {
    int frame = 0;
    double density = 0.0; // pedestrians / m^2
    double speed = 0.0;   // m/s
    int area_id = 0;
};

/// Discretized Voronoi density over a measurement area: a grid of cell
/// size h_v covers the area, every cell belongs to its (Euclidean) nearest
/// pedestrian, |V_i| is the owned area, and the density is
/// (1/|A|) * sum over cells of h_v^2 / |V_owner|. Pedestrians outside the
/// area own boundary cells and contribute accordingly. Throws on empty
/// positions ("undefined density").
double voronoi_density(std::span<const Vec2> positions, const Rect& area, double h_v);

/// Mean over in-area pedestrians of the central-difference speed
/// |x(f+1) - x(f-1)| * fps / 2, one-sided at trajectory ends; nullopt when
/// no in-area pedestrian has a computable speed.
std::optional<double> mean_speed(const TrajectorySet& trajset, int frame, const Rect& area);

/// One density/speed point per frame where both are defined.
std::vector<DensitySpeedPoint> fundamental_diagram(const TrajectorySet& trajset,
                                                   const Rect& area, int area_id,
                                                   double h_v = 0.05);

struct VoronoiMap {
    GridField field;
    long frames_used = 0;
};

/// Per-frame field 1/|V_owner| on every cell of the region grid, averaged
/// over all frames with at least one pedestrian. An optional walkable mask
/// (1 = blocked) excludes cells from ownership. Frames are independent and
/// are processed in parallel when jobs != 1.
VoronoiMap average_voronoi_map(const TrajectorySet& trajset, const Rect& region,
                               double h_v, std::span<const std::uint8_t> blocked = {},
                               int jobs = 0);

/// Spearman rank correlation, average ranks on ties.
double spearman(std::span<const double> x, std::span<const double> y);

void write_fd_csv(std::ostream& out, std::span<const DensitySpeedPoint> points);

} // namespace tjflow
