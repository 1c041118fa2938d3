#pragma once

#include <iosfwd>
#include <limits>
#include <vector>

#include "tjflow/geometry.hpp"

namespace tjflow {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Scalar field sampled at cell centers of a regular grid. Row-major:
/// values[iy * nx + ix], cell (ix, iy) centered at
/// (x0 + (ix + 0.5) h, y0 + (iy + 0.5) h).
struct GridField {
    double x0 = 0.0;
    double y0 = 0.0;
    double h = 0.1;
    int nx = 0;
    int ny = 0;
    std::vector<double> values;

    GridField() = default;
    GridField(double x0_, double y0_, double h_, int nx_, int ny_, double fill = 0.0)
        : x0(x0_), y0(y0_), h(h_), nx(nx_), ny(ny_),
          values(static_cast<std::size_t>(nx_) * ny_, fill) {}

    std::size_t idx(int ix, int iy) const { return static_cast<std::size_t>(iy) * nx + ix; }
    double at(int ix, int iy) const { return values[idx(ix, iy)]; }
    double& at(int ix, int iy) { return values[idx(ix, iy)]; }
    Vec2 cell_center(int ix, int iy) const {
        return {x0 + (ix + 0.5) * h, y0 + (iy + 0.5) * h};
    }
    bool in_bounds(Vec2 p) const {
        return p.x >= x0 && p.x <= x0 + nx * h && p.y >= y0 && p.y <= y0 + ny * h;
    }
};

/// Bilinear interpolation of the four surrounding cell values. If any of
/// the four corners is +infinity the result is +infinity. Throws
/// ValidationError for points outside the grid.
double bilinear_sample(const GridField& field, Vec2 p);

/// CSV grid with header line `# nx ny h x0 y0`; rows bottom-up, one per iy.
void write_grid_csv(std::ostream& out, const GridField& field);
GridField read_grid_csv(std::istream& in);

} // namespace tjflow
