#include "tjflow/floorfield.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "tjflow/errors.hpp"

namespace tjflow {

GridField make_grid(const Scenario& s, double h) {
    if (!(h > 0.0)) throw ValidationError("grid resolution h must be positive");
    const int nx = std::max(1, static_cast<int>(std::ceil(s.bounds.w / h - 1e-9)));
    const int ny = std::max(1, static_cast<int>(std::ceil(s.bounds.h / h - 1e-9)));
    return GridField(s.bounds.x0, s.bounds.y0, h, nx, ny);
}

std::vector<std::uint8_t> obstacle_mask(const Scenario& s, const GridField& g) {
    std::vector<std::uint8_t> mask(g.values.size(), 0);
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix)
            mask[g.idx(ix, iy)] = s.walkable(g.cell_center(ix, iy)) ? 0 : 1;
    return mask;
}

GridField obstacle_density(const Scenario& s, double h, double sigma_obs) {
    if (!(sigma_obs > 0.0)) throw ValidationError("sigma_obs must be positive");
    GridField g = make_grid(s, h);
    const std::vector<std::uint8_t> mask = obstacle_mask(s, g);

    // Separable normalized kernel, truncated at 3 sigma.
    const int r = static_cast<int>(std::ceil(3.0 * sigma_obs / h));
    std::vector<double> kernel(2 * r + 1);
    double ksum = 0.0;
    for (int k = -r; k <= r; ++k) {
        kernel[k + r] = std::exp(-0.5 * (k * h) * (k * h) / (sigma_obs * sigma_obs));
        ksum += kernel[k + r];
    }
    for (double& w : kernel) w /= ksum;

    // Cells beyond the grid are treated as obstacle: the domain boundary is
    // wall everywhere by construction.
    GridField tmp = g;
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            double acc = 0.0;
            for (int k = -r; k <= r; ++k) {
                const int jx = ix + k;
                const double v =
                    (jx < 0 || jx >= g.nx) ? 1.0 : static_cast<double>(mask[g.idx(jx, iy)]);
                acc += kernel[k + r] * v;
            }
            tmp.at(ix, iy) = acc;
        }
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            double acc = 0.0;
            for (int k = -r; k <= r; ++k) {
                const int jy = iy + k;
                const double v = (jy < 0 || jy >= g.ny) ? 1.0 : tmp.at(ix, jy);
                acc += kernel[k + r] * v;
            }
            g.at(ix, iy) = acc;
        }
    return g;
}

namespace {

/// Shared setup for the two solvers: cost per cell and target seeds.
struct CostField {
    GridField grid;
    std::vector<std::uint8_t> blocked;
    std::vector<double> cost;
    std::vector<std::size_t> targets;
};

CostField build_cost_field(const Scenario& s, double w_obs, double h, double sigma_obs) {
    CostField f;
    f.grid = make_grid(s, h);
    f.blocked = obstacle_mask(s, f.grid);
    f.cost.assign(f.grid.values.size(), 1.0);
    if (w_obs > 0.0) {
        const GridField rho = obstacle_density(s, h, sigma_obs);
        for (std::size_t i = 0; i < f.cost.size(); ++i)
            f.cost[i] = 1.0 + kObstacleWeightScale * w_obs * rho.values[i];
    }
    for (int iy = 0; iy < f.grid.ny; ++iy)
        for (int ix = 0; ix < f.grid.nx; ++ix) {
            const std::size_t i = f.grid.idx(ix, iy);
            if (f.blocked[i]) continue;
            if (dist_point_segment(f.grid.cell_center(ix, iy), s.target) <= h / 2.0 + 1e-12)
                f.targets.push_back(i);
        }
    if (f.targets.empty())
        throw ValidationError("target segment does not rasterize to any walkable cell");
    return f;
}

using HeapEntry = std::pair<double, std::size_t>; // (value, cell), min-heap

struct HeapGreater {
    bool operator()(const HeapEntry& a, const HeapEntry& b) const { return a.first > b.first; }
};

} // namespace

GridField travel_time_field(const Scenario& s, double w_obs, double h, double sigma_obs) {
    if (w_obs < 0.0) throw ValidationError("w_obs must be non-negative");
    CostField f = build_cost_field(s, w_obs, h, sigma_obs);
    GridField& T = f.grid;
    std::fill(T.values.begin(), T.values.end(), kInf);
    std::vector<std::uint8_t> frozen(T.values.size(), 0);

    std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapGreater> heap;
    for (std::size_t i : f.targets) {
        T.values[i] = 0.0;
        heap.push({0.0, i});
    }

    // Upwind Godunov update from the smaller of each axis pair.
    auto update = [&](int ix, int iy) -> double {
        const std::size_t i = T.idx(ix, iy);
        auto axis_min = [&](int dx, int dy) {
            double m = kInf;
            if (ix + dx >= 0 && ix + dx < T.nx && iy + dy >= 0 && iy + dy < T.ny) {
                const std::size_t j = T.idx(ix + dx, iy + dy);
                if (frozen[j]) m = T.values[j];
            }
            if (ix - dx >= 0 && ix - dx < T.nx && iy - dy >= 0 && iy - dy < T.ny) {
                const std::size_t j = T.idx(ix - dx, iy - dy);
                if (frozen[j]) m = std::min(m, T.values[j]);
            }
            return m;
        };
        const double a = axis_min(1, 0);
        const double b = axis_min(0, 1);
        const double fh = f.cost[i] * T.h;
        if (std::isinf(a) && std::isinf(b)) return kInf;
        const double lo = std::min(a, b);
        if (std::abs(a - b) >= fh || std::isinf(std::max(a, b))) return lo + fh;
        return 0.5 * (a + b + std::sqrt(2.0 * fh * fh - (a - b) * (a - b)));
    };

    const int dx4[] = {1, -1, 0, 0};
    const int dy4[] = {0, 0, 1, -1};
    while (!heap.empty()) {
        const auto [tv, i] = heap.top();
        heap.pop();
        if (frozen[i] || tv > T.values[i]) continue; // stale entry
        frozen[i] = 1;
        const int ix = static_cast<int>(i % T.nx);
        const int iy = static_cast<int>(i / T.nx);
        for (int k = 0; k < 4; ++k) {
            const int jx = ix + dx4[k], jy = iy + dy4[k];
            if (jx < 0 || jx >= T.nx || jy < 0 || jy >= T.ny) continue;
            const std::size_t j = T.idx(jx, jy);
            if (frozen[j] || f.blocked[j]) continue;
            const double cand = update(jx, jy);
            if (cand < T.values[j]) {
                T.values[j] = cand;
                heap.push({cand, j});
            }
        }
    }
    return T;
}

GridField dijkstra_oracle(const Scenario& s, double w_obs, double h, double sigma_obs) {
    if (w_obs < 0.0) throw ValidationError("w_obs must be non-negative");
    CostField f = build_cost_field(s, w_obs, h, sigma_obs);
    GridField& T = f.grid;
    std::fill(T.values.begin(), T.values.end(), kInf);
    std::vector<std::uint8_t> done(T.values.size(), 0);

    std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapGreater> heap;
    for (std::size_t i : f.targets) {
        T.values[i] = 0.0;
        heap.push({0.0, i});
    }
    const int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
    const int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
    const double sqrt2 = std::sqrt(2.0);
    while (!heap.empty()) {
        const auto [tv, i] = heap.top();
        heap.pop();
        if (done[i] || tv > T.values[i]) continue;
        done[i] = 1;
        const int ix = static_cast<int>(i % T.nx);
        const int iy = static_cast<int>(i / T.nx);
        for (int k = 0; k < 8; ++k) {
            const int jx = ix + dx8[k], jy = iy + dy8[k];
            if (jx < 0 || jx >= T.nx || jy < 0 || jy >= T.ny) continue;
            const std::size_t j = T.idx(jx, jy);
            if (done[j] || f.blocked[j]) continue;
            const double len = (k < 4 ? h : sqrt2 * h);
            const double cand = T.values[i] + len * 0.5 * (f.cost[i] + f.cost[j]);
            if (cand < T.values[j]) {
                T.values[j] = cand;
                heap.push({cand, j});
            }
        }
    }
    return T;
}

namespace {

/// Felzenszwalb-Huttenlocher 1-D squared distance transform (lower
/// envelope of parabolas). Inputs use a large finite sentinel for "no
/// source in this column".
void edt_1d(const std::vector<double>& f, std::vector<double>& d, int n) {
    static thread_local std::vector<int> v;
    static thread_local std::vector<double> z;
    v.assign(n, 0);
    z.assign(n + 1, 0.0);
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < n; ++q) {
        double sep = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
        while (sep <= z[k]) {
            --k;
            sep = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = sep;
        z[k + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

constexpr double kEdtSentinel = 1e12; // squared cell units, beyond any real grid

} // namespace

GridField obstacle_distance(const Scenario& s, double h) {
    GridField g = make_grid(s, h);
    const std::vector<std::uint8_t> mask = obstacle_mask(s, g);
    // Squared distance in cell units, then one pass per axis.
    std::vector<double> sq(g.values.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = mask[i] ? 0.0 : kEdtSentinel;

    std::vector<double> col(g.ny), out(std::max(g.nx, g.ny));
    for (int ix = 0; ix < g.nx; ++ix) {
        for (int iy = 0; iy < g.ny; ++iy) col[iy] = sq[g.idx(ix, iy)];
        edt_1d(col, out, g.ny);
        for (int iy = 0; iy < g.ny; ++iy) sq[g.idx(ix, iy)] = out[iy];
    }
    std::vector<double> row(g.nx);
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) row[ix] = sq[g.idx(ix, iy)];
        edt_1d(row, out, g.nx);
        for (int ix = 0; ix < g.nx; ++ix) g.at(ix, iy) = h * std::sqrt(out[ix]);
    }
    return g;
}

} // namespace tjflow
