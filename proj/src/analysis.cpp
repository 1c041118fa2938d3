#include "tjflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "tjflow/errors.hpp"
#include "tjflow/parallel.hpp"
#include "tjflow/text.hpp"

namespace tjflow {

namespace {

/// 2-d kd-tree over a fixed point set; exact nearest neighbor.
class KdTree {
public:
    explicit KdTree(std::span<const Vec2> points) : points_(points.begin(), points.end()) {
        index_.resize(points_.size());
        std::iota(index_.begin(), index_.end(), 0);
        if (!index_.empty()) build(0, index_.size(), 0);
    }

    int nearest(Vec2 q) const {
        int best = -1;
        double best_d = kInf;
        search(q, 0, index_.size(), 0, best, best_d);
        return best;
    }

private:
    void build(std::size_t lo, std::size_t hi, int axis) {
        if (hi - lo <= 1) return;
        const std::size_t mid = (lo + hi) / 2;
        std::nth_element(index_.begin() + lo, index_.begin() + mid, index_.begin() + hi,
                         [&](int a, int b) {
                             const double va = axis ? points_[a].y : points_[a].x;
                             const double vb = axis ? points_[b].y : points_[b].x;
                             return va < vb || (va == vb && a < b);
                         });
        build(lo, mid, 1 - axis);
        build(mid + 1, hi, 1 - axis);
    }

    void search(Vec2 q, std::size_t lo, std::size_t hi, int axis, int& best,
                double& best_d) const {
        if (lo >= hi) return;
        const std::size_t mid = (lo + hi) / 2;
        const int i = index_[mid];
        const double d = dist_sq(q, points_[i]);
        // Lowest index wins ties so results do not depend on tree layout.
        if (d < best_d || (d == best_d && i < best)) {
            best_d = d;
            best = i;
        }
        const double delta = axis ? q.y - points_[i].y : q.x - points_[i].x;
        const auto near = delta < 0 ? std::pair{lo, mid} : std::pair{mid + 1, hi};
        const auto far = delta < 0 ? std::pair{mid + 1, hi} : std::pair{lo, mid};
        search(q, near.first, near.second, 1 - axis, best, best_d);
        if (delta * delta <= best_d) search(q, far.first, far.second, 1 - axis, best, best_d);
    }

    std::vector<Vec2> points_;
    std::vector<int> index_;
};

struct VoronoiCells {
    std::vector<int> owner;    // per grid cell, -1 if blocked
    std::vector<long> counts;  // owned cells per pedestrian
};

VoronoiCells assign_cells(std::span<const Vec2> positions, const Rect& region, double h_v,
                          int nx, int ny, std::span<const std::uint8_t> blocked) {
    VoronoiCells vc;
    vc.owner.assign(static_cast<std::size_t>(nx) * ny, -1);
    vc.counts.assign(positions.size(), 0);
    const KdTree tree(positions);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const std::size_t c = static_cast<std::size_t>(iy) * nx + ix;
            if (!blocked.empty() && blocked[c]) continue;
            const Vec2 center{region.x0 + (ix + 0.5) * h_v, region.y0 + (iy + 0.5) * h_v};
            const int who = tree.nearest(center);
            vc.owner[c] = who;
            ++vc.counts[who];
        }
    return vc;
}

std::pair<int, int> region_grid(const Rect& region, double h_v) {
    if (!(h_v > 0.0)) throw ValidationError("h_v must be positive");
    const int nx = std::max(1, static_cast<int>(std::llround(region.w / h_v)));
    const int ny = std::max(1, static_cast<int>(std::llround(region.h / h_v)));
    return {nx, ny};
}

} // namespace

double voronoi_density(std::span<const Vec2> positions, const Rect& area, double h_v) {
    if (positions.empty()) throw ValidationError("undefined density: no pedestrians");
    const auto [nx, ny] = region_grid(area, h_v);
    const VoronoiCells vc = assign_cells(positions, area, h_v, nx, ny, {});
    const double cell_area = h_v * h_v;
    double acc = 0.0;
    for (const int who : vc.owner)
        if (who >= 0) acc += cell_area / (vc.counts[who] * cell_area);
    return acc / area.area();
}

std::optional<double> mean_speed(const TrajectorySet& set, int frame, const Rect& area) {
    double sum = 0.0;
    long n = 0;
    for (const auto& [id, ped] : set.pedestrians) {
        const auto& s = ped.samples;
        const auto at = [&](int f) {
            const auto it = std::lower_bound(
                s.begin(), s.end(), f,
                [](const TrajectorySample& a, int fr) { return a.frame < fr; });
            return (it != s.end() && it->frame == f) ? &*it : nullptr;
        };
        const TrajectorySample* here = at(frame);
        if (!here || !area.contains(here->position)) continue;
        const TrajectorySample* prev = at(frame - 1);
        const TrajectorySample* next = at(frame + 1);
        double speed;
        if (prev && next)
            speed = dist(next->position, prev->position) * set.fps / 2.0;
        else if (next)
            speed = dist(next->position, here->position) * set.fps;
        else if (prev)
            speed = dist(here->position, prev->position) * set.fps;
        else
            continue;
        sum += speed;
        ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / n;
}

std::vector<DensitySpeedPoint> fundamental_diagram(const TrajectorySet& set,
                                                   const Rect& area, int area_id,
                                                   double h_v) {
    std::vector<DensitySpeedPoint> points;
    if (set.pedestrians.empty()) return points;
    const int lo = set.min_frame(), hi = set.max_frame();
    for (int frame = lo; frame <= hi; ++frame) {
        const auto pos_orig = frame_positions(set, frame);
        if (pos_orig.empty()) continue;
        const auto speed = mean_speed(set, frame, area);
        if (!speed) continue;
        std::vector<Vec2> positions;
        positions.reserve(pos_orig.size());
        for (const auto& [p, o] : pos_orig) positions.push_back(p);
        points.push_back({frame, voronoi_density(positions, area, h_v), *speed, area_id});
    }
    return points;
}

VoronoiMap average_voronoi_map(const TrajectorySet& set, const Rect& region, double h_v,
                               std::span<const std::uint8_t> blocked, int jobs) {
    const auto [nx, ny] = region_grid(region, h_v);
    VoronoiMap out;
    out.field = GridField(region.x0, region.y0, h_v, nx, ny);
    if (set.pedestrians.empty()) return out;

    std::vector<std::vector<Vec2>> frames;
    for (int frame = set.min_frame(); frame <= set.max_frame(); ++frame) {
        std::vector<Vec2> positions;
        for (const auto& [p, o] : frame_positions(set, frame)) positions.push_back(p);
        if (!positions.empty()) frames.push_back(std::move(positions));
    }
    out.frames_used = static_cast<long>(frames.size());
    if (frames.empty()) return out;

    // Frames are summed within fixed index blocks and the blocks reduced in
    // order, so the result is bitwise independent of thread count.
    const double cell_area = h_v * h_v;
    const long n = static_cast<long>(frames.size());
    const long block = std::max<long>(1, (n + 63) / 64);
    const long n_blocks = (n + block - 1) / block;
    std::vector<std::vector<double>> partial(
        n_blocks, std::vector<double>(out.field.values.size(), 0.0));
    const int workers = par::resolve_jobs(jobs);
#pragma omp parallel for schedule(dynamic) num_threads(workers) if (workers > 1)
    for (long b = 0; b < n_blocks; ++b) {
        std::vector<double>& acc = partial[b];
        for (long i = b * block; i < std::min(n, (b + 1) * block); ++i) {
            const VoronoiCells vc = assign_cells(frames[i], region, h_v, nx, ny, blocked);
            for (std::size_t c = 0; c < vc.owner.size(); ++c)
                if (vc.owner[c] >= 0) acc[c] += 1.0 / (vc.counts[vc.owner[c]] * cell_area);
        }
    }
    for (const auto& acc : partial)
        for (std::size_t c = 0; c < acc.size(); ++c) out.field.values[c] += acc[c];
    for (double& v : out.field.values) v /= static_cast<double>(out.frames_used);
    return out;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ValidationError("spearman requires two equal-length series (n >= 2)");
    auto ranks = [](std::span<const double> v) {
        const std::size_t n = v.size();
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = 0.5 * (i + j) + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(x), ry = ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

void write_fd_csv(std::ostream& out, std::span<const DensitySpeedPoint> points) {
    out << "frame,area_id,density,speed\n";
    for (const DensitySpeedPoint& p : points)
        out << p.frame << ',' << p.area_id << ',' << format_double(p.density) << ','
            << format_double(p.speed) << '\n';
}

} // namespace tjflow
