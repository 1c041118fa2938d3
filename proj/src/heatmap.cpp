#include "tjflow/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>

#include "tjflow/errors.hpp"
#include "tjflow/parallel.hpp"
#include "tjflow/text.hpp"

namespace tjflow {

std::vector<PositionedOrigin> frame_positions(const TrajectorySet& set, int frame) {
    std::vector<PositionedOrigin> out;
    for (const auto& [id, ped] : set.pedestrians) {
        const auto it = std::lower_bound(
            ped.samples.begin(), ped.samples.end(), frame,
            [](const TrajectorySample& s, int f) { return s.frame < f; });
        if (it != ped.samples.end() && it->frame == frame)
            out.push_back({it->position, ped.origin});
    }
    return out;
}

DatasetGrid heatmap_grid(const Rect& area, double h_g) {
    if (!(h_g > 0.0)) throw ValidationError("heatmap cell size must be positive");
    DatasetGrid g;
    g.h = h_g;
    g.area = area;
    g.nx = std::max(1, static_cast<int>(std::llround(area.w / h_g)));
    g.ny = std::max(1, static_cast<int>(std::llround(area.h / h_g)));
    return g;
}

std::vector<double> gaussian_heatmap(std::span<const PositionedOrigin> positions,
                                     const DatasetGrid& grid, double sigma) {
    if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
    std::vector<double> values(static_cast<std::size_t>(grid.nx) * grid.ny, 0.0);
    const double cut = 3.0 * sigma;
    const double cut_sq = cut * cut;
    const double amp = 1.0 / (2.0 * M_PI * sigma * sigma);
    const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    const Rect& a = grid.area;
    for (const auto& [p, origin] : positions) {
        if (p.x < a.x0 - cut || p.x > a.x1() + cut || p.y < a.y0 - cut ||
            p.y > a.y1() + cut)
            continue;
        // Cell index window covered by the truncated kernel.
        const int ix0 = std::max(0, static_cast<int>(std::floor((p.x - cut - a.x0) / grid.h - 0.5)));
        const int ix1 = std::min(grid.nx - 1, static_cast<int>(std::ceil((p.x + cut - a.x0) / grid.h - 0.5)));
        const int iy0 = std::max(0, static_cast<int>(std::floor((p.y - cut - a.y0) / grid.h - 0.5)));
        const int iy1 = std::min(grid.ny - 1, static_cast<int>(std::ceil((p.y + cut - a.y0) / grid.h - 0.5)));
        for (int iy = iy0; iy <= iy1; ++iy) {
            const double dy = a.y0 + (iy + 0.5) * grid.h - p.y;
            for (int ix = ix0; ix <= ix1; ++ix) {
                const double dx = a.x0 + (ix + 0.5) * grid.h - p.x;
                const double r_sq = dx * dx + dy * dy;
                if (r_sq > cut_sq) continue;
                values[static_cast<std::size_t>(iy) * grid.nx + ix] +=
                    amp * std::exp(-r_sq * inv_two_sigma_sq);
            }
        }
    }
    return values;
}

std::optional<LabelCount> label_frame(std::span<const PositionedOrigin> positions,
                                      const Rect& area) {
    LabelCount label;
    for (const auto& [p, origin] : positions) {
        if (!area.contains(p)) continue;
        if (origin == Origin::Left) ++label.n_left;
        if (origin == Origin::Right) ++label.n_right;
    }
    if (label.total() == 0) return std::nullopt;
    return label;
}

Dataset build_dataset(std::span<const TrajectorySet> trajsets, const Rect& area,
                      double h_g, double sigma, int frame_stride, int jobs) {
    if (frame_stride < 1) throw ValidationError("frame_stride must be >= 1");
    Dataset ds;
    ds.grid = heatmap_grid(area, h_g);

    // Labels first (cheap, sequential), kernels afterwards (parallel).
    struct Pending {
        std::vector<PositionedOrigin> positions;
        std::size_t sample_index;
    };
    std::vector<Pending> pending;
    for (const TrajectorySet& set : trajsets) {
        if (set.pedestrians.empty()) continue;
        const int lo = set.min_frame(), hi = set.max_frame();
        for (int frame = lo; frame <= hi; frame += frame_stride) {
            auto positions = frame_positions(set, frame);
            const auto label = label_frame(positions, area);
            if (!label) continue;
            HeatmapSample sample;
            sample.label = *label;
            sample.frame = frame;
            sample.source = set.source;
            sample.run_name = set.name;
            pending.push_back({std::move(positions), ds.samples.size()});
            ds.samples.push_back(std::move(sample));
        }
    }

    const long n = static_cast<long>(pending.size());
    const int workers = par::resolve_jobs(jobs);
#pragma omp parallel for schedule(dynamic, 16) num_threads(workers) if (workers > 1)
    for (long i = 0; i < n; ++i) {
        ds.samples[pending[i].sample_index].values =
            gaussian_heatmap(pending[i].positions, ds.grid, sigma);
    }
    return ds;
}

namespace {

bool grids_equal(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > 1e-12) return false;
    return true;
}

} // namespace

Dataset dedup_consecutive(const Dataset& dataset) {
    Dataset out;
    out.grid = dataset.grid;
    const HeatmapSample* last_retained = nullptr;
    std::string current_run;
    for (const HeatmapSample& s : dataset.samples) {
        if (s.run_name != current_run) {
            current_run = s.run_name;
            last_retained = nullptr; // first sample of each run is always kept
        }
        if (last_retained && grids_equal(last_retained->values, s.values)) continue;
        out.samples.push_back(s);
        last_retained = &out.samples.back();
    }
    return out;
}

Dataset rebalance_equal(const Dataset& dataset, long cap) {
    if (cap < 0) throw ValidationError("rebalance cap must be >= 0");
    std::vector<std::size_t> equal_idx;
    for (std::size_t i = 0; i < dataset.samples.size(); ++i)
        if (dataset.samples[i].label.is_equal_split()) equal_idx.push_back(i);
    const long n_equal = static_cast<long>(equal_idx.size());

    std::vector<char> keep(dataset.samples.size(), 1);
    if (n_equal > cap) {
        for (std::size_t i : equal_idx) keep[i] = 0;
        // Evenly spaced selection retains exactly cap samples.
        for (long k = 0; k < cap; ++k)
            keep[equal_idx[static_cast<std::size_t>(k * n_equal / cap)]] = 1;
    }
    Dataset out;
    out.grid = dataset.grid;
    for (std::size_t i = 0; i < dataset.samples.size(); ++i)
        if (keep[i]) out.samples.push_back(dataset.samples[i]);
    return out;
}

namespace {

/// Canonical reduced label for grouping: counts divided by their gcd.
std::pair<long, long> reduced_label(const LabelCount& label) {
    const long g = std::gcd(label.n_left, label.n_right);
    return {label.n_left / (g ? g : 1), label.n_right / (g ? g : 1)};
}

} // namespace

long default_equal_cap(const Dataset& dataset) {
    const auto rows = distribution_report(dataset);
    if (rows.size() < 2) return 0;
    std::vector<long> counts;
    for (const DistributionRow& r : rows) counts.push_back(r.count);
    std::sort(counts.begin(), counts.end(), std::greater<>());
    return counts[1];
}

std::vector<DistributionRow> distribution_report(const Dataset& dataset) {
    std::map<std::pair<long, long>, long> groups;
    for (const HeatmapSample& s : dataset.samples) ++groups[reduced_label(s.label)];
    std::vector<DistributionRow> rows;
    for (const auto& [key, count] : groups) rows.push_back({key.first, key.second, count});
    std::sort(rows.begin(), rows.end(), [](const DistributionRow& a, const DistributionRow& b) {
        return a.frac_left() < b.frac_left();
    });
    return rows;
}

void write_dataset(std::ostream& out, const Dataset& dataset) {
    const DatasetGrid& g = dataset.grid;
    out << "# heatmap-dataset v1 nx=" << g.nx << " ny=" << g.ny
        << " h=" << format_double(g.h) << " area=" << format_double(g.area.x0) << ','
        << format_double(g.area.y0) << ',' << format_double(g.area.w) << ','
        << format_double(g.area.h) << '\n';
    for (const HeatmapSample& s : dataset.samples) {
        out << s.run_name << ',' << s.frame << ',' << source_name(s.source) << ','
            << s.label.n_left << ',' << s.label.n_right;
        for (const double v : s.values) out << ',' << format_double(v);
        out << '\n';
    }
}

namespace {

std::vector<std::string_view> split_csv(std::string_view sv) {
    std::vector<std::string_view> fields;
    for (;;) {
        const std::size_t comma = sv.find(',');
        fields.push_back(sv.substr(0, comma));
        if (comma == std::string_view::npos) break;
        sv.remove_prefix(comma + 1);
    }
    return fields;
}

} // namespace

Dataset read_dataset(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty dataset file", 1);
    Dataset ds;
    {
        std::string_view sv(line);
        const std::string_view magic = "# heatmap-dataset v1 ";
        if (sv.substr(0, magic.size()) != magic)
            throw ParseError("not a heatmap-dataset v1 file", 1);
        sv.remove_prefix(magic.size());
        auto take = [&](std::string_view key) {
            const std::size_t at = sv.find(key);
            if (at == std::string_view::npos) throw ParseError("missing header key", 1);
            std::string_view rest = sv.substr(at + key.size());
            return rest.substr(0, rest.find(' '));
        };
        ds.grid.nx = static_cast<int>(parse_int(take("nx="), 1));
        ds.grid.ny = static_cast<int>(parse_int(take("ny="), 1));
        ds.grid.h = parse_double(take("h="), 1);
        const auto area_fields = split_csv(take("area="));
        if (area_fields.size() != 4) throw ParseError("area= needs x0,y0,w,h", 1);
        ds.grid.area = {parse_double(area_fields[0], 1), parse_double(area_fields[1], 1),
                        parse_double(area_fields[2], 1), parse_double(area_fields[3], 1)};
    }
    const std::size_t n_cells = static_cast<std::size_t>(ds.grid.nx) * ds.grid.ny;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_csv(line);
        if (fields.size() != 5 + n_cells)
            throw ParseError("expected " + std::to_string(5 + n_cells) + " fields, got " +
                                 std::to_string(fields.size()),
                             line_no);
        HeatmapSample s;
        s.run_name = std::string(fields[0]);
        s.frame = static_cast<int>(parse_int(fields[1], line_no));
        s.source = source_from_name(std::string(fields[2]));
        s.label.n_left = parse_int(fields[3], line_no);
        s.label.n_right = parse_int(fields[4], line_no);
        if (s.label.total() <= 0) throw ParseError("label counts must sum to > 0", line_no);
        s.values.resize(n_cells);
        for (std::size_t i = 0; i < n_cells; ++i)
            s.values[i] = parse_double(fields[5 + i], line_no);
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

} // namespace tjflow
