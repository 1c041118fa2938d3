#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tjflow/geometry.hpp"
#include "tjflow/trajectory.hpp"

namespace tjflow {

/// Origin label as an exact count pair; frac_left + frac_right == 1 holds
/// by construction (rational arithmetic, never renormalized floats).
struct LabelCount {
    long n_left = 0;
    long n_right = 0;

    long total() const { return n_left + n_right; }
    double frac_left() const { return static_cast<double>(n_left) / total(); }
    double frac_right() const { return static_cast<double>(n_right) / total(); }
    bool is_equal_split() const { return n_left == n_right; }
};

struct HeatmapSample {
    std::vector<double> values; // ny * nx, row-major
    LabelCount label;
    int frame = 0;
    TrajSource source = TrajSource::Simulated;
    std::string run_name;
};

struct DatasetGrid {
    int nx = 0;
    int ny = 0;
    double h = 0.1;
    Rect area;

    bool operator==(const DatasetGrid&) const = default;
};

struct Dataset {
    DatasetGrid grid;
    std::vector<HeatmapSample> samples;
};

using PositionedOrigin = std::pair<Vec2, Origin>;

/// Positions recorded at exactly this frame, no interpolation.
std::vector<PositionedOrigin> frame_positions(const TrajectorySet& trajset, int frame);

/// Grid geometry used for heatmaps over an observation area.
DatasetGrid heatmap_grid(const Rect& area, double h_g);

/// Sum of 2-D Gaussian kernels 1/(2 pi sigma^2) exp(-r^2 / 2 sigma^2) at
/// cell centers, kernels truncated at 3 sigma. Every pedestrian within the
/// area or within 3 sigma of it contributes, regardless of origin label.
std::vector<double> gaussian_heatmap(std::span<const PositionedOrigin> positions,
                                     const DatasetGrid& grid, double sigma);

/// Counts of labeled pedestrians inside the area; std::nullopt when none.
std::optional<LabelCount> label_frame(std::span<const PositionedOrigin> positions,
                                      const Rect& area);

/// One sample for every frame_stride-th frame with a non-empty label, run
/// by run in the given order, frames ascending. Heavy kernel work runs in
/// parallel when jobs != 1; the result is identical for any jobs value.
Dataset build_dataset(std::span<const TrajectorySet> trajsets, const Rect& area,
                      double h_g, double sigma, int frame_stride = 1, int jobs = 0);

/// Drops samples whose grid equals (L-inf <= 1e-12) the previously retained
/// sample of the same run. Idempotent, order preserving.
Dataset dedup_consecutive(const Dataset& dataset);

/// Keeps at most cap samples labeled exactly 50/50 by evenly spaced
/// selection; everything else is untouched and order is preserved.
Dataset rebalance_equal(const Dataset& dataset, long cap);

/// Count of the second most frequent label: the default cap for
/// rebalance_equal. Zero for datasets with fewer than two distinct labels.
long default_equal_cap(const Dataset& dataset);

struct DistributionRow {
    long n_left = 0;  // reduced fraction numerator
    long n_right = 0; // reduced fraction denominator complement
    long count = 0;

    double frac_left() const { return static_cast<double>(n_left) / (n_left + n_right); }
    double frac_right() const { return static_cast<double>(n_right) / (n_left + n_right); }
};

/// Samples grouped by exact label value, sorted by frac_left ascending.
std::vector<DistributionRow> distribution_report(const Dataset& dataset);

/// Text format, the featurize/train contract:
///   # heatmap-dataset v1 nx=<int> ny=<int> h=<m> area=<x0,y0,w,h>
///   run_name,frame,source,n_left,n_right,cell_0,...,cell_{p-1}
/// Numbers use shortest round-trip formatting; write -> read -> write is
/// byte-identical.
void write_dataset(std::ostream& out, const Dataset& dataset);
Dataset read_dataset(std::istream& in);

} // namespace tjflow
