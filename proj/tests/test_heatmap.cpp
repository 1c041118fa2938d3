#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "tjflow/errors.hpp"
#include "tjflow/heatmap.hpp"
#include "tjflow/rng.hpp"

using namespace tjflow;

namespace {

const Rect kArea{-1.2, 4.4, 2.4, 1.0}; // observation-area-like window

TrajectorySet make_run(const std::string& name,
                       const std::vector<std::tuple<int, int, Vec2, Origin>>& rows) {
    TrajectorySet set;
    set.name = name;
    set.fps = 2.5;
    set.source = TrajSource::Simulated;
    for (const auto& [id, frame, pos, origin] : rows) {
        set.pedestrians[id].origin = origin;
        set.pedestrians[id].samples.push_back({frame, pos});
    }
    return set;
}

/// Synthetic dataset with direct control over grids and labels.
Dataset synthetic_dataset(const std::vector<std::pair<LabelCount, double>>& rows) {
    Dataset ds;
    ds.grid = heatmap_grid(kArea, 0.6); // 4 x 2 cells
    int frame = 0;
    for (const auto& [label, fill] : rows) {
        HeatmapSample s;
        s.values.assign(8, fill);
        s.label = label;
        s.frame = frame++;
        s.run_name = "synthetic";
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

} // namespace

TEST_CASE("frame_positions returns exactly the pedestrians present") {
    const TrajectorySet set = make_run("r", {{1, 0, {0.0, 4.5}, Origin::Left},
                                             {1, 1, {0.1, 4.6}, Origin::Left},
                                             {2, 1, {0.5, 4.8}, Origin::Right}});
    CHECK(frame_positions(set, 5).empty());
    CHECK(frame_positions(set, 0).size() == 1);
    const auto both = frame_positions(set, 1);
    REQUIRE(both.size() == 2);
    CHECK(both[0].second == Origin::Left);
    CHECK(both[1].second == Origin::Right);
}

TEST_CASE("gaussian heatmap: empty sum, kernel peak, mirror symmetry") {
    const DatasetGrid grid = heatmap_grid(kArea, 0.1);
    REQUIRE(grid.nx == 24);
    REQUIRE(grid.ny == 10);
    const double sigma = 0.7;

    const std::vector<PositionedOrigin> none;
    for (const double v : gaussian_heatmap(none, grid, sigma)) CHECK(v == 0.0);

    // one pedestrian exactly at the center of cell (12, 5)
    const Vec2 center{kArea.x0 + 12.5 * 0.1, kArea.y0 + 5.5 * 0.1};
    const std::vector<PositionedOrigin> one{{center, Origin::Left}};
    const auto values = gaussian_heatmap(one, grid, sigma);
    const double expected_peak = 1.0 / (2.0 * M_PI * sigma * sigma);
    CHECK(values[5 * 24 + 12] == doctest::Approx(expected_peak).epsilon(1e-12));

    // mirror-symmetric pair about the vertical midline (x = 0)
    const std::vector<PositionedOrigin> pair{{{-0.45, 4.7}, Origin::Left},
                                             {{0.45, 4.7}, Origin::Right}};
    const auto sym = gaussian_heatmap(pair, grid, sigma);
    for (int iy = 0; iy < grid.ny; ++iy)
        for (int ix = 0; ix < grid.nx; ++ix)
            CHECK(std::abs(sym[iy * 24 + ix] - sym[iy * 24 + (23 - ix)]) <= 1e-12);
}

TEST_CASE("heatmap mass never exceeds the pedestrian count") {
    const DatasetGrid grid = heatmap_grid(kArea, 0.1);
    Rng rng(11);
    std::vector<PositionedOrigin> crowd;
    for (int i = 0; i < 40; ++i)
        crowd.push_back({{rng.uniform(kArea.x0 - 1.0, kArea.x1() + 1.0),
                          rng.uniform(kArea.y0 - 1.0, kArea.y1() + 1.0)},
                         Origin::Left});
    const auto values = gaussian_heatmap(crowd, grid, 0.7);
    double mass = 0.0;
    for (const double v : values) mass += v * 0.1 * 0.1;
    CHECK(mass <= 40.0 + 1e-9);
    CHECK(mass > 0.0);
}

TEST_CASE("heatmaps are translation invariant") {
    const double sigma = 0.7;
    Rng rng(3);
    std::vector<PositionedOrigin> crowd;
    for (int i = 0; i < 10; ++i)
        crowd.push_back({{rng.uniform(kArea.x0, kArea.x1()), rng.uniform(kArea.y0, kArea.y1())},
                         Origin::Right});
    const Vec2 shift{12.5, -3.25}; // exactly representable
    Rect moved = kArea;
    moved.x0 += shift.x;
    moved.y0 += shift.y;
    std::vector<PositionedOrigin> shifted = crowd;
    for (auto& [p, o] : shifted) p = p + shift;
    const auto a = gaussian_heatmap(crowd, heatmap_grid(kArea, 0.1), sigma);
    const auto b = gaussian_heatmap(shifted, heatmap_grid(moved, 0.1), sigma);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(std::abs(a[i] - b[i]) <= 1e-12);
}

TEST_CASE("label_frame counts in-area pedestrians by origin") {
    std::vector<PositionedOrigin> ps{{{0.0, 4.5}, Origin::Left},
                                     {{0.3, 4.6}, Origin::Left},
                                     {{-0.3, 4.9}, Origin::Right},
                                     {{5.0, 5.0}, Origin::Left},     // outside
                                     {{0.1, 4.7}, Origin::Unknown}}; // excluded
    const auto label = label_frame(ps, kArea);
    REQUIRE(label.has_value());
    CHECK(label->n_left == 2);
    CHECK(label->n_right == 1);
    CHECK(label->frac_left() == doctest::Approx(2.0 / 3.0));
    CHECK(label->frac_right() == doctest::Approx(1.0 / 3.0));
    CHECK(label->frac_left() + label->frac_right() == doctest::Approx(1.0).epsilon(1e-15));

    const std::vector<PositionedOrigin> far{{{9.0, 9.0}, Origin::Left}};
    CHECK(!label_frame(far, kArea).has_value());

    const std::vector<PositionedOrigin> balanced{{{0.0, 4.5}, Origin::Left},
                                                 {{0.2, 4.5}, Origin::Right}};
    const auto eq = label_frame(balanced, kArea);
    CHECK(eq->frac_left() == doctest::Approx(0.5));
    CHECK(eq->is_equal_split());
}

TEST_CASE("build_dataset enumerates labeled frames in order with stride") {
    // pedestrians pass through the window over frames 2..8
    TrajectorySet run = make_run("runA", {});
    run.pedestrians[1].origin = Origin::Left;
    for (int f = 2; f <= 8; ++f)
        run.pedestrians[1].samples.push_back({f, {0.0, 4.5}});
    run.pedestrians[2].origin = Origin::Right;
    run.pedestrians[2].samples.push_back({0, {-4.0, 0.5}}); // outside window

    const TrajectorySet runs[] = {run};
    const Dataset all = build_dataset(runs, kArea, 0.1, 0.7, 1, 1);
    CHECK(all.samples.size() == 7);
    for (std::size_t i = 0; i + 1 < all.samples.size(); ++i)
        CHECK(all.samples[i].frame < all.samples[i + 1].frame);

    const Dataset strided = build_dataset(runs, kArea, 0.1, 0.7, 2, 1);
    CHECK(strided.samples.size() == 4); // frames 0,2,4,6,8 -> labeled at 2,4,6,8

    const Dataset empty = build_dataset(std::span<const TrajectorySet>{}, kArea, 0.1, 0.7, 1, 1);
    CHECK(empty.samples.empty());
}

TEST_CASE("dedup keeps first-of-run and drops consecutive identical grids") {
    const LabelCount lab{1, 1};
    // grids A, A, B, A within one run
    Dataset ds = synthetic_dataset({{lab, 1.0}, {lab, 1.0}, {lab, 2.0}, {lab, 1.0}});
    const Dataset out = dedup_consecutive(ds);
    REQUIRE(out.samples.size() == 3);
    CHECK(out.samples[0].values[0] == 1.0);
    CHECK(out.samples[1].values[0] == 2.0);
    CHECK(out.samples[2].values[0] == 1.0);

    // all distinct -> unchanged
    Dataset distinct = synthetic_dataset({{lab, 1.0}, {lab, 2.0}, {lab, 3.0}});
    CHECK(dedup_consecutive(distinct).samples.size() == 3);

    // idempotence
    const Dataset once = dedup_consecutive(ds);
    const Dataset twice = dedup_consecutive(once);
    REQUIRE(twice.samples.size() == once.samples.size());
    for (std::size_t i = 0; i < once.samples.size(); ++i)
        CHECK(twice.samples[i].values == once.samples[i].values);
}

TEST_CASE("dedup treats runs independently") {
    const LabelCount lab{1, 1};
    Dataset ds = synthetic_dataset({{lab, 1.0}, {lab, 1.0}});
    ds.samples[1].run_name = "other-run"; // identical grid, new run: kept
    CHECK(dedup_consecutive(ds).samples.size() == 2);
}

TEST_CASE("rebalance_equal: paper-scale counts and small exact cases") {
    std::vector<std::pair<LabelCount, double>> rows;
    for (int i = 0; i < 1759; ++i) rows.push_back({{2, 2}, static_cast<double>(i)});
    for (int i = 0; i < 100; ++i) rows.push_back({{1, 2}, static_cast<double>(i)});
    Dataset ds = synthetic_dataset(rows);
    const Dataset out = rebalance_equal(ds, 887);
    long n_equal = 0;
    for (const auto& s : out.samples) n_equal += s.label.is_equal_split();
    CHECK(n_equal == 887);
    CHECK(out.samples.size() == 887 + 100);

    // n_equal <= cap -> unchanged
    CHECK(rebalance_equal(out, 887).samples.size() == out.samples.size());

    // cap 0 removes every equal-labeled sample
    const Dataset none = rebalance_equal(ds, 0);
    for (const auto& s : none.samples) CHECK(!s.label.is_equal_split());
    CHECK(none.samples.size() == 100);

    // order among retained samples is preserved
    double prev = -1.0;
    for (const auto& s : out.samples)
        if (s.label.is_equal_split()) {
            CHECK(s.values[0] > prev);
            prev = s.values[0];
        }
}

TEST_CASE("rebalance only touches the exact 50/50 label") {
    std::vector<std::pair<LabelCount, double>> rows;
    for (int i = 0; i < 30; ++i) rows.push_back({{1, 1}, 0.0});
    for (int i = 0; i < 12; ++i) rows.push_back({{3, 1}, 0.0});
    for (int i = 0; i < 7; ++i) rows.push_back({{0, 4}, 0.0});
    const Dataset out = rebalance_equal(synthetic_dataset(rows), 10);
    long eq = 0, left75 = 0, right100 = 0;
    for (const auto& s : out.samples) {
        if (s.label.is_equal_split()) ++eq;
        if (s.label.n_left == 3) ++left75;
        if (s.label.n_left == 0) ++right100;
    }
    CHECK(eq == 10);
    CHECK(left75 == 12);
    CHECK(right100 == 7);
}

TEST_CASE("default cap is the count of the second most frequent label") {
    std::vector<std::pair<LabelCount, double>> rows;
    for (int i = 0; i < 40; ++i) rows.push_back({{1, 1}, 0.0});
    for (int i = 0; i < 25; ++i) rows.push_back({{2, 1}, 0.0});
    for (int i = 0; i < 9; ++i) rows.push_back({{1, 0}, 0.0});
    CHECK(default_equal_cap(synthetic_dataset(rows)) == 25);
}

TEST_CASE("distribution report groups by exact reduced label") {
    Dataset ds = synthetic_dataset({{{1, 1}, 0.0}, {{2, 2}, 0.0}, {{1, 0}, 0.0}, {{1, 3}, 0.0}});
    const auto rows = distribution_report(ds);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].frac_left() == doctest::Approx(0.25)); // 1/4
    CHECK(rows[0].count == 1);
    CHECK(rows[1].frac_left() == doctest::Approx(0.5)); // (1,1) and (2,2) together
    CHECK(rows[1].count == 2);
    CHECK(rows[2].frac_left() == doctest::Approx(1.0));
    CHECK(rows[2].count == 1);
    long total = 0;
    for (const auto& r : rows) total += r.count;
    CHECK(total == static_cast<long>(ds.samples.size()));
    CHECK(distribution_report(Dataset{}).empty());
}

TEST_CASE("dataset file round-trips byte-identically") {
    TrajectorySet run = make_run("bytes", {});
    run.pedestrians[1].origin = Origin::Left;
    run.pedestrians[2].origin = Origin::Right;
    Rng rng(5);
    for (int f = 0; f < 6; ++f) {
        run.pedestrians[1].samples.push_back(
            {f, {rng.uniform(-1.0, 1.0), rng.uniform(4.4, 5.4)}});
        run.pedestrians[2].samples.push_back(
            {f, {rng.uniform(-1.0, 1.0), rng.uniform(4.4, 5.4)}});
    }
    const TrajectorySet runs[] = {run};
    const Dataset ds = build_dataset(runs, kArea, 0.1, 0.7, 1, 1);
    REQUIRE(!ds.samples.empty());

    std::stringstream first;
    write_dataset(first, ds);
    const Dataset back = read_dataset(first);
    std::stringstream second;
    write_dataset(second, back);
    CHECK(first.str() == second.str());
    CHECK(back.grid == ds.grid);
    REQUIRE(back.samples.size() == ds.samples.size());
    CHECK(back.samples[0].values == ds.samples[0].values);
    CHECK(back.samples[0].label.n_left == ds.samples[0].label.n_left);
}

TEST_CASE("dataset reader rejects malformed input") {
    std::istringstream missing("not a dataset\n");
    CHECK_THROWS_AS(read_dataset(missing), ParseError);
    std::istringstream short_row(
        "# heatmap-dataset v1 nx=2 ny=1 h=0.5 area=0,0,1,0.5\nrun,0,Simulated,1,1,0.25\n");
    CHECK_THROWS_AS(read_dataset(short_row), ParseError);
}
