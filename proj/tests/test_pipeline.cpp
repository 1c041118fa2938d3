#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "tjflow/errors.hpp"
#include "tjflow/pipeline.hpp"
#include "tjflow/rng.hpp"

using namespace tjflow;

namespace {

/// Tiny synthetic dataset whose left-fraction is recoverable from the
/// two-cell feature grid.
Dataset toy_dataset(long n, std::uint64_t seed, double h = 0.5) {
    Dataset ds;
    ds.grid = heatmap_grid(Rect{0.0, 0.0, 1.0, 0.5}, h); // 2 x 1 cells
    Rng rng(seed);
    for (long i = 0; i < n; ++i) {
        HeatmapSample s;
        const long total = 1 + static_cast<long>(rng.uniform_index(6));
        const long left = static_cast<long>(rng.uniform_index(total + 1));
        s.label = {left, total - left};
        s.frame = static_cast<int>(i);
        s.run_name = "toy" + std::to_string(i % 3);
        const double noise = rng.uniform(-0.02, 0.02);
        s.values = {static_cast<double>(left) + noise, static_cast<double>(total - left) - noise};
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

OriginModels leaf_models(double left_value, double right_value) {
    OriginModels m;
    m.left.n_features = 2;
    m.right.n_features = 2;
    Tree tl;
    tl.nodes.push_back({-1, 0.0, -1, -1, left_value});
    m.left.trees.push_back(tl);
    Tree tr;
    tr.nodes.push_back({-1, 0.0, -1, -1, right_value});
    m.right.trees.push_back(tr);
    return m;
}

} // namespace

TEST_CASE("shuffle_split: sizes, partition, determinism") {
    const Dataset ds = toy_dataset(10, 1);
    const SplitResult split = shuffle_split(ds, 0.8, 42);
    CHECK(split.train.samples.size() == 8);
    CHECK(split.test.samples.size() == 2);

    std::multiset<int> seen;
    for (const auto& s : split.train.samples) seen.insert(s.frame);
    for (const auto& s : split.test.samples) seen.insert(s.frame);
    CHECK(seen.size() == 10);
    CHECK(*seen.begin() == 0);
    CHECK(*seen.rbegin() == 9);

    const SplitResult again = shuffle_split(ds, 0.8, 42);
    for (std::size_t i = 0; i < split.train.samples.size(); ++i)
        CHECK(again.train.samples[i].frame == split.train.samples[i].frame);

    const SplitResult other = shuffle_split(ds, 0.8, 43);
    bool any_diff = false;
    for (std::size_t i = 0; i < split.train.samples.size(); ++i)
        any_diff |= other.train.samples[i].frame != split.train.samples[i].frame;
    CHECK(any_diff);

    CHECK_THROWS_AS(shuffle_split(toy_dataset(4, 2), 0.8, 1), ValidationError);
}

TEST_CASE("train_origin_models: constant target, complementarity, empty input") {
    // frac_left identically 1
    Dataset ones = toy_dataset(30, 3);
    for (auto& s : ones.samples) s.label = {3, 0};
    ForestParams p;
    p.n_trees = 5;
    p.seed = 7;
    const OriginModels m = train_origin_models(ones, p);
    for (const auto& s : ones.samples)
        CHECK(m.left.predict(s.values) == doctest::Approx(100.0));

    // single-tree, full-feature, duplicate-free: exact complementarity on
    // the training inputs
    const Dataset toy = toy_dataset(50, 4);
    ForestParams exact;
    exact.n_trees = 1;
    exact.mtry = 2;
    exact.min_leaf = 1;
    exact.seed = 11;
    const OriginModels em = train_origin_models(toy, exact);
    for (const auto& s : toy.samples) {
        const double sum = em.left.predict(s.values) + em.right.predict(s.values);
        CHECK(sum == doctest::Approx(100.0).epsilon(1e-9));
    }

    CHECK_THROWS_AS(train_origin_models(Dataset{}, p), ValidationError);
}

TEST_CASE("predict_distribution: scaling, zero fallback, clamping") {
    const std::vector<double> x{1.0, 1.0};
    auto check_pair = [&](double rl, double rr, double el, double er) {
        const auto [pl, pr] = predict_distribution(leaf_models(rl, rr), x);
        CHECK(pl == doctest::Approx(el));
        CHECK(pr == doctest::Approx(er));
    };
    check_pair(30.0, 90.0, 25.0, 75.0);
    check_pair(0.0, 0.0, 50.0, 50.0);
    check_pair(-10.0, 50.0, 0.0, 100.0);

    CHECK_THROWS_AS(predict_distribution(leaf_models(1, 1), std::vector<double>{1.0}),
                    ValidationError);
}

TEST_CASE("normalization property: 1e4 random raw pairs") {
    Rng rng(17);
    for (int k = 0; k < 10000; ++k) {
        const double rl = rng.uniform(-150.0, 250.0);
        const double rr = rng.uniform(-150.0, 250.0);
        const auto [pl, pr] = predict_distribution(leaf_models(rl, rr),
                                                   std::vector<double>{0.0, 0.0});
        CHECK(std::abs(pl + pr - 100.0) <= 1e-9);
        CHECK(pl >= 0.0);
        CHECK(pl <= 100.0);
        CHECK(pr >= 0.0);
        CHECK(pr <= 100.0);
    }
}

TEST_CASE("relative error: metric examples and properties") {
    CHECK(kMaxEuclideanError == doctest::Approx(141.4214).epsilon(1e-6));
    CHECK(relative_error({42.0, 58.0}, {42.0, 58.0}) == doctest::Approx(0.0));
    CHECK(relative_error({100.0, 0.0}, {0.0, 100.0}) == doctest::Approx(100.0));
    CHECK(relative_error({100.0, 0.0}, {50.0, 50.0}) == doctest::Approx(50.0));
    // symmetry and range
    Rng rng(23);
    for (int k = 0; k < 300; ++k) {
        const double a = rng.uniform(0.0, 100.0);
        const double b = rng.uniform(0.0, 100.0);
        const std::pair<double, double> y{a, 100.0 - a}, z{b, 100.0 - b};
        CHECK(relative_error(y, z) == doctest::Approx(relative_error(z, y)));
        CHECK(relative_error(y, z) >= 0.0);
        CHECK(relative_error(y, z) <= 100.0);
    }
}

TEST_CASE("run_experiment: shape, determinism, split discipline") {
    const Dataset ds = toy_dataset(120, 5);
    ForestParams p;
    p.n_trees = 8;
    const EvalReport rep = run_experiment(EvalMode::Sim, ds, ds, 5, 100, p);
    REQUIRE(rep.runs.size() == 5);
    for (std::size_t r = 0; r < rep.runs.size(); ++r) {
        CHECK(rep.runs[r].seed == 100 + r);
        CHECK(rep.runs[r].n_train == 96);
        CHECK(rep.runs[r].n_test == 24);
        CHECK(rep.runs[r].mean_error >= 0.0);
        CHECK(rep.runs[r].mean_error <= 100.0);
        CHECK(rep.runs[r].stdev_error >= 0.0);
    }
    const EvalReport rep2 = run_experiment(EvalMode::Sim, ds, ds, 5, 100, p);
    for (std::size_t r = 0; r < rep.runs.size(); ++r) {
        CHECK(rep.runs[r].mean_error == rep2.runs[r].mean_error);
        CHECK(rep.runs[r].stdev_error == rep2.runs[r].stdev_error);
    }

    // test and train sets of one run never share a sample
    const SplitResult split = shuffle_split(ds, 0.8, 100);
    std::set<int> train_frames, test_frames;
    for (const auto& s : split.train.samples) train_frames.insert(s.frame);
    for (const auto& s : split.test.samples) test_frames.insert(s.frame);
    for (const int f : test_frames) CHECK(!train_frames.contains(f));
}

TEST_CASE("run_experiment: hybrid tests on the full experimental set") {
    const Dataset sim = toy_dataset(100, 6);
    const Dataset exp = toy_dataset(40, 7);
    ForestParams p;
    p.n_trees = 5;
    const EvalReport rep = run_experiment(EvalMode::Hybrid, sim, exp, 3, 9, p);
    for (const auto& r : rep.runs) {
        CHECK(r.n_train == 80);
        CHECK(r.n_test == 40);
    }

    Dataset mismatched = exp;
    mismatched.grid.nx = 7;
    CHECK_THROWS_AS(run_experiment(EvalMode::Hybrid, sim, mismatched, 3, 9, p),
                    ValidationError);
}

TEST_CASE("report csv and table round-trip") {
    const Dataset ds = toy_dataset(60, 8);
    ForestParams p;
    p.n_trees = 4;
    const EvalReport rep = run_experiment(EvalMode::Exp, ds, ds, 2, 55, p);
    std::stringstream csv;
    write_report_csv(csv, rep);
    const EvalReport back = read_report_csv(csv);
    CHECK(back.mode == EvalMode::Exp);
    REQUIRE(back.runs.size() == 2);
    CHECK(back.runs[0].mean_error == rep.runs[0].mean_error);
    CHECK(back.runs[1].oob_r2_right == rep.runs[1].oob_r2_right);

    const std::string table = format_report_table(rep);
    CHECK(table.find("Mean Euclidean error") != std::string::npos);
    CHECK(table.find("Stdev Euclidean error") != std::string::npos);
    CHECK(table.find("Run 2") != std::string::npos);

    CHECK(eval_mode_from_name("hybrid") == EvalMode::Hybrid);
    CHECK_THROWS_AS(eval_mode_from_name("bogus"), ValidationError);
}
