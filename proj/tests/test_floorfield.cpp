#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "tjflow/errors.hpp"
#include "tjflow/floorfield.hpp"

using namespace tjflow;
using namespace tjflow::testing;

TEST_CASE("obstacle density: open space, interior, wall-normal monotonicity") {
    const Scenario s = banded_box_scenario(8.0, 3.0);
    const GridField rho = obstacle_density(s, 0.1, 0.5);

    auto value_at = [&](double x, double y) {
        const int ix = static_cast<int>((x - rho.x0) / rho.h);
        const int iy = static_cast<int>((y - rho.y0) / rho.h);
        return rho.at(ix, iy);
    };

    // > 3 sigma from the band and from the domain edge
    CHECK(value_at(4.0, 5.55) == doctest::Approx(0.0).epsilon(1e-12));
    // deep inside the band
    CHECK(value_at(4.0, 1.05) == doctest::Approx(1.0).epsilon(1e-9));
    // everything in [0, 1]
    for (const double v : rho.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + 1e-12);
    }
    // non-increasing along the wall normal
    double prev = 2.0;
    for (double y = 3.05; y < 6.0; y += 0.1) {
        const double v = value_at(4.0, y);
        CHECK(v <= prev + 1e-12);
        prev = v;
    }
}

TEST_CASE("travel time in an empty corridor matches distance to the target") {
    const Scenario s = corridor_scenario(2.0, 10.0);
    const double h = 0.1;
    const GridField T = travel_time_field(s, 0.0, h);
    double worst = 0.0;
    for (int iy = 0; iy < T.ny; ++iy)
        for (int ix = 0; ix < T.nx; ++ix) {
            if (std::isinf(T.at(ix, iy))) continue;
            const Vec2 c = T.cell_center(ix, iy);
            const double analytic = dist_point_segment(c, s.target);
            worst = std::max(worst, std::abs(T.at(ix, iy) - analytic));
        }
    CHECK(worst <= 2.0 * h);
}

TEST_CASE("T = 0 exactly on target cells, positive elsewhere") {
    const Scenario s = corridor_scenario();
    const GridField T = travel_time_field(s, 0.3, 0.1);
    int target_cells = 0;
    for (int iy = 0; iy < T.ny; ++iy)
        for (int ix = 0; ix < T.nx; ++ix) {
            const Vec2 c = T.cell_center(ix, iy);
            if (!s.walkable(c)) continue;
            if (dist_point_segment(c, s.target) <= T.h / 2.0 + 1e-12) {
                CHECK(T.at(ix, iy) == 0.0);
                ++target_cells;
            } else {
                CHECK(T.at(ix, iy) > 0.0);
            }
        }
    CHECK(target_cells >= 1);
}

TEST_CASE("dijkstra oracle reproduces hand-computed grid distances") {
    const Scenario s = corner_target_box();
    const double h = 0.1;
    const GridField T = dijkstra_oracle(s, 0.0, h);
    const double d = std::sqrt(2.0) - 1.0;
    CHECK(T.at(0, 0) == doctest::Approx(0.0));
    CHECK(T.at(1, 0) == doctest::Approx(h));              // one straight edge
    CHECK(T.at(1, 1) == doctest::Approx(h * std::sqrt(2.0)));
    CHECK(T.at(3, 4) == doctest::Approx(h * (4.0 + d * 3.0)));
    CHECK(T.at(9, 9) == doctest::Approx(h * 9.0 * std::sqrt(2.0)));
}

TEST_CASE("unreachable pocket stays at +infinity in both solvers") {
    const Scenario s = pocket_scenario();
    const GridField Tf = travel_time_field(s, 0.0, 0.1);
    const GridField Td = dijkstra_oracle(s, 0.0, 0.1);
    const Vec2 probe{2.5, 0.55};
    CHECK(std::isinf(bilinear_sample(Tf, probe)));
    CHECK(std::isinf(bilinear_sample(Td, probe)));
    const Vec2 reachable{0.55, 0.55};
    CHECK(std::isfinite(bilinear_sample(Tf, reachable)));
}

TEST_CASE("fmm and dijkstra agree on the axis-dominated corridor") {
    const Scenario s = corridor_scenario(1.0, 8.0);
    for (const double w_obs : {0.0, 0.3}) {
        const GridField Tf = travel_time_field(s, w_obs, 0.1);
        const GridField Td = dijkstra_oracle(s, w_obs, 0.1);
        double worst = 0.0;
        for (std::size_t i = 0; i < Tf.values.size(); ++i) {
            if (std::isinf(Tf.values[i]) || std::isinf(Td.values[i])) {
                CHECK(std::isinf(Tf.values[i]) == std::isinf(Td.values[i]));
                continue;
            }
            worst = std::max(worst, std::abs(Tf.values[i] - Td.values[i]));
        }
        CHECK(worst <= 2.0 * 0.1);
    }
}

TEST_CASE("increasing w_obs never decreases travel time") {
    const Scenario s = build_tjunction(preset_by_name("240-120-240"));
    const GridField T0 = travel_time_field(s, 0.0, 0.1);
    const GridField T3 = travel_time_field(s, 0.3, 0.1);
    const GridField T9 = travel_time_field(s, 0.9, 0.1);
    for (std::size_t i = 0; i < T0.values.size(); ++i) {
        if (std::isinf(T0.values[i])) continue;
        CHECK(T3.values[i] >= T0.values[i] - 1e-9);
        CHECK(T9.values[i] >= T3.values[i] - 1e-9);
    }
}

TEST_CASE("greedy descent on T reaches the target without local minima") {
    const Scenario s = build_tjunction(preset_by_name("240-100-240"));
    const GridField T = travel_time_field(s, 0.3, 0.1);
    std::mt19937 pick(7);
    const int dx4[] = {1, -1, 0, 0}, dy4[] = {0, 0, 1, -1};
    int tested = 0;
    while (tested < 25) {
        int ix = static_cast<int>(pick() % T.nx);
        int iy = static_cast<int>(pick() % T.ny);
        if (std::isinf(T.at(ix, iy))) continue;
        ++tested;
        long steps = 0;
        const long max_steps = 4L * (T.nx + T.ny);
        while (T.at(ix, iy) > 2.0 * T.h && steps < max_steps) {
            int bx = ix, by = iy;
            double best = T.at(ix, iy);
            for (int k = 0; k < 4; ++k) {
                const int jx = ix + dx4[k], jy = iy + dy4[k];
                if (jx < 0 || jx >= T.nx || jy < 0 || jy >= T.ny) continue;
                if (T.at(jx, jy) < best) {
                    best = T.at(jx, jy);
                    bx = jx;
                    by = jy;
                }
            }
            REQUIRE_MESSAGE((bx != ix || by != iy), "stuck in a local minimum");
            ix = bx;
            iy = by;
            ++steps;
        }
        CHECK(steps < max_steps);
    }
}

TEST_CASE("bilinear sampling: identity, linearity, constants, errors") {
    GridField f(0.0, 0.0, 1.0, 3, 3);
    for (int iy = 0; iy < 3; ++iy)
        for (int ix = 0; ix < 3; ++ix) f.at(ix, iy) = ix * 10.0 + iy;

    CHECK(bilinear_sample(f, f.cell_center(1, 1)) == doctest::Approx(11.0));
    // midpoint of two cells with values 1 and 3
    GridField g(0.0, 0.0, 1.0, 2, 1);
    g.at(0, 0) = 1.0;
    g.at(1, 0) = 3.0;
    CHECK(bilinear_sample(g, {1.0, 0.5}) == doctest::Approx(2.0));

    GridField c(0.0, 0.0, 0.5, 4, 4, 7.5);
    for (double x = 0.01; x < 2.0; x += 0.37)
        CHECK(bilinear_sample(c, {x, 1.9 - x * 0.6}) == doctest::Approx(7.5));

    CHECK_THROWS_AS(bilinear_sample(f, {-0.5, 0.5}), ValidationError);
    f.at(2, 2) = kInf;
    CHECK(std::isinf(bilinear_sample(f, {2.2, 2.2})));
}

TEST_CASE("obstacle distance matches brute force on a small scenario") {
    const Scenario s = pocket_scenario();
    const double h = 0.1;
    const GridField d = obstacle_distance(s, h);
    const auto mask = obstacle_mask(s, d);
    for (int iy = 0; iy < d.ny; ++iy)
        for (int ix = 0; ix < d.nx; ++ix) {
            double best = 1e30;
            for (int jy = 0; jy < d.ny; ++jy)
                for (int jx = 0; jx < d.nx; ++jx)
                    if (mask[d.idx(jx, jy)])
                        best = std::min(best, dist(d.cell_center(ix, iy), d.cell_center(jx, jy)));
            CHECK(d.at(ix, iy) == doctest::Approx(best).epsilon(1e-9));
        }
}

TEST_CASE("grid csv round-trips") {
    const Scenario s = pocket_scenario();
    const GridField T = travel_time_field(s, 0.0, 0.1);
    std::stringstream buf;
    write_grid_csv(buf, T);
    const GridField back = read_grid_csv(buf);
    REQUIRE(back.values.size() == T.values.size());
    for (std::size_t i = 0; i < T.values.size(); ++i) {
        if (std::isinf(T.values[i]))
            CHECK(std::isinf(back.values[i]));
        else
            CHECK(back.values[i] == T.values[i]);
    }
}
