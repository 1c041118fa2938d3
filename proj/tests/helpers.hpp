#pragma once

// Hand-built micro scenarios shared by the unit tests.

#include "tjflow/scenario.hpp"

namespace tjflow::testing {

/// Straight corridor, walkable [0,w] x [0,L], target across the top.
inline Scenario corridor_scenario(double w = 2.0, double L = 10.0) {
    const double t = 0.3;
    Scenario s;
    s.bounds = {-t, -t, w + 2 * t, L + 2 * t};
    s.obstacles.push_back(rect_polygon({-t, -t, t, L + 2 * t}));
    s.obstacles.push_back(rect_polygon({w, -t, t, L + 2 * t}));
    s.obstacles.push_back(rect_polygon({-t, -t, w + 2 * t, t}));
    s.obstacles.push_back(rect_polygon({-t, L, w + 2 * t, t}));
    s.target = {{0.0, L}, {w, L}};
    s.origin_left = {0.1, 0.1, w / 2 - 0.2, 1.0};
    s.origin_right = {w / 2 + 0.1, 0.1, w / 2 - 0.2, 1.0};
    s.observation_area = {0.0, L - 1.0, w, 1.0};
    s.measurement_areas = {Rect{0, 2, w, 2}, Rect{0, 4, w, 2}, Rect{0, 6, w, 2}};
    return s;
}

/// Open box [0,size]^2 with a solid wall band over y in [0, band].
inline Scenario banded_box_scenario(double size = 8.0, double band = 3.0) {
    Scenario s;
    s.bounds = {0.0, 0.0, size, size};
    s.obstacles.push_back(rect_polygon({0.0, 0.0, size, band}));
    s.target = {{0.1, size - 0.05}, {0.3, size - 0.05}};
    return s;
}

/// Empty unit box with a near-point target at the lower-left cell center,
/// for hand-checked grid-distance values.
inline Scenario corner_target_box() {
    Scenario s;
    s.bounds = {0.0, 0.0, 1.0, 1.0};
    s.target = {{0.05, 0.05}, {0.0501, 0.05}};
    return s;
}

/// Two chambers split by a full wall; the right one is unreachable.
inline Scenario pocket_scenario() {
    Scenario s;
    s.bounds = {0.0, 0.0, 3.0, 1.0};
    s.obstacles.push_back(rect_polygon({1.4, 0.0, 0.2, 1.0}));
    s.target = {{0.0, 0.45}, {0.1, 0.45}};
    return s;
}

} // namespace tjflow::testing
