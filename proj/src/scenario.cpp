#include "tjflow/scenario.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "tjflow/errors.hpp"
#include "tjflow/text.hpp"

namespace tjflow {

bool Scenario::walkable(Vec2 p) const {
    if (!bounds.contains(p)) return false;
    for (const Polygon& poly : obstacles)
        if (point_in_polygon(poly, p)) return false;
    return true;
}

namespace {

void require_positive(double v, const char* field) {
    if (!(v > 0.0)) throw ValidationError(std::string(field) + " must be positive");
}

Polygon mirror_x(const Polygon& poly) {
    Polygon m = poly;
    for (Vec2& v : m) v.x = -v.x;
    return m;
}

Rect mirror_x(const Rect& r) { return {-r.x1(), r.y0, r.w, r.h}; }

} // namespace

void validate(const ScenarioConfig& c) {
    require_positive(c.b_entrance, "b_entrance");
    require_positive(c.b_cor, "b_cor");
    require_positive(c.b_exit, "b_exit");
    require_positive(c.arm_length, "arm_length");
    require_positive(c.exit_length, "exit_length");
    require_positive(c.waiting_depth, "waiting_depth");
    require_positive(c.waiting_width, "waiting_width");
    require_positive(c.funnel_length, "funnel_length");
    require_positive(c.obs_area_depth, "obs_area_depth");
    require_positive(c.meas_area_depth, "meas_area_depth");
    require_positive(c.wall_thickness, "wall_thickness");
    if (c.obs_area_depth > c.exit_length)
        throw ValidationError("obs_area_depth must not exceed exit_length");
    if (c.b_entrance > c.waiting_width)
        throw ValidationError("b_entrance must not exceed waiting_width");
    if (c.split_left < 0.0 || c.split_left > 1.0)
        throw ValidationError("split_left must lie in [0, 1]");
    if (c.agent_count < 0)
        throw ValidationError("agent_count must be non-negative");
}

Scenario build_tjunction(const ScenarioConfig& c) {
    validate(c);
    Scenario s;
    s.config = c;

    const double t = c.wall_thickness;
    const double xj = c.b_exit / 2.0;          // junction half-width
    const double yc = c.b_cor / 2.0;           // arm centerline
    const double x_arm = -xj - c.arm_length;   // arm outer end = funnel inner end
    const double x_door = x_arm - c.funnel_length; // waiting-area entrance plane
    const double x_pen = x_door - c.waiting_depth; // waiting-area back
    const double y_target = c.b_cor + c.exit_length;
    const double pen_lo = yc - c.waiting_width / 2.0;
    const double pen_hi = yc + c.waiting_width / 2.0;

    const double y_bot = std::min({pen_lo, 0.0, yc - c.b_entrance / 2.0}) - t;
    const double y_top = std::max({pen_hi, y_target, yc + c.b_entrance / 2.0}) + t;
    s.bounds = {x_pen - t, y_bot, 2.0 * (t - x_pen), y_top - y_bot};

    // Walls fill the whole complement of the walkable union (pens, funnels,
    // arms, junction, exit corridor) so that "not inside an obstacle" means
    // "inside the corridor system".
    auto block = [](double ax, double ay, double bx, double by) -> Polygon {
        return {{ax, ay}, {bx, ay}, {bx, by}, {ax, by}};
    };
    std::vector<Polygon> left;
    left.push_back(block(x_pen - t, y_bot, x_pen, y_top));          // pen back wall
    left.push_back(block(x_pen - t, pen_hi, x_door, y_top));        // above pen
    left.push_back(block(x_pen - t, y_bot, x_door, pen_lo));        // below pen
    // Funnel shoulders taper from the entrance aperture to the corridor.
    left.push_back({{x_door, yc + c.b_entrance / 2.0}, {x_arm, c.b_cor},
                    {x_arm, y_top}, {x_door, y_top}});
    left.push_back({{x_door, yc - c.b_entrance / 2.0}, {x_arm, 0.0},
                    {x_arm, y_bot}, {x_door, y_bot}});
    left.push_back(block(x_arm, c.b_cor, -xj, y_top));              // above arm
    for (const Polygon& poly : left) {
        s.obstacles.push_back(poly);
        s.obstacles.push_back(mirror_x(poly));
    }
    s.obstacles.push_back(block(x_arm, y_bot, -x_arm, 0.0));        // below arms + junction
    s.obstacles.push_back(block(-xj, y_target, xj, y_top));         // behind target

    s.origin_left = {x_pen, pen_lo, c.waiting_depth, c.waiting_width};
    s.origin_right = mirror_x(s.origin_left);
    s.target = {{-xj, y_target}, {xj, y_target}};

    const double md = std::min(c.meas_area_depth, c.arm_length);
    s.measurement_areas[0] = {-xj - md, 0.0, md, c.b_cor};
    s.measurement_areas[1] = mirror_x(s.measurement_areas[0]);
    s.measurement_areas[2] = {-xj, c.b_cor, c.b_exit,
                              std::min(c.meas_area_depth, c.exit_length)};

    s.observation_area = {-xj, y_target - c.obs_area_depth, c.b_exit, c.obs_area_depth};
    return s;
}

std::vector<ScenarioConfig> scenario_presets(bool middle_is_entrance) {
    const double widths[] = {0.5, 0.6, 0.8, 1.0, 1.2, 1.5, 2.4};
    const char* names[] = {"240-50-240",  "240-60-240",  "240-80-240",
                           "240-100-240", "240-120-240", "240-150-240",
                           "240-240-240"};
    std::vector<ScenarioConfig> presets;
    for (int i = 0; i < 7; ++i) {
        ScenarioConfig c;
        c.name = names[i];
        if (middle_is_entrance)
            c.b_entrance = widths[i];
        else
            c.b_cor = widths[i];
        presets.push_back(c);
    }
    return presets;
}

ScenarioConfig preset_by_name(const std::string& name, bool middle_is_entrance) {
    for (ScenarioConfig& c : scenario_presets(middle_is_entrance))
        if (c.name == name) return c;
    throw ValidationError("unknown preset '" + name + "'");
}

namespace {

using nlohmann::json;

json rect_json(const Rect& r) {
    return json{{"x0", r.x0}, {"y0", r.y0}, {"w", r.w}, {"h", r.h}};
}

} // namespace

ScenarioConfig read_scenario_config(std::istream& in) {
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("scenario config: ") + e.what());
    }
    ScenarioConfig c;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) j.at(key).get_to(field);
    };
    get("name", c.name);
    get("b_entrance", c.b_entrance);
    get("b_cor", c.b_cor);
    get("b_exit", c.b_exit);
    get("arm_length", c.arm_length);
    get("exit_length", c.exit_length);
    get("waiting_depth", c.waiting_depth);
    get("waiting_width", c.waiting_width);
    get("funnel_length", c.funnel_length);
    get("obs_area_depth", c.obs_area_depth);
    get("meas_area_depth", c.meas_area_depth);
    get("wall_thickness", c.wall_thickness);
    get("agent_count", c.agent_count);
    get("split_left", c.split_left);
    get("seed", c.seed);
    validate(c);
    return c;
}

void write_scenario_config(std::ostream& out, const ScenarioConfig& c) {
    json j{{"name", c.name},
           {"b_entrance", c.b_entrance},
           {"b_cor", c.b_cor},
           {"b_exit", c.b_exit},
           {"arm_length", c.arm_length},
           {"exit_length", c.exit_length},
           {"waiting_depth", c.waiting_depth},
           {"waiting_width", c.waiting_width},
           {"funnel_length", c.funnel_length},
           {"obs_area_depth", c.obs_area_depth},
           {"meas_area_depth", c.meas_area_depth},
           {"wall_thickness", c.wall_thickness},
           {"agent_count", c.agent_count},
           {"split_left", c.split_left},
           {"seed", c.seed}};
    out << j.dump(2) << '\n';
}

void write_scenario_geometry(std::ostream& out, const Scenario& s) {
    json obstacles = json::array();
    for (const Polygon& poly : s.obstacles) {
        json pts = json::array();
        for (const Vec2& v : poly) pts.push_back(json::array({v.x, v.y}));
        obstacles.push_back(pts);
    }
    json j{{"format", "tjflow-geometry-v1"},
           {"name", s.config.name},
           {"bounds", rect_json(s.bounds)},
           {"obstacles", obstacles},
           {"origin_left", rect_json(s.origin_left)},
           {"origin_right", rect_json(s.origin_right)},
           {"target", json::array({json::array({s.target.a.x, s.target.a.y}),
                                   json::array({s.target.b.x, s.target.b.y})})},
           {"measurement_areas",
            json::array({rect_json(s.measurement_areas[0]),
                         rect_json(s.measurement_areas[1]),
                         rect_json(s.measurement_areas[2])})},
           {"observation_area", rect_json(s.observation_area)}};
    out << j.dump(2) << '\n';
}

} // namespace tjflow
