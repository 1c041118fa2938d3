#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tjflow/geometry.hpp"

namespace tjflow {

/// Parameters of the T-junction family. The canonical scenario names
/// "240-50-240" etc. encode (entrance, corridor, exit) widths in cm; the
/// middle number is the bottleneck corridor width. The alternative reading
/// of the names (middle number = entrance width) can be selected when
/// generating presets.
struct ScenarioConfig {
    std::string name = "custom";
    double b_entrance = 2.4;     // waiting-area entrance width [m]
    double b_cor = 2.4;          // arm corridor width [m]
    double b_exit = 2.4;         // exit corridor width [m]
    double arm_length = 4.5;     // [m]
    double exit_length = 3.0;    // [m]
    double waiting_depth = 10.0; // waiting-area extent away from the entrance [m]
    double waiting_width = 15.0; // waiting-area extent across the entrance [m]
    double funnel_length = 1.0;  // taper between entrance and corridor [m]
    double obs_area_depth = 1.0; // observation area depth, 1.0 or 2.0 [m]
    double meas_area_depth = 2.0;// measurement area depth [m]
    double wall_thickness = 0.3; // [m]
    int agent_count = 300;
    double split_left = 0.5;     // fraction of agents spawned on the left
    std::uint64_t seed = 1;
};

struct Scenario {
    ScenarioConfig config;
    std::vector<Polygon> obstacles;       // wall blocks, fill everything non-walkable
    Rect origin_left;                     // waiting areas
    Rect origin_right;
    Segment target;                       // destination line at the exit end
    std::array<Rect, 3> measurement_areas;// 0 = left arm, 1 = right arm, 2 = exit
    Rect observation_area;                // feature/label window, abuts the target
    Rect bounds;

    /// Inside bounds and not inside any obstacle polygon.
    bool walkable(Vec2 p) const;
};

/// Throws ValidationError naming the offending field.
void validate(const ScenarioConfig& config);

/// Deterministic construction: identical configs give bitwise-identical
/// scenarios. Geometry convention: junction centered at x = 0, arms along
/// +-x at y in [0, b_cor], exit corridor along +y toward the target.
Scenario build_tjunction(const ScenarioConfig& config);

/// The seven canonical configurations, entrance/exit 2.4 m and corridor
/// width in {0.5, 0.6, 0.8, 1.0, 1.2, 1.5, 2.4} m. With
/// middle_is_entrance the middle number is applied to the entrance width
/// instead (the reading used by some figure captions).
std::vector<ScenarioConfig> scenario_presets(bool middle_is_entrance = false);

/// Preset lookup by name ("240-50-240"); throws ValidationError if unknown.
ScenarioConfig preset_by_name(const std::string& name, bool middle_is_entrance = false);

/// Config file: JSON object whose keys are exactly the field names above.
ScenarioConfig read_scenario_config(std::istream& in);
void write_scenario_config(std::ostream& out, const ScenarioConfig& config);

/// Geometry export for plotting: obstacles, areas, target, bounds.
void write_scenario_geometry(std::ostream& out, const Scenario& scenario);

} // namespace tjflow
