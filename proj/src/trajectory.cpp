#include "tjflow/trajectory.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "tjflow/errors.hpp"
#include "tjflow/text.hpp"

namespace tjflow {

const char* origin_name(Origin o) {
    switch (o) {
        case Origin::Left: return "Left";
        case Origin::Right: return "Right";
        default: return "Unknown";
    }
}

Origin origin_from_name(const std::string& name) {
    if (name == "Left") return Origin::Left;
    if (name == "Right") return Origin::Right;
    if (name == "Unknown") return Origin::Unknown;
    throw ValidationError("unknown origin '" + name + "'");
}

const char* source_name(TrajSource s) {
    return s == TrajSource::Simulated ? "Simulated" : "Experimental";
}

TrajSource source_from_name(const std::string& name) {
    if (name == "Simulated") return TrajSource::Simulated;
    if (name == "Experimental") return TrajSource::Experimental;
    throw ValidationError("unknown source '" + name + "'");
}

int TrajectorySet::min_frame() const {
    int m = 0;
    bool first = true;
    for (const auto& [id, ped] : pedestrians) {
        if (ped.samples.empty()) continue;
        const int f = ped.samples.front().frame;
        m = first ? f : std::min(m, f);
        first = false;
    }
    return first ? 0 : m;
}

int TrajectorySet::max_frame() const {
    int m = -1;
    for (const auto& [id, ped] : pedestrians)
        if (!ped.samples.empty()) m = std::max(m, ped.samples.back().frame);
    return m;
}

std::size_t TrajectorySet::sample_count() const {
    std::size_t n = 0;
    for (const auto& [id, ped] : pedestrians) n += ped.samples.size();
    return n;
}

TrajectorySet parse_trajectories(std::istream& in, Units units, double fps) {
    if (!(fps > 0.0)) throw ValidationError("fps must be positive");
    TrajectorySet set;
    set.fps = fps;
    const double scale = units == Units::cm ? 0.01 : 1.0;

    std::string line;
    long line_no = 0;
    std::vector<std::string_view> fields;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        fields.clear();
        while (!sv.empty()) {
            const std::size_t ws = sv.find_first_of(" \t");
            fields.push_back(sv.substr(0, ws));
            if (ws == std::string_view::npos) break;
            sv.remove_prefix(ws);
            sv = trim(sv);
        }
        if (fields.size() < 4)
            throw ParseError("expected `id frame x y [z]`, got " +
                                 std::to_string(fields.size()) + " fields",
                             line_no);
        const long long id = parse_int(fields[0], line_no);
        const long long frame = parse_int(fields[1], line_no);
        const double x = parse_double(fields[2], line_no) * scale;
        const double y = parse_double(fields[3], line_no) * scale;
        if (!std::isfinite(x) || !std::isfinite(y))
            throw ParseError("non-finite coordinate", line_no);
        Pedestrian& ped = set.pedestrians[static_cast<int>(id)];
        if (!ped.samples.empty() && frame <= ped.samples.back().frame)
            throw ParseError("non-monotone frame " + std::to_string(frame) +
                                 " for pedestrian " + std::to_string(id),
                             line_no);
        ped.samples.push_back({static_cast<int>(frame), {x, y}});
    }
    return set;
}

TrajectorySet assign_origins(const TrajectorySet& trajset, const Scenario&,
                             double epsilon_x) {
    return assign_origins(trajset, epsilon_x);
}

TrajectorySet assign_origins(const TrajectorySet& trajset, double epsilon_x) {
    TrajectorySet out = trajset;
    for (auto& [id, ped] : out.pedestrians) {
        if (ped.samples.empty()) continue;
        const double x = ped.samples.front().position.x;
        if (x < -epsilon_x)
            ped.origin = Origin::Left;
        else if (x > epsilon_x)
            ped.origin = Origin::Right;
        else
            ped.origin = Origin::Unknown;
    }
    return out;
}

TrajectorySet translated(const TrajectorySet& trajset, Vec2 shift) {
    TrajectorySet out = trajset;
    for (auto& [id, ped] : out.pedestrians)
        for (TrajectorySample& s : ped.samples) s.position = s.position + shift;
    return out;
}

void write_trajectories(std::ostream& out, const TrajectorySet& set) {
    out << "# id frame x y (units=m)\n";
    for (const auto& [id, ped] : set.pedestrians)
        for (const TrajectorySample& s : ped.samples)
            out << id << ' ' << s.frame << ' ' << format_double(s.position.x) << ' '
                << format_double(s.position.y) << '\n';
}

void write_trajectory_meta(std::ostream& out, const TrajectorySet& set,
                           const TrajectoryMeta& meta) {
    nlohmann::json origins = nlohmann::json::object();
    for (const auto& [id, ped] : set.pedestrians)
        origins[std::to_string(id)] = origin_name(ped.origin);
    nlohmann::json j{{"format", "tjflow-trajectory-meta-v1"},
                     {"name", set.name},
                     {"fps", set.fps},
                     {"units", "m"},
                     {"source", source_name(set.source)},
                     {"stuck_agents", set.stuck_agents},
                     {"origins", origins}};
    if (meta.has_config) {
        std::ostringstream cfg;
        write_scenario_config(cfg, meta.config);
        j["config"] = nlohmann::json::parse(cfg.str());
    }
    out << j.dump(2) << '\n';
}

TrajectoryMeta read_trajectory_meta(std::istream& in, TrajectorySet& set) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("trajectory meta: ") + e.what());
    }
    TrajectoryMeta meta;
    if (j.contains("name")) set.name = j.at("name").get<std::string>();
    if (j.contains("fps")) set.fps = j.at("fps").get<double>();
    if (j.contains("source"))
        set.source = source_from_name(j.at("source").get<std::string>());
    if (j.contains("stuck_agents")) set.stuck_agents = j.at("stuck_agents").get<int>();
    if (j.contains("origins"))
        for (const auto& [key, val] : j.at("origins").items()) {
            const int id = static_cast<int>(std::stol(key));
            auto it = set.pedestrians.find(id);
            if (it != set.pedestrians.end())
                it->second.origin = origin_from_name(val.get<std::string>());
        }
    if (j.contains("config")) {
        std::istringstream cfg(j.at("config").dump());
        meta.config = read_scenario_config(cfg);
        meta.has_config = true;
    }
    return meta;
}

} // namespace tjflow
