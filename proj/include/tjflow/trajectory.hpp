#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tjflow/geometry.hpp"
#include "tjflow/scenario.hpp"

namespace tjflow {

enum class Origin : std::uint8_t { Left, Right, Unknown };

const char* origin_name(Origin o);
Origin origin_from_name(const std::string& name);

enum class TrajSource : std::uint8_t { Simulated, Experimental };

const char* source_name(TrajSource s);
TrajSource source_from_name(const std::string& name);

struct TrajectorySample {
    int frame = 0;
    Vec2 position;
};

struct Pedestrian {
    Origin origin = Origin::Unknown;
    std::vector<TrajectorySample> samples; // frames strictly increasing
};

/// Frame-indexed positions of every pedestrian of one run, in meters.
struct TrajectorySet {
    double fps = 16.0;
    TrajSource source = TrajSource::Experimental;
    std::string name;
    std::map<int, Pedestrian> pedestrians;
    int stuck_agents = 0; // simulation step budget exhausted for this many

    int min_frame() const;
    int max_frame() const;
    std::size_t sample_count() const;
};

enum class Units { cm, m };

/// Text format: whitespace-separated `id frame x y [z]` per line, `#`
/// starts a comment line. z is ignored; cm values are divided by 100.
/// Throws ParseError with the offending 1-based line number.
TrajectorySet parse_trajectories(std::istream& in, Units units, double fps);

/// Left if the earliest recorded x < -epsilon_x of the junction centerline
/// (x = 0 by scenario convention), Right if > +epsilon_x, Unknown inside
/// the band. Positions and frames are untouched.
TrajectorySet assign_origins(const TrajectorySet& trajset, const Scenario& scenario,
                             double epsilon_x = 0.1);
TrajectorySet assign_origins(const TrajectorySet& trajset, double epsilon_x = 0.1);

/// Rigid translation of every recorded position; used to pool runs from
/// geometries whose observation areas sit at different heights into one
/// target-anchored frame.
TrajectorySet translated(const TrajectorySet& trajset, Vec2 shift);

/// Same format as the parser, always meters, ids then frames ascending.
void write_trajectories(std::ostream& out, const TrajectorySet& trajset);

/// Sidecar with name, fps, source, per-id origin and optional simulation
/// provenance (seed, config, split_left).
struct TrajectoryMeta {
    bool has_config = false;
    ScenarioConfig config;
};

void write_trajectory_meta(std::ostream& out, const TrajectorySet& trajset,
                           const TrajectoryMeta& meta);
/// Applies the sidecar's fps/source/name/origins onto a parsed set.
TrajectoryMeta read_trajectory_meta(std::istream& in, TrajectorySet& trajset);

} // namespace tjflow
