#pragma once

#include <string>
#include <vector>

#include "smart/geometry.hpp"
#include "smart/grid_io.hpp"

namespace smart {

struct Waypoint {
    Cell cell;
    int t = 0;
};

// Per-robot sequence of timed locations. t is strictly increasing with
// t0 = 0; a gap in t means the robot waits at the previous cell and moves
// on the last step of the gap. Consecutive cells are at Manhattan
// distance <= 1.
struct PlanPath {
    int robot_id = 0;
    std::vector<Waypoint> waypoints;

    // Cell occupied at timestep t (robots hold their last waypoint forever).
    Cell cell_at(int t) const;
    int horizon() const { return waypoints.empty() ? 0 : waypoints.back().t; }
};

struct PlanSet {
    std::vector<PlanPath> paths;  // robot ids 0..I-1, in order

    int robot_count() const { return static_cast<int>(paths.size()); }
    int horizon() const;
};

enum class ViolationKind { OffMap, OnObstacle, NonAdjacent, VertexConflict, SwapConflict };

std::string to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::vector<int> robots;
    int timestep = 0;
};

struct ValidationReport {
    bool ok = true;
    std::vector<Violation> violations;
};

// Parse the timed-plan format, one robot per line:
//   <id>: (x,y,t);(x,y,t);...
// Whitespace around tokens is ignored. Throws std::runtime_error with the
// offending line number on syntax errors, duplicate ids, or t not strictly
// increasing from 0.
PlanSet parse_plan(const std::string& text);

// Canonical text form; parse_plan(print_plan(p)) == p.
std::string print_plan(const PlanSet& plan);

PlanSet load_plan_file(const std::string& path);

// Check the plan against the discrete MAPF model: every visited cell
// passable and in bounds, steps adjacent, no vertex or swap conflicts.
// Robots that finish early occupy their goal cell for all later
// timesteps. Circle conflicts (a cycle of robots rotating in lockstep)
// are admissible and not reported.
ValidationReport validate_plan(const PlanSet& plan, const GridMap& map);

}  // namespace smart
