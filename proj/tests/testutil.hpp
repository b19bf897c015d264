#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "smart/grid_io.hpp"
#include "smart/plan.hpp"
#include "smart/protocol.hpp"
#include "smart/rng.hpp"

namespace smart::test {

// All-passable w x h grid.
GridMap open_map(int w, int h);

// Grid with the given cells blocked.
GridMap map_with_obstacles(int w, int h, const std::vector<Cell>& obstacles);

PlanPath make_path(int robot, std::vector<Waypoint> wps);

// Fig-3-style circle conflict: four robots on a 2x2 block, all rotating
// one step clockwise at t=1. Valid MAPF, deadlocks a naive ADG.
PlanSet rotation_cycle_plan();
GridMap rotation_cycle_map();

// Conflict-free-by-construction random walk plan: robots start on
// distinct passable cells and only take moves that cannot conflict with
// any other robot's current or already-decided next cell.
PlanSet random_valid_plan(const GridMap& map, int robots, int steps, Xoshiro256pp& rng,
                          bool compress_waits);

// Unconstrained random walk; may contain vertex/swap conflicts. Used to
// exercise the validator against the brute-force oracle.
PlanSet random_walk_plan(const GridMap& map, int robots, int steps, Xoshiro256pp& rng);

// Independent per-timestep occupancy oracle for plan validation. Expands
// every robot position for every timestep and compares all pairs.
struct OracleOutcome {
    bool ok = true;
    // (timestep, robot_a, robot_b), robot_a < robot_b
    std::vector<std::tuple<int, int, int>> vertex_conflicts;
    std::vector<std::tuple<int, int, int>> swap_conflicts;
    bool static_violation = false;  // off-map, obstacle, or non-adjacent step
};
OracleOutcome brute_force_check(const PlanSet& plan, const GridMap& map);

struct CorpusInstance {
    std::string name;
    GridMap map;
    PlanSet plan;
};

// The acceptance corpus: >= 100 conflict-checked random-walk plans over
// 8x8 to 32x32 maps with 2 to 50 robots.
std::vector<CorpusInstance> acceptance_corpus();

// Expected per-cell entry order implied by the plan (robots entering a
// cell they did not start in, in occupancy order).
std::map<Cell, std::vector<int>> expected_enter_order(const PlanSet& plan);

// Random well-formed protocol message. Floating-point fields are
// normalized to the 6-fractional-digit wire precision so round-trips are
// exact.
Message random_message(Xoshiro256pp& rng);

bool messages_equal(const Message& a, const Message& b);

}  // namespace smart::test
