#pragma once

#include <string>
#include <vector>

#include "smart/geometry.hpp"
#include "smart/plan.hpp"

namespace smart {

enum class ActionKind { Rotate, MoveExit, MoveEnter };

std::string to_string(ActionKind kind);

// One executable primitive. Moves are split at the cell boundary: a
// MoveExit runs from the center of `from` to the shared boundary midpoint,
// and the matching MoveEnter continues to the center of `into`. With safe
// stops disabled the whole move is one MoveExit flagged `unsplit`, running
// center to center.
struct Action {
    ActionKind kind = ActionKind::Rotate;
    int robot_id = 0;
    int seq = 0;
    int ref_time = 0;  // plan timestep of the originating move/rotation
    int angle_deg = 0;  // Rotate only: +90, -90, or 180 (executed clockwise)
    Cell from;          // move only: cell being left
    Cell into;          // move only: cell being entered
    Orientation toward = Orientation::North;
    bool unsplit = false;

    bool is_move() const { return kind != ActionKind::Rotate; }

    // World-frame start/end poses implied by the action geometry.
    Vec2 start_point(double cell_size) const;
    Vec2 end_point(double cell_size) const;
    double length(double cell_size) const;
};

struct ActionSequence {
    int robot_id = 0;
    Orientation initial_heading = Orientation::North;
    std::vector<Action> actions;
};

// Compile one timed path into actions. Waits produce nothing; each cell
// transition emits a Rotate when the heading changes, then the move split
// into exit/enter halves (or one unsplit move when safe_stops is false).
// Every emitted action carries the plan timestep of its move as ref_time.
ActionSequence compile_path(const PlanPath& path, Orientation initial, bool safe_stops);

std::vector<ActionSequence> compile_plan(const PlanSet& plan,
                                         const std::vector<Orientation>& initial_headings,
                                         bool safe_stops);

}  // namespace smart
