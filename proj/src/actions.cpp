#include "smart/actions.hpp"

#include <stdexcept>

namespace smart {

std::string to_string(ActionKind kind) {
    switch (kind) {
        case ActionKind::Rotate: return "rotate";
        case ActionKind::MoveExit: return "move_exit";
        case ActionKind::MoveEnter: return "move_enter";
    }
    return "?";
}

Vec2 Action::start_point(double cell_size) const {
    if (kind == ActionKind::MoveEnter) {
        // Boundary midpoint on the side opposite the travel direction.
        return boundary_midpoint(from, toward, cell_size);
    }
    return cell_center(from, cell_size);
}

Vec2 Action::end_point(double cell_size) const {
    if (kind == ActionKind::MoveExit && !unsplit) return boundary_midpoint(from, toward, cell_size);
    return cell_center(into, cell_size);
}

double Action::length(double cell_size) const {
    if (!is_move()) return 0.0;
    return unsplit ? cell_size : 0.5 * cell_size;
}

ActionSequence compile_path(const PlanPath& path, Orientation initial, bool safe_stops) {
    ActionSequence seq;
    seq.robot_id = path.robot_id;
    seq.initial_heading = initial;

    Orientation heading = initial;
    int next_seq = 0;
    auto push = [&seq, &next_seq, &path](Action a) {
        a.robot_id = path.robot_id;
        a.seq = next_seq++;
        seq.actions.push_back(a);
    };

    for (size_t i = 1; i < path.waypoints.size(); ++i) {
        const Cell& prev = path.waypoints[i - 1].cell;
        const Cell& next = path.waypoints[i].cell;
        if (prev == next) continue;  // wait, elided

        Orientation dir = heading_between(prev, next);
        int ref = path.waypoints[i].t;
        if (dir != heading) {
            Action rot;
            rot.kind = ActionKind::Rotate;
            rot.angle_deg = rotation_delta(heading, dir);
            rot.ref_time = ref;
            push(rot);
            heading = dir;
        }

        Action exit;
        exit.kind = ActionKind::MoveExit;
        exit.from = prev;
        exit.into = next;
        exit.toward = dir;
        exit.ref_time = ref;
        exit.unsplit = !safe_stops;
        push(exit);

        if (safe_stops) {
            Action enter;
            enter.kind = ActionKind::MoveEnter;
            enter.from = prev;
            enter.into = next;
            enter.toward = dir;
            enter.ref_time = ref;
            push(enter);
        }
    }
    return seq;
}

std::vector<ActionSequence> compile_plan(const PlanSet& plan,
                                         const std::vector<Orientation>& initial_headings,
                                         bool safe_stops) {
    if (!initial_headings.empty() &&
        initial_headings.size() != static_cast<size_t>(plan.robot_count()))
        throw std::runtime_error("initial_headings size does not match robot count");
    std::vector<ActionSequence> out;
    out.reserve(plan.paths.size());
    for (const auto& path : plan.paths) {
        Orientation initial =
            initial_headings.empty() ? Orientation::North : initial_headings[path.robot_id];
        out.push_back(compile_path(path, initial, safe_stops));
    }
    return out;
}

}  // namespace smart
