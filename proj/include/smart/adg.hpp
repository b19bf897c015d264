#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smart/actions.hpp"
#include "smart/plan.hpp"

namespace smart {

enum class VertexStatus { Staged, Enqueued, Finished };

std::string to_string(VertexStatus s);

struct VertexId {
    int robot = 0;
    int seq = 0;

    auto operator<=>(const VertexId&) const = default;
};

std::string to_string(const VertexId& v);

struct AdgVertex {
    Action action;
    VertexStatus status = VertexStatus::Staged;
    std::vector<VertexId> type2_in;
    std::vector<VertexId> type2_out;
};

// One stay of one robot in one cell: [t_enter, t_leave). Start visits have
// t_enter = 0; a goal visit never ends (t_leave unset).
struct CellVisit {
    int robot = 0;
    int t_enter = 0;
    std::optional<int> t_leave;
};

using OccupancyOrder = std::map<Cell, std::vector<CellVisit>>;

// Chronological visit list per cell. For valid plans, visit intervals of a
// cell never overlap except at the shared boundary t_enter(next) ==
// t_leave(prev), which is how circle conflicts manifest. Throws on
// genuinely overlapping occupancy (invalid plan).
OccupancyOrder cell_occupancy_order(const PlanSet& plan);

struct Type2Edge {
    VertexId from;
    VertexId to;
    Cell cell;  // the shared cell that induced the edge
    // Set for boundary edges: the edge orders crossings of the boundary
    // between `cell` and `cell2` rather than stays in a cell. Safe stops
    // park robots on boundary midpoints, so those midpoints are shared
    // resources with their own passing order.
    std::optional<Cell> cell2;

    bool is_boundary() const { return cell2.has_value(); }
};

// The Action Dependency Graph. Type-1 edges are implicit between
// consecutive seq values of one robot; Type-2 edges run from the vertex
// that releases a cell to the vertex of the next robot entering it.
class Adg {
public:
    Adg() = default;
    Adg(std::vector<ActionSequence> sequences, std::vector<Type2Edge> edges);

    int robot_count() const { return static_cast<int>(vertices_.size()); }
    int action_count(int robot) const { return static_cast<int>(vertices_[robot].size()); }
    int total_vertices() const { return total_; }

    const AdgVertex& vertex(VertexId id) const { return vertices_[id.robot][id.seq]; }
    VertexStatus status(VertexId id) const { return vertex(id).status; }
    const std::vector<Type2Edge>& type2_edges() const { return type2_edges_; }
    Orientation initial_heading(int robot) const { return initial_headings_[robot]; }

    bool all_finished() const { return finished_ == total_; }
    int finished_count() const { return finished_; }

    // A staged vertex is eligible for enqueueing iff its Type-1
    // predecessor (if any) is enqueued or finished and every Type-2
    // predecessor is finished.
    bool is_eligible(VertexId id) const;

    // Current eligible set, ascending (robot, seq). Maintained
    // incrementally by the mark_* transitions; returned by value because
    // those transitions invalidate it.
    std::vector<VertexId> ready_vertices() const { return ready_; }

    // staged -> enqueued. Returns vertices that became eligible as a
    // consequence. Throws std::logic_error on an illegal transition.
    std::vector<VertexId> mark_enqueued(VertexId id);

    // enqueued -> finished. Returns vertices that became eligible.
    std::vector<VertexId> mark_finished(VertexId id);

private:
    void refresh_ready(VertexId id, std::vector<VertexId>& out);

    std::vector<std::vector<AdgVertex>> vertices_;
    std::vector<Orientation> initial_headings_;
    std::vector<Type2Edge> type2_edges_;
    std::vector<std::vector<int>> unfinished_t2_preds_;
    std::vector<VertexId> ready_;  // kept sorted
    int total_ = 0;
    int finished_ = 0;
};

// Build the ADG for sequences compiled from `plan`. Two edge families:
//  - cells: for each pair of consecutive visits (r_i then r_j, i != j) of
//    a cell, one edge from r_i's exit out of the cell to r_j's entry into
//    it;
//  - boundaries: for each pair of consecutive crossings of a cell
//    boundary by distinct robots, one edge from the earlier robot's entry
//    into its destination to the later robot's exit toward the boundary,
//    so nobody aims at a midpoint someone else still holds.
// Throws if a robot enters a cell some other robot occupies forever, or
// when the exit/enter lookup fails (sequences not compiled from this plan).
Adg build_adg(std::vector<ActionSequence> sequences, const PlanSet& plan);

struct CycleReport {
    bool acyclic = true;
    std::vector<VertexId> cycle;  // witness, in edge order, when cyclic
};

CycleReport check_acyclic(const Adg& adg);

// Discrete oracle executor: each round enqueues every currently eligible
// vertex, then finishes every enqueued vertex, both in ascending
// (robot, seq) order. Returns the completion order. Throws if it stalls
// before completion (cyclic graph).
std::vector<VertexId> oracle_execute(Adg adg);

// Text/JSON dump for offline inspection (vertex and edge records).
std::string dump_adg_json(const Adg& adg);

}  // namespace smart
