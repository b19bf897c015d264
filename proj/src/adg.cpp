#include "smart/adg.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace smart {

std::string to_string(VertexStatus s) {
    switch (s) {
        case VertexStatus::Staged: return "staged";
        case VertexStatus::Enqueued: return "enqueued";
        case VertexStatus::Finished: return "finished";
    }
    return "?";
}

std::string to_string(const VertexId& v) {
    return "(" + std::to_string(v.robot) + "," + std::to_string(v.seq) + ")";
}

OccupancyOrder cell_occupancy_order(const PlanSet& plan) {
    OccupancyOrder order;
    for (const auto& path : plan.paths) {
        if (path.waypoints.empty()) continue;
        Cell cur = path.waypoints.front().cell;
        int entered = 0;
        for (size_t i = 1; i < path.waypoints.size(); ++i) {
            const auto& wp = path.waypoints[i];
            if (wp.cell == cur) continue;  // wait folded into the visit
            order[cur].push_back({path.robot_id, entered, wp.t});
            cur = wp.cell;
            entered = wp.t;
        }
        order[cur].push_back({path.robot_id, entered, std::nullopt});
    }
    for (auto& [cell, visits] : order) {
        std::sort(visits.begin(), visits.end(), [](const CellVisit& a, const CellVisit& b) {
            if (a.t_enter != b.t_enter) return a.t_enter < b.t_enter;
            return a.robot < b.robot;
        });
        for (size_t i = 1; i < visits.size(); ++i) {
            const auto& prev = visits[i - 1];
            // Boundary contact t_enter == t_leave is the circle-conflict
            // case and is fine; true overlap means the plan is invalid.
            // A goal visit followed by another visit is left for build_adg
            // to report specifically.
            if (prev.t_leave && visits[i].t_enter < *prev.t_leave)
                throw std::runtime_error("overlapping occupancy of cell " + to_string(cell) +
                                         " by robots " + std::to_string(prev.robot) + " and " +
                                         std::to_string(visits[i].robot));
        }
    }
    return order;
}

Adg::Adg(std::vector<ActionSequence> sequences, std::vector<Type2Edge> edges)
    : type2_edges_(std::move(edges)) {
    vertices_.resize(sequences.size());
    initial_headings_.resize(sequences.size(), Orientation::North);
    unfinished_t2_preds_.resize(sequences.size());
    for (size_t r = 0; r < sequences.size(); ++r) {
        initial_headings_[r] = sequences[r].initial_heading;
        vertices_[r].resize(sequences[r].actions.size());
        unfinished_t2_preds_[r].assign(sequences[r].actions.size(), 0);
        for (size_t k = 0; k < sequences[r].actions.size(); ++k)
            vertices_[r][k].action = sequences[r].actions[k];
        total_ += static_cast<int>(sequences[r].actions.size());
    }
    for (const auto& e : type2_edges_) {
        if (e.from.robot == e.to.robot)
            throw std::logic_error("Type-2 edge within one robot: " + to_string(e.from));
        vertices_[e.from.robot][e.from.seq].type2_out.push_back(e.to);
        vertices_[e.to.robot][e.to.seq].type2_in.push_back(e.from);
        ++unfinished_t2_preds_[e.to.robot][e.to.seq];
    }
    for (int r = 0; r < robot_count(); ++r) {
        if (action_count(r) > 0 && unfinished_t2_preds_[r][0] == 0) ready_.push_back({r, 0});
    }
    std::sort(ready_.begin(), ready_.end());
}

bool Adg::is_eligible(VertexId id) const {
    const AdgVertex& v = vertex(id);
    if (v.status != VertexStatus::Staged) return false;
    if (id.seq > 0 && status({id.robot, id.seq - 1}) == VertexStatus::Staged) return false;
    return unfinished_t2_preds_[id.robot][id.seq] == 0;
}

void Adg::refresh_ready(VertexId id, std::vector<VertexId>& out) {
    if (!is_eligible(id)) return;
    auto it = std::lower_bound(ready_.begin(), ready_.end(), id);
    if (it != ready_.end() && *it == id) return;
    ready_.insert(it, id);
    out.push_back(id);
}

std::vector<VertexId> Adg::mark_enqueued(VertexId id) {
    AdgVertex& v = vertices_.at(id.robot).at(id.seq);
    if (v.status != VertexStatus::Staged)
        throw std::logic_error("illegal transition: " + to_string(id) + " is " +
                               to_string(v.status) + ", expected staged");
    if (!is_eligible(id))
        throw std::logic_error("enqueue of ineligible vertex " + to_string(id));
    v.status = VertexStatus::Enqueued;
    auto it = std::lower_bound(ready_.begin(), ready_.end(), id);
    if (it != ready_.end() && *it == id) ready_.erase(it);

    std::vector<VertexId> newly;
    if (id.seq + 1 < action_count(id.robot)) refresh_ready({id.robot, id.seq + 1}, newly);
    return newly;
}

std::vector<VertexId> Adg::mark_finished(VertexId id) {
    AdgVertex& v = vertices_.at(id.robot).at(id.seq);
    if (v.status != VertexStatus::Enqueued)
        throw std::logic_error("illegal transition: " + to_string(id) + " is " +
                               to_string(v.status) + ", expected enqueued");
    v.status = VertexStatus::Finished;
    ++finished_;

    std::vector<VertexId> newly;
    for (const VertexId& succ : v.type2_out) {
        if (--unfinished_t2_preds_[succ.robot][succ.seq] == 0) refresh_ready(succ, newly);
    }
    if (id.seq + 1 < action_count(id.robot)) refresh_ready({id.robot, id.seq + 1}, newly);
    std::sort(newly.begin(), newly.end());
    return newly;
}

Adg build_adg(std::vector<ActionSequence> sequences, const PlanSet& plan) {
    OccupancyOrder occupancy = cell_occupancy_order(plan);

    // Locate each robot's move actions by the plan timestep they realize.
    // A robot makes at most one move per timestep, so (robot, ref_time)
    // identifies the exit/enter pair.
    struct MovePair {
        int exit_seq = -1;
        int enter_seq = -1;
    };
    std::vector<std::unordered_map<int, MovePair>> moves(sequences.size());
    for (const auto& seq : sequences) {
        for (const auto& a : seq.actions) {
            if (!a.is_move()) continue;
            MovePair& mp = moves[seq.robot_id][a.ref_time];
            if (a.kind == ActionKind::MoveExit) {
                mp.exit_seq = a.seq;
                if (a.unsplit) mp.enter_seq = a.seq;
            } else {
                mp.enter_seq = a.seq;
            }
        }
    }

    std::vector<Type2Edge> edges;
    for (const auto& [cell, visits] : occupancy) {
        for (size_t i = 1; i < visits.size(); ++i) {
            const CellVisit& prev = visits[i - 1];
            const CellVisit& next = visits[i];
            if (!prev.t_leave)
                throw std::runtime_error("robot " + std::to_string(next.robot) +
                                         " enters goal-occupied cell " + to_string(cell) +
                                         " held by robot " + std::to_string(prev.robot));
            if (prev.robot == next.robot) continue;  // ordered by the Type-1 chain

            auto exit_it = moves[prev.robot].find(*prev.t_leave);
            if (exit_it == moves[prev.robot].end() || exit_it->second.exit_seq < 0)
                throw std::runtime_error("missing exit action of robot " +
                                         std::to_string(prev.robot) + " out of " + to_string(cell));
            auto enter_it = moves[next.robot].find(next.t_enter);
            if (enter_it == moves[next.robot].end() || enter_it->second.enter_seq < 0)
                throw std::runtime_error("missing enter action of robot " +
                                         std::to_string(next.robot) + " into " + to_string(cell));
            edges.push_back({{prev.robot, exit_it->second.exit_seq},
                             {next.robot, enter_it->second.enter_seq},
                             cell,
                             std::nullopt});
        }
    }

    // Boundary crossings: each move crosses the midpoint between its two
    // cells; order crossings of each boundary chronologically.
    struct Crossing {
        int robot;
        int t;  // move ref_time
    };
    std::map<std::pair<Cell, Cell>, std::vector<Crossing>> crossings;
    for (const auto& path : plan.paths) {
        for (size_t i = 1; i < path.waypoints.size(); ++i) {
            const Cell& a = path.waypoints[i - 1].cell;
            const Cell& b = path.waypoints[i].cell;
            if (a == b) continue;
            auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
            crossings[key].push_back({path.robot_id, path.waypoints[i].t});
        }
    }
    for (auto& [key, list] : crossings) {
        std::sort(list.begin(), list.end(),
                  [](const Crossing& a, const Crossing& b) { return a.t < b.t; });
        for (size_t i = 1; i < list.size(); ++i) {
            const Crossing& prev = list[i - 1];
            const Crossing& next = list[i];
            if (prev.robot == next.robot) continue;
            if (prev.t == next.t)
                throw std::runtime_error("simultaneous boundary crossing between " +
                                         to_string(key.first) + " and " + to_string(key.second));
            int from_seq = moves[prev.robot].at(prev.t).enter_seq;
            int to_seq = moves[next.robot].at(next.t).exit_seq;
            edges.push_back(
                {{prev.robot, from_seq}, {next.robot, to_seq}, key.first, key.second});
        }
    }
    return Adg(std::move(sequences), std::move(edges));
}

CycleReport check_acyclic(const Adg& adg) {
    // Iterative DFS over the union of Type-1 and Type-2 edges; a back
    // edge into the active stack yields the witness cycle.
    enum : char { White, Gray, Black };
    std::vector<std::vector<char>> color(adg.robot_count());
    for (int r = 0; r < adg.robot_count(); ++r) color[r].assign(adg.action_count(r), White);

    auto successors = [&adg](VertexId id) {
        std::vector<VertexId> out;
        if (id.seq + 1 < adg.action_count(id.robot)) out.push_back({id.robot, id.seq + 1});
        const auto& t2 = adg.vertex(id).type2_out;
        out.insert(out.end(), t2.begin(), t2.end());
        return out;
    };

    std::vector<VertexId> stack;
    struct Frame {
        VertexId id;
        size_t next_child = 0;
    };
    for (int r = 0; r < adg.robot_count(); ++r) {
        for (int k = 0; k < adg.action_count(r); ++k) {
            if (color[r][k] != White) continue;
            std::vector<Frame> frames{{{r, k}, 0}};
            color[r][k] = Gray;
            stack.push_back({r, k});
            while (!frames.empty()) {
                Frame& f = frames.back();
                auto succ = successors(f.id);
                if (f.next_child < succ.size()) {
                    VertexId child = succ[f.next_child++];
                    char& c = color[child.robot][child.seq];
                    if (c == White) {
                        c = Gray;
                        stack.push_back(child);
                        frames.push_back({child, 0});
                    } else if (c == Gray) {
                        CycleReport report;
                        report.acyclic = false;
                        auto it = std::find(stack.begin(), stack.end(), child);
                        report.cycle.assign(it, stack.end());
                        return report;
                    }
                } else {
                    color[f.id.robot][f.id.seq] = Black;
                    stack.pop_back();
                    frames.pop_back();
                }
            }
        }
    }
    return {};
}

std::vector<VertexId> oracle_execute(Adg adg) {
    std::vector<VertexId> completion;
    completion.reserve(adg.total_vertices());
    std::vector<VertexId> enqueued;
    while (!adg.all_finished()) {
        std::vector<VertexId> eligible = adg.ready_vertices();
        for (const VertexId& id : eligible) adg.mark_enqueued(id);
        enqueued.insert(enqueued.end(), eligible.begin(), eligible.end());
        std::sort(enqueued.begin(), enqueued.end());
        if (enqueued.empty())
            throw std::runtime_error("oracle stalled before completion (cyclic dependencies)");
        for (const VertexId& id : enqueued) {
            adg.mark_finished(id);
            completion.push_back(id);
        }
        enqueued.clear();
    }
    return completion;
}

std::string dump_adg_json(const Adg& adg) {
    nlohmann::json j;
    j["format_version"] = 1;
    auto& verts = j["vertices"] = nlohmann::json::array();
    for (int r = 0; r < adg.robot_count(); ++r) {
        for (int k = 0; k < adg.action_count(r); ++k) {
            const AdgVertex& v = adg.vertex({r, k});
            nlohmann::json rec{{"robot", r},
                               {"seq", k},
                               {"kind", to_string(v.action.kind)},
                               {"status", to_string(v.status)}};
            if (v.action.is_move()) {
                rec["from"] = {v.action.from.x, v.action.from.y};
                rec["into"] = {v.action.into.x, v.action.into.y};
                rec["toward"] = std::string(1, to_char(v.action.toward));
                if (v.action.unsplit) rec["unsplit"] = true;
            } else {
                rec["angle"] = v.action.angle_deg;
            }
            verts.push_back(std::move(rec));
        }
    }
    auto& edges = j["edges"] = nlohmann::json::array();
    for (int r = 0; r < adg.robot_count(); ++r) {
        for (int k = 0; k + 1 < adg.action_count(r); ++k) {
            edges.push_back({{"type", "1"}, {"from", {r, k}}, {"to", {r, k + 1}}});
        }
    }
    for (const auto& e : adg.type2_edges()) {
        nlohmann::json rec{{"type", "2"},
                           {"from", {e.from.robot, e.from.seq}},
                           {"to", {e.to.robot, e.to.seq}},
                           {"cell", {e.cell.x, e.cell.y}}};
        if (e.cell2) rec["boundary_with"] = {e.cell2->x, e.cell2->y};
        edges.push_back(std::move(rec));
    }
    return j.dump(2);
}

}  // namespace smart
