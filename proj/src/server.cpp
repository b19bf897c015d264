#include "smart/server.hpp"

#include <algorithm>

namespace smart {

EmServer::EmServer(Adg adg) : adg_(std::move(adg)) {
    flat_offsets_.resize(adg_.robot_count() + 1, 0);
    for (int r = 0; r < adg_.robot_count(); ++r)
        flat_offsets_[r + 1] = flat_offsets_[r] + adg_.action_count(r);
    outstanding_.resize(flat_offsets_.back());
    completion_times_.assign(adg_.robot_count(), 0.0);
    finished_per_robot_.assign(adg_.robot_count(), 0);
}

// `event_time` is when the transition took effect (for finishes, the
// executor's completion time); `now` is the server clock driving the
// stall watchdog.
void EmServer::note_transition(VertexId id, VertexStatus status, double event_time, double now) {
    last_transition_time_ = now;
    any_transition_ = true;
    if (record_events_) events_.push_back({event_time, id, status});
}

EnqueueMsg EmServer::dispatch(VertexId id, double now) {
    adg_.mark_enqueued(id);
    note_transition(id, VertexStatus::Enqueued, now, now);
    DispatchRecord& rec = outstanding_[flat_offsets_[id.robot] + id.seq];
    rec.vertex = id;
    rec.sent_at = now;
    rec.acked = false;
    EnqueueMsg msg;
    msg.robot = id.robot;
    msg.seq = id.seq;
    msg.action = adg_.vertex(id).action;
    msg.sim_time = now;
    return msg;
}

std::vector<EnqueueMsg> EmServer::step_dispatch(double now) {
    std::vector<VertexId> ready = adg_.ready_vertices();  // snapshot, sorted
    std::vector<EnqueueMsg> msgs;
    msgs.reserve(ready.size());
    for (const VertexId& id : ready) msgs.push_back(dispatch(id, now));
    return msgs;
}

std::vector<EnqueueMsg> EmServer::on_completion(const DoneMsg& msg, double now) {
    VertexId id{msg.robot, msg.seq};
    if (msg.robot < 0 || msg.robot >= adg_.robot_count() || msg.seq < 0 ||
        msg.seq >= adg_.action_count(msg.robot)) {
        protocol_errors_.push_back("done for unknown vertex " + to_string(id));
        return {};
    }
    VertexStatus status = adg_.status(id);
    if (status == VertexStatus::Finished) {
        protocol_errors_.push_back("duplicate done for vertex " + to_string(id));
        return {};
    }
    if (status != VertexStatus::Enqueued) {
        protocol_errors_.push_back("done for non-enqueued vertex " + to_string(id));
        return {};
    }
    // In-order transport and FIFO executors imply each robot confirms its
    // lowest unfinished action next; anything else is a protocol violation.
    if (msg.seq != finished_per_robot_[msg.robot]) {
        protocol_errors_.push_back("out-of-order done for vertex " + to_string(id));
        return {};
    }

    outstanding_[flat_offsets_[id.robot] + id.seq].acked = true;
    std::vector<VertexId> newly = adg_.mark_finished(id);
    note_transition(id, VertexStatus::Finished, msg.sim_time, now);
    ++finished_per_robot_[id.robot];
    if (finished_per_robot_[id.robot] == adg_.action_count(id.robot))
        completion_times_[id.robot] = msg.sim_time;

    const Action& act = adg_.vertex(id).action;
    if (act.kind == ActionKind::MoveEnter || (act.kind == ActionKind::MoveExit && act.unsplit))
        enter_order_[act.into].push_back(id.robot);

    std::vector<EnqueueMsg> msgs;
    msgs.reserve(newly.size());
    for (const VertexId& w : newly) msgs.push_back(dispatch(w, now));
    return msgs;
}

std::optional<StallReport> EmServer::detect_stall(double now, double threshold) const {
    if (threshold <= 0.0) throw std::invalid_argument("threshold must be positive");
    if (adg_.all_finished()) return std::nullopt;
    double reference = any_transition_ ? last_transition_time_ : 0.0;
    double stalled_for = now - reference;
    if (stalled_for < threshold) return std::nullopt;

    StallReport report;
    report.stalled_for = stalled_for;
    for (int r = 0; r < adg_.robot_count(); ++r) {
        for (int k = 0; k < adg_.action_count(r); ++k) {
            VertexId id{r, k};
            switch (adg_.status(id)) {
                case VertexStatus::Enqueued: report.enqueued_unfinished.push_back(id); break;
                case VertexStatus::Staged:
                    if (!adg_.is_eligible(id)) report.staged_ineligible.push_back(id);
                    break;
                case VertexStatus::Finished: break;
            }
        }
    }
    return report;
}

}  // namespace smart
