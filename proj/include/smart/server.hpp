#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smart/adg.hpp"
#include "smart/protocol.hpp"

namespace smart {

struct DispatchRecord {
    VertexId vertex;
    double sent_at = 0.0;
    bool acked = false;
};

struct StallReport {
    double stalled_for = 0.0;
    std::vector<VertexId> enqueued_unfinished;
    std::vector<VertexId> staged_ineligible;
};

struct StatusEvent {
    double sim_time = 0.0;
    VertexId vertex;
    VertexStatus status = VertexStatus::Enqueued;
};

// The execution monitor: drives the ADG state machine, hands enqueued
// actions to the transport, and folds completion confirmations back in.
class EmServer {
public:
    explicit EmServer(Adg adg);

    // Enqueue every currently eligible vertex; returns the enqueue
    // messages in ascending (robot, seq) order.
    std::vector<EnqueueMsg> step_dispatch(double now);

    // Process one completion confirmation. Returns follow-up dispatches
    // for vertices the finish made eligible. Unknown vertices, duplicate
    // confirmations, and confirmations for non-enqueued vertices are
    // rejected: the error is recorded and the state left unchanged.
    std::vector<EnqueueMsg> on_completion(const DoneMsg& msg, double now);

    std::optional<StallReport> detect_stall(double now, double threshold) const;

    bool is_complete() const { return adg_.all_finished(); }
    const Adg& adg() const { return adg_; }

    // Simulation time at which each robot finished its last vertex.
    // Robots with no actions complete at time 0.
    const std::vector<double>& completion_times() const { return completion_times_; }
    bool robot_complete(int robot) const { return finished_per_robot_[robot] == adg_.action_count(robot); }

    const std::vector<StatusEvent>& events() const { return events_; }
    void set_record_events(bool on) { record_events_ = on; }
    const std::vector<std::string>& protocol_errors() const { return protocol_errors_; }

    // Completion order of cell entries, per cell, for passing-order checks.
    const std::map<Cell, std::vector<int>>& enter_completion_order() const {
        return enter_order_;
    }

private:
    EnqueueMsg dispatch(VertexId id, double now);
    void note_transition(VertexId id, VertexStatus status, double event_time, double now);

    Adg adg_;
    std::vector<DispatchRecord> outstanding_;  // indexed by flat vertex index
    std::vector<int> flat_offsets_;
    std::vector<double> completion_times_;
    std::vector<int> finished_per_robot_;
    double last_transition_time_ = 0.0;
    bool any_transition_ = false;
    bool record_events_ = false;
    std::vector<StatusEvent> events_;
    std::vector<std::string> protocol_errors_;
    std::map<Cell, std::vector<int>> enter_order_;
};

}  // namespace smart
