#pragma once

#include <string>
#include <vector>

#include "smart/server.hpp"

namespace smart {

struct Metrics {
    double aet = 0.0;       // mean per-robot completion time, sim seconds
    double max_exec = 0.0;  // max per-robot completion time, sim seconds
    double sim_speed = 0.0;  // sim seconds per wall second
    std::vector<std::pair<int, double>> per_robot;  // (robot, completion time)
    int collisions = 0;
    bool success = false;
};

// Compute the summary metrics. Throws on an empty robot set.
Metrics finalize(const std::vector<double>& completion_times, double sim_seconds,
                 double wall_seconds, int collisions, bool all_completed);

struct TraceRow {
    double sim_time = 0.0;
    int robot = 0;
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
    double v_l = 0.0;
    double v_r = 0.0;
    int queue_len = 0;
};

// CSV with a fixed header; floats use the 6-fractional-digit wire format.
std::string trace_to_csv(const std::vector<TraceRow>& rows);
std::vector<TraceRow> parse_trace_csv(const std::string& csv);

std::string metrics_to_json(const Metrics& m);

// Event log CSV: sim_time,robot,seq,new_status per transition.
std::string events_to_csv(const std::vector<StatusEvent>& events);
std::vector<StatusEvent> parse_events_csv(const std::string& csv);

// Rebuild per-robot completion times from an event log (the finish time
// of each robot's highest-seq vertex). Used to cross-check live metrics.
std::vector<double> completion_times_from_events(const std::vector<StatusEvent>& events,
                                                 int robot_count);

}  // namespace smart
