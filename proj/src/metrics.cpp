#include "smart/metrics.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace smart {

Metrics finalize(const std::vector<double>& completion_times, double sim_seconds,
                 double wall_seconds, int collisions, bool all_completed) {
    if (completion_times.empty()) throw std::runtime_error("no robots to finalize");
    Metrics m;
    double sum = 0.0;
    for (size_t i = 0; i < completion_times.size(); ++i) {
        sum += completion_times[i];
        m.max_exec = std::max(m.max_exec, completion_times[i]);
        m.per_robot.emplace_back(static_cast<int>(i), completion_times[i]);
    }
    m.aet = sum / static_cast<double>(completion_times.size());
    m.sim_speed = wall_seconds > 0.0 ? sim_seconds / wall_seconds : 0.0;
    m.collisions = collisions;
    m.success = collisions == 0 && all_completed;
    return m;
}

std::string trace_to_csv(const std::vector<TraceRow>& rows) {
    std::string out = "sim_time,robot,x,y,theta,v_l,v_r,queue_len\n";
    for (const auto& r : rows) {
        out += format_decimal(r.sim_time);
        out += ',';
        out += std::to_string(r.robot);
        out += ',';
        out += format_decimal(r.x);
        out += ',';
        out += format_decimal(r.y);
        out += ',';
        out += format_decimal(r.theta);
        out += ',';
        out += format_decimal(r.v_l);
        out += ',';
        out += format_decimal(r.v_r);
        out += ',';
        out += std::to_string(r.queue_len);
        out += '\n';
    }
    return out;
}

std::vector<TraceRow> parse_trace_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line.rfind("sim_time,robot", 0) != 0)
        throw std::runtime_error("bad trace header");
    std::vector<TraceRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        TraceRow r;
        char comma;
        if (!(ls >> r.sim_time >> comma >> r.robot >> comma >> r.x >> comma >> r.y >> comma >>
              r.theta >> comma >> r.v_l >> comma >> r.v_r >> comma >> r.queue_len))
            throw std::runtime_error("bad trace row: " + line);
        rows.push_back(r);
    }
    return rows;
}

std::string metrics_to_json(const Metrics& m) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["aet"] = m.aet;
    j["max_exec"] = m.max_exec;
    j["sim_speed"] = m.sim_speed;
    j["collisions"] = m.collisions;
    j["success"] = m.success;
    auto& per = j["per_robot"] = nlohmann::json::array();
    for (const auto& [robot, t] : m.per_robot) per.push_back({{"robot", robot}, {"completion_time", t}});
    return j.dump(2) + "\n";
}

std::string events_to_csv(const std::vector<StatusEvent>& events) {
    std::string out = "sim_time,robot,seq,new_status\n";
    for (const auto& e : events) {
        out += format_decimal(e.sim_time);
        out += ',';
        out += std::to_string(e.vertex.robot);
        out += ',';
        out += std::to_string(e.vertex.seq);
        out += ',';
        out += to_string(e.status);
        out += '\n';
    }
    return out;
}

std::vector<StatusEvent> parse_events_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line.rfind("sim_time,robot,seq", 0) != 0)
        throw std::runtime_error("bad event log header");
    std::vector<StatusEvent> events;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        StatusEvent e;
        char c;
        std::string status;
        std::istringstream ls(line);
        if (!(ls >> e.sim_time >> c >> e.vertex.robot >> c >> e.vertex.seq >> c) ||
            !std::getline(ls, status))
            throw std::runtime_error("bad event row: " + line);
        if (status == "staged")
            e.status = VertexStatus::Staged;
        else if (status == "enqueued")
            e.status = VertexStatus::Enqueued;
        else if (status == "finished")
            e.status = VertexStatus::Finished;
        else
            throw std::runtime_error("bad status in event row: " + line);
        events.push_back(e);
    }
    return events;
}

std::vector<double> completion_times_from_events(const std::vector<StatusEvent>& events,
                                                 int robot_count) {
    std::vector<int> last_seq(robot_count, -1);
    std::vector<double> times(robot_count, 0.0);
    for (const auto& e : events) {
        if (e.status != VertexStatus::Finished) continue;
        if (e.vertex.robot < 0 || e.vertex.robot >= robot_count)
            throw std::runtime_error("event for unknown robot " + std::to_string(e.vertex.robot));
        if (e.vertex.seq > last_seq[e.vertex.robot]) {
            last_seq[e.vertex.robot] = e.vertex.seq;
            times[e.vertex.robot] = e.sim_time;
        }
    }
    return times;
}

}  // namespace smart
