#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smart/adg.hpp"
#include "smart/executor.hpp"
#include "smart/grid_io.hpp"
#include "smart/metrics.hpp"
#include "smart/plan.hpp"
#include "smart/world.hpp"

namespace smart {

enum class TransportKind { Inproc, Tcp };

struct RunConfig {
    // Inputs. Paths may be empty when the parsed objects are provided
    // directly (test use).
    std::string map_path;
    std::string scen_path;
    std::string plan_path;
    std::string config_path;
    std::optional<GridMap> map;
    std::optional<PlanSet> plan;

    double tick = 0.1;
    double cell_size = 1.0;
    bool safe_stops = true;
    double robot_radius = 0.2;
    ControllerConfig controller;
    std::vector<Orientation> initial_headings;  // empty = all North

    UncertaintyConfig uncertainty;

    double stall_threshold = 300.0;  // sim seconds
    double max_sim_time = 0.0;       // 0 = unlimited

    TransportKind transport = TransportKind::Inproc;
    int port = 8571;  // 0 binds an ephemeral port, reported via on_tcp_bound
    std::function<void(int)> on_tcp_bound;

    // Artifact paths; empty = not written.
    std::string metrics_path;
    std::string trace_path;
    std::string adg_dump_path;
    std::string events_path;
    int trace_interval_ticks = 1;

    bool keep_trace_in_memory = false;  // test hook
};

enum class RunStatus {
    Success = 0,
    ValidationFailure = 2,
    AdgCycle = 3,
    Stall = 4,
    Collision = 5,
    IoError = 6,
};

struct RunResult {
    RunStatus status = RunStatus::Success;
    std::string failure_reason;
    Metrics metrics;
    ValidationReport validation;
    CycleReport cycle;
    CollisionReport collision;
    std::map<Cell, std::vector<int>> enter_completion_order;
    std::vector<RobotState> final_states;
    std::vector<TraceRow> trace;  // populated when keep_trace_in_memory
    double sim_seconds = 0.0;
    double wall_seconds = 0.0;

    bool ok() const { return status == RunStatus::Success; }
};

// Parse the JSON controller/robot configuration file into `cfg`.
void apply_config_file(const std::string& path, RunConfig& cfg, int robot_count);

// The full pipeline: parse, validate, compile, build and check the ADG,
// execute to completion (or stall/collision), finalize metrics, and write
// the requested artifacts. I/O and config problems surface as IoError.
RunResult run_simulation(const RunConfig& cfg);

struct ExecutorPoolOptions {
    std::string host = "127.0.0.1";
    int port = 8571;
    std::vector<int> robots;  // robot ids served by this pool
    PlanSet plan;             // for start poses and headings
    double tick = 0.1;
    ControllerConfig controller;
    std::vector<Orientation> initial_headings;
    UncertaintyConfig uncertainty;
};

// TCP executor pool: one connection, one executor, and one locally
// integrated robot per id, each on its own thread. Returns when the
// server sends shutdown on every connection.
void run_executor_pool(const ExecutorPoolOptions& opts);

int resolve_port(int cli_port);

}  // namespace smart
