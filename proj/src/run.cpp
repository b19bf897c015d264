#include "smart/run.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "smart/server.hpp"
#include "smart/transport.hpp"

namespace smart {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

double wall_seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Everything shared by the inproc and TCP execution paths.
struct Pipeline {
    GridMap map;
    PlanSet plan;
    std::vector<Orientation> headings;
    Adg adg;
};

RunResult prepare(const RunConfig& cfg, Pipeline& pipe) {
    RunResult result;

    pipe.map = cfg.map ? *cfg.map : load_map_file(cfg.map_path);
    pipe.map.cell_size = cfg.cell_size;
    pipe.plan = cfg.plan ? *cfg.plan : load_plan_file(cfg.plan_path);
    if (pipe.plan.robot_count() == 0) throw std::runtime_error("plan has no robots");

    if (!cfg.scen_path.empty()) {
        Scenario scen = load_scenario_file(cfg.scen_path, pipe.map);
        if (static_cast<int>(scen.entries.size()) < pipe.plan.robot_count()) {
            result.status = RunStatus::ValidationFailure;
            result.failure_reason = "scenario has fewer entries than the plan has robots";
            return result;
        }
        for (const auto& path : pipe.plan.paths) {
            const auto& entry = scen.entries[path.robot_id];
            if (path.waypoints.front().cell != entry.start ||
                path.waypoints.back().cell != entry.goal) {
                result.status = RunStatus::ValidationFailure;
                result.failure_reason = "plan endpoints of robot " + std::to_string(path.robot_id) +
                                        " do not match the scenario entry";
                return result;
            }
        }
    }

    result.validation = validate_plan(pipe.plan, pipe.map);
    if (!result.validation.ok) {
        result.status = RunStatus::ValidationFailure;
        result.failure_reason = "plan fails validation (" +
                                std::to_string(result.validation.violations.size()) +
                                " violations, first: " +
                                to_string(result.validation.violations.front().kind) + " at t=" +
                                std::to_string(result.validation.violations.front().timestep) + ")";
        return result;
    }

    pipe.headings = cfg.initial_headings;
    if (pipe.headings.empty())
        pipe.headings.assign(pipe.plan.robot_count(), Orientation::North);

    auto sequences = compile_plan(pipe.plan, pipe.headings, cfg.safe_stops);
    pipe.adg = build_adg(std::move(sequences), pipe.plan);

    if (!cfg.adg_dump_path.empty()) write_file(cfg.adg_dump_path, dump_adg_json(pipe.adg));

    result.cycle = check_acyclic(pipe.adg);
    if (!result.cycle.acyclic) {
        result.status = RunStatus::AdgCycle;
        std::string cycle_str;
        for (const auto& v : result.cycle.cycle) cycle_str += to_string(v);
        result.failure_reason = "ADG contains a cycle of length " +
                                std::to_string(result.cycle.cycle.size()) + ": " + cycle_str;
    }
    return result;
}

void write_artifacts(const RunConfig& cfg, const EmServer& server, const RunResult& result,
                     const std::vector<TraceRow>& trace) {
    if (!cfg.trace_path.empty()) write_file(cfg.trace_path, trace_to_csv(trace));
    if (!cfg.events_path.empty()) write_file(cfg.events_path, events_to_csv(server.events()));
    if (!cfg.metrics_path.empty()) write_file(cfg.metrics_path, metrics_to_json(result.metrics));
}

RunResult execute_inproc(const RunConfig& cfg, Pipeline& pipe, RunResult result) {
    const int n = pipe.plan.robot_count();
    const double dt = cfg.tick;

    EmServer server(std::move(pipe.adg));
    server.set_record_events(!cfg.events_path.empty() || cfg.keep_trace_in_memory);

    ControllerConfig controller = cfg.controller;
    controller.cell_size = cfg.cell_size;
    controller.cmd_latency_ticks = cfg.uncertainty.cmd_latency_ticks;
    controller.noise_margin = cfg.uncertainty.wheel_noise_sigma;

    World world(initial_robot_states(pipe.plan, pipe.headings, cfg.cell_size), controller, dt,
                cfg.uncertainty);

    std::vector<ExecutorCore> executors;
    executors.reserve(n);
    for (int i = 0; i < n; ++i)
        executors.emplace_back(i, controller, cfg.uncertainty.action_hold_max,
                               substream(cfg.uncertainty.seed, i, kHoldStream));

    InprocChannel channel(n);
    std::vector<WheelCommand> commands(n);
    std::vector<TraceRow> trace;
    const bool want_trace = !cfg.trace_path.empty() || cfg.keep_trace_in_memory;

    auto ingest = [&server, &channel, &trace](double now) {
        for (const Message& msg : channel.collect_for_server()) {
            if (const auto* done = std::get_if<DoneMsg>(&msg)) {
                for (EnqueueMsg& m : server.on_completion(*done, now))
                    channel.send_to_executor(m.robot, m);
            } else if (const auto* st = std::get_if<StateMsg>(&msg)) {
                trace.push_back({st->sim_time, st->robot, st->x, st->y, st->theta, st->v_l,
                                 st->v_r, st->queue_len});
            }
        }
    };

    auto wall_start = std::chrono::steady_clock::now();
    while (true) {
        const double now = world.sim_time();

        // Boundary delivery: executor traffic, then the server's reaction,
        // then fresh dispatches; enqueues reach executors this same
        // boundary so the whole loop advances in lockstep.
        ingest(now);
        if (server.is_complete()) break;
        for (EnqueueMsg& m : server.step_dispatch(now)) channel.send_to_executor(m.robot, m);

        for (int i = 0; i < n; ++i) {
            for (const Message& msg : channel.collect_for_executor(i)) {
                if (const auto* enq = std::get_if<EnqueueMsg>(&msg)) executors[i].enqueue(enq->action);
            }
            commands[i] = executors[i].tick(world.robot(i), dt);
        }

        world.tick(commands);
        const double after = world.sim_time();

        for (int i = 0; i < n; ++i) {
            for (int seq : executors[i].collect_completions(world.robot(i), dt)) {
                channel.send_to_server(DoneMsg{i, seq, after});
            }
            if (want_trace && cfg.trace_interval_ticks > 0 &&
                world.tick_count() % cfg.trace_interval_ticks == 0) {
                const RobotState& r = world.robot(i);
                channel.send_to_server(
                    StateMsg{i, r.x, r.y, r.theta,
                             left_wheel_speed(r.v, r.omega, controller.axle_length),
                             right_wheel_speed(r.v, r.omega, controller.axle_length),
                             executors[i].queue_length(), after});
            }
        }

        CollisionReport collisions = world.check_collisions(cfg.robot_radius);
        if (!collisions.empty()) {
            result.status = RunStatus::Collision;
            result.collision = collisions;
            result.failure_reason =
                "collision between robots " + std::to_string(collisions.pairs.front().robot_i) +
                " and " + std::to_string(collisions.pairs.front().robot_j) + " at sim time " +
                format_decimal(after);
            break;
        }

        if (auto stall = server.detect_stall(after, cfg.stall_threshold)) {
            result.status = RunStatus::Stall;
            result.failure_reason = "no status transition for " + format_decimal(stall->stalled_for) +
                                    " sim seconds (" +
                                    std::to_string(stall->enqueued_unfinished.size()) +
                                    " enqueued unfinished, " +
                                    std::to_string(stall->staged_ineligible.size()) +
                                    " staged ineligible)";
            break;
        }
        if (cfg.max_sim_time > 0.0 && after >= cfg.max_sim_time) {
            result.status = RunStatus::Stall;
            result.failure_reason = "max sim time exceeded";
            break;
        }
    }
    // Abort paths may leave the final tick's state messages undelivered.
    if (!server.is_complete()) ingest(world.sim_time());
    bool complete = server.is_complete();

    result.wall_seconds = wall_seconds_since(wall_start);
    result.sim_seconds = world.sim_time();
    result.metrics = finalize(server.completion_times(), result.sim_seconds, result.wall_seconds,
                              static_cast<int>(result.collision.pairs.size()), complete);
    result.enter_completion_order = server.enter_completion_order();
    result.final_states = world.robots();
    if (cfg.keep_trace_in_memory) result.trace = trace;

    write_artifacts(cfg, server, result, trace);
    return result;
}

RunResult execute_tcp(const RunConfig& cfg, Pipeline& pipe, RunResult result) {
    const int n = pipe.plan.robot_count();
    EmServer server(std::move(pipe.adg));
    server.set_record_events(!cfg.events_path.empty());

    TcpListener listener(resolve_port(cfg.port));
    if (cfg.on_tcp_bound) cfg.on_tcp_bound(listener.port());
    std::vector<std::unique_ptr<TcpConnection>> conns(n);
    int connected = 0;
    while (connected < n) {
        auto conn = listener.accept_connection();
        auto msgs = conn->wait_messages(30000);
        if (msgs.empty()) throw std::runtime_error("executor connected but sent no hello");
        const auto* hello = std::get_if<HelloMsg>(&msgs.front());
        if (!hello) throw std::runtime_error("expected hello as first message");
        if (hello->robot < 0 || hello->robot >= n || conns[hello->robot])
            throw std::runtime_error("bad hello robot id " + std::to_string(hello->robot));
        conns[hello->robot] = std::move(conn);
        ++connected;
    }

    ControllerConfig controller = cfg.controller;
    controller.cell_size = cfg.cell_size;
    controller.cmd_latency_ticks = cfg.uncertainty.cmd_latency_ticks;
    controller.noise_margin = cfg.uncertainty.wheel_noise_sigma;
    std::vector<RobotState> poses = initial_robot_states(pipe.plan, pipe.headings, cfg.cell_size);
    std::vector<TraceRow> trace;
    double latest_sim_time = 0.0;

    auto wall_start = std::chrono::steady_clock::now();
    auto last_progress_wall = wall_start;

    for (EnqueueMsg& m : server.step_dispatch(0.0)) conns[m.robot]->send_message(m);

    while (!server.is_complete()) {
        bool any = false;
        for (int i = 0; i < n; ++i) {
            for (const Message& msg : conns[i]->poll_messages()) {
                any = true;
                if (const auto* done = std::get_if<DoneMsg>(&msg)) {
                    latest_sim_time = std::max(latest_sim_time, done->sim_time);
                    for (EnqueueMsg& m : server.on_completion(*done, latest_sim_time))
                        conns[m.robot]->send_message(m);
                    last_progress_wall = std::chrono::steady_clock::now();
                } else if (const auto* st = std::get_if<StateMsg>(&msg)) {
                    latest_sim_time = std::max(latest_sim_time, st->sim_time);
                    poses[i].x = st->x;
                    poses[i].y = st->y;
                    poses[i].theta = st->theta;
                    if (!cfg.trace_path.empty())
                        trace.push_back({st->sim_time, st->robot, st->x, st->y, st->theta, st->v_l,
                                         st->v_r, st->queue_len});
                }
            }
            if (conns[i]->closed() && !server.is_complete())
                throw std::runtime_error("executor connection for robot " + std::to_string(i) +
                                         " closed mid-run");
        }
        for (EnqueueMsg& m : server.step_dispatch(latest_sim_time))
            conns[m.robot]->send_message(m);

        World collision_view(poses, controller, cfg.tick, {});
        CollisionReport collisions = collision_view.check_collisions(cfg.robot_radius);
        if (!collisions.empty()) {
            result.status = RunStatus::Collision;
            result.collision = collisions;
            result.failure_reason = "collision during TCP run";
            break;
        }

        // TCP executors clock themselves, so the stall watchdog runs on
        // wall time here.
        if (wall_seconds_since(last_progress_wall) > cfg.stall_threshold) {
            result.status = RunStatus::Stall;
            result.failure_reason = "no completion over the stall threshold (wall clock)";
            break;
        }
        if (!any) std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }

    for (int i = 0; i < n; ++i) {
        if (conns[i]) conns[i]->send_message(ShutdownMsg{});
    }

    result.wall_seconds = wall_seconds_since(wall_start);
    result.sim_seconds = latest_sim_time;
    result.metrics = finalize(server.completion_times(), result.sim_seconds, result.wall_seconds,
                              static_cast<int>(result.collision.pairs.size()), server.is_complete());
    result.enter_completion_order = server.enter_completion_order();
    std::sort(trace.begin(), trace.end(), [](const TraceRow& a, const TraceRow& b) {
        if (a.sim_time != b.sim_time) return a.sim_time < b.sim_time;
        return a.robot < b.robot;
    });
    write_artifacts(cfg, server, result, trace);
    return result;
}

}  // namespace

void apply_config_file(const std::string& path, RunConfig& cfg, int robot_count) {
    nlohmann::json j = nlohmann::json::parse(read_file(path));
    ControllerConfig& c = cfg.controller;
    c.v_max = j.value("v_max", c.v_max);
    c.a_max = j.value("a_max", c.a_max);
    c.omega_max_deg = j.value("omega_max_deg", c.omega_max_deg);
    c.kp = j.value("kp", c.kp);
    c.ki = j.value("ki", c.ki);
    c.kd = j.value("kd", c.kd);
    c.pos_tol = j.value("pos_tol", c.pos_tol);
    c.heading_tol_deg = j.value("heading_tol_deg", c.heading_tol_deg);
    c.axle_length = j.value("axle_length", c.axle_length);
    cfg.robot_radius = j.value("robot_radius", cfg.robot_radius);

    std::string def = j.value("initial_heading", std::string("N"));
    cfg.initial_headings.assign(std::max(robot_count, 0), orientation_from_char(def[0]));
    if (j.contains("initial_headings")) {
        for (const auto& [key, val] : j["initial_headings"].items()) {
            int robot = std::stoi(key);
            if (robot < 0 || robot >= robot_count)
                throw std::runtime_error("initial_headings: unknown robot " + key);
            std::string h = val.get<std::string>();
            if (h.size() != 1) throw std::runtime_error("initial_headings: bad heading " + h);
            cfg.initial_headings[robot] = orientation_from_char(h[0]);
        }
    }
}

RunResult run_simulation(const RunConfig& cfg) {
    RunResult result;
    try {
        if (cfg.tick <= 0.0) throw std::runtime_error("tick must be positive");
        if (cfg.cell_size <= 0.0) throw std::runtime_error("cell size must be positive");
        if (cfg.stall_threshold <= 0.0) throw std::runtime_error("stall threshold must be positive");
        if (cfg.robot_radius <= 0.0) throw std::runtime_error("robot radius must be positive");
        if (cfg.robot_radius > 0.25 * cfg.cell_size + 1e-12)
            throw std::runtime_error("robot radius must be at most 0.25 * cell size");
        if (cfg.uncertainty.wheel_noise_sigma < 0.0 || cfg.uncertainty.action_hold_max < 0.0 ||
            cfg.uncertainty.cmd_latency_ticks < 0)
            throw std::runtime_error("uncertainty parameters must be non-negative");

        Pipeline pipe;
        result = prepare(cfg, pipe);
        if (result.status != RunStatus::Success) return result;
        if (cfg.transport == TransportKind::Tcp) return execute_tcp(cfg, pipe, std::move(result));
        return execute_inproc(cfg, pipe, std::move(result));
    } catch (const std::exception& e) {
        result.status = RunStatus::IoError;
        result.failure_reason = e.what();
        return result;
    }
}

int resolve_port(int cli_port) {
    // SMART_PORT overrides the command-line choice.
    if (const char* env = std::getenv("SMART_PORT")) {
        try {
            return std::stoi(env);
        } catch (...) {
            throw std::runtime_error("SMART_PORT is not a number");
        }
    }
    return cli_port;
}

void run_executor_pool(const ExecutorPoolOptions& opts) {
    std::vector<std::thread> threads;
    threads.reserve(opts.robots.size());
    std::mutex error_mutex;
    std::string first_error;
    auto note_error = [&error_mutex, &first_error](const std::string& what) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error.empty()) first_error = what;
    };
    for (int robot : opts.robots) {
        threads.emplace_back([&opts, &note_error, robot]() {
          try {
            auto conn = TcpConnection::connect_to(opts.host, opts.port);
            conn->send_message(HelloMsg{robot});

            ControllerConfig controller = opts.controller;
            controller.cmd_latency_ticks = opts.uncertainty.cmd_latency_ticks;
            controller.noise_margin = opts.uncertainty.wheel_noise_sigma;
            const double dt = opts.tick;
            std::vector<RobotState> start =
                initial_robot_states(opts.plan, opts.initial_headings, controller.cell_size);
            World world({start[robot]}, controller, dt, opts.uncertainty, {robot});
            ExecutorCore core(robot, controller, opts.uncertainty.action_hold_max,
                              substream(opts.uncertainty.seed, robot, kHoldStream));

            bool shutdown = false;
            while (!shutdown) {
                // Block when idle; otherwise just drain whatever arrived.
                auto msgs = core.idle() ? conn->wait_messages(50) : conn->poll_messages();
                for (const Message& msg : msgs) {
                    if (const auto* enq = std::get_if<EnqueueMsg>(&msg)) {
                        core.enqueue(enq->action);
                    } else if (std::holds_alternative<ShutdownMsg>(msg)) {
                        shutdown = true;
                    }
                }
                if (shutdown) break;
                if (conn->closed()) throw std::runtime_error("server closed connection");
                if (core.idle()) continue;

                WheelCommand cmd = core.tick(world.robot(0), dt);
                world.tick({cmd});
                double now = world.sim_time();
                for (int seq : core.collect_completions(world.robot(0), dt))
                    conn->send_message(DoneMsg{robot, seq, now});
                const RobotState& r = world.robot(0);
                conn->send_message(StateMsg{robot, r.x, r.y, r.theta,
                                            left_wheel_speed(r.v, r.omega, controller.axle_length),
                                            right_wheel_speed(r.v, r.omega, controller.axle_length),
                                            core.queue_length(), now});
            }
          } catch (const std::exception& e) {
              note_error("executor " + std::to_string(robot) + ": " + e.what());
          }
        });
    }
    for (auto& t : threads) t.join();
    if (!first_error.empty()) throw std::runtime_error(first_error);
}

}  // namespace smart
