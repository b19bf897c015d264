#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smart/run.hpp"

namespace {

std::vector<int> parse_robot_list(const std::string& list, int robot_count) {
    std::vector<int> robots;
    if (list.empty()) {
        for (int i = 0; i < robot_count; ++i) robots.push_back(i);
        return robots;
    }
    size_t pos = 0;
    while (pos < list.size()) {
        size_t comma = list.find(',', pos);
        std::string tok =
            list.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        size_t dash = tok.find('-');
        if (dash == std::string::npos) {
            robots.push_back(std::stoi(tok));
        } else {
            int lo = std::stoi(tok.substr(0, dash));
            int hi = std::stoi(tok.substr(dash + 1));
            for (int i = lo; i <= hi; ++i) robots.push_back(i);
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return robots;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MAPF plan execution testbed: ADG-monitored kinodynamic simulation"};
    app.require_subcommand(1);

    smart::RunConfig cfg;
    std::string scen_path;
    std::uint64_t seed = 0;
    int latency_ticks = 0;
    double noise_sigma = 0.0;
    double hold_max = 0.0;
    std::string transport = "inproc";
    bool no_safe_stops = false;

    auto* run = app.add_subcommand("run", "execute a MAPF plan to completion");
    run->add_option("--map", cfg.map_path, "MovingAI .map file")->required();
    run->add_option("--scen", cfg.scen_path, "MovingAI .scen file to cross-check the plan against");
    run->add_option("--plan", cfg.plan_path, "timed plan file: '<id>: (x,y,t);...'")->required();
    run->add_option("--config", cfg.config_path, "JSON controller/robot configuration");
    run->add_option("--seed", seed, "RNG seed for execution uncertainty");
    run->add_option("--tick", cfg.tick, "simulation update period, seconds")->default_val(0.1);
    run->add_option("--cell-size", cfg.cell_size, "meters per grid cell")->default_val(1.0);
    run->add_option("--transport", transport, "inproc|tcp")->default_val("inproc");
    run->add_option("--port", cfg.port, "TCP port (SMART_PORT overrides)")->default_val(8571);
    run->add_flag("--no-safe-stops", no_safe_stops,
                  "compile whole moves without boundary safe stops");
    run->add_option("--latency-ticks", latency_ticks, "command transport delay in ticks");
    run->add_option("--noise-sigma", noise_sigma, "multiplicative wheel noise std-dev");
    run->add_option("--hold-max", hold_max, "max uniform pre-action hold, seconds");
    run->add_option("--radius", cfg.robot_radius, "robot radius, meters")->default_val(0.2);
    run->add_option("--out", cfg.metrics_path, "metrics JSON output path");
    run->add_option("--trace", cfg.trace_path, "trace CSV output path");
    run->add_option("--trace-interval", cfg.trace_interval_ticks,
                    "sample the trace every N ticks (0 disables)")->default_val(1);
    run->add_option("--adg-dump", cfg.adg_dump_path, "ADG JSON dump path");
    run->add_option("--events", cfg.events_path, "status-transition event log CSV path");
    run->add_option("--max-sim-time", cfg.max_sim_time, "abort after this many sim seconds (0 = off)");
    run->add_option("--stall-threshold", cfg.stall_threshold,
                    "sim seconds without progress before a stall is declared")->default_val(300.0);

    std::string exec_host = "127.0.0.1";
    std::string exec_robots;
    std::string exec_plan_path;
    std::string exec_config_path;
    int exec_port = 8571;
    double exec_tick = 0.1;
    double exec_cell = 1.0;
    std::uint64_t exec_seed = 0;
    int exec_latency = 0;
    double exec_sigma = 0.0;
    double exec_hold = 0.0;

    auto* exec = app.add_subcommand("exec", "run a pool of TCP executors");
    exec->add_option("--host", exec_host, "server host")->default_val("127.0.0.1");
    exec->add_option("--port", exec_port, "server port (SMART_PORT overrides)")->default_val(8571);
    exec->add_option("--plan", exec_plan_path, "plan file (for start poses)")->required();
    exec->add_option("--robots", exec_robots, "ids to serve, e.g. 0-4 or 1,3,5 (default: all)");
    exec->add_option("--config", exec_config_path, "JSON controller/robot configuration");
    exec->add_option("--tick", exec_tick, "local tick, seconds")->default_val(0.1);
    exec->add_option("--cell-size", exec_cell, "meters per grid cell")->default_val(1.0);
    exec->add_option("--seed", exec_seed, "RNG seed");
    exec->add_option("--latency-ticks", exec_latency, "command transport delay in ticks");
    exec->add_option("--noise-sigma", exec_sigma, "multiplicative wheel noise std-dev");
    exec->add_option("--hold-max", exec_hold, "max uniform pre-action hold, seconds");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            cfg.uncertainty.seed = seed;
            cfg.uncertainty.cmd_latency_ticks = latency_ticks;
            cfg.uncertainty.wheel_noise_sigma = noise_sigma;
            cfg.uncertainty.action_hold_max = hold_max;
            cfg.safe_stops = !no_safe_stops;
            if (transport == "tcp")
                cfg.transport = smart::TransportKind::Tcp;
            else if (transport != "inproc") {
                std::fprintf(stderr, "unknown transport '%s'\n", transport.c_str());
                return 6;
            }
            if (!cfg.config_path.empty()) {
                smart::PlanSet plan = smart::load_plan_file(cfg.plan_path);
                smart::apply_config_file(cfg.config_path, cfg, plan.robot_count());
                cfg.plan = std::move(plan);
            }

            smart::RunResult result = smart::run_simulation(cfg);
            if (result.ok()) {
                std::printf("success: %d robots, aet=%s max_exec=%s sim_speed=%s\n",
                            static_cast<int>(result.metrics.per_robot.size()),
                            smart::format_decimal(result.metrics.aet).c_str(),
                            smart::format_decimal(result.metrics.max_exec).c_str(),
                            smart::format_decimal(result.metrics.sim_speed).c_str());
            } else {
                std::fprintf(stderr, "run failed (%d): %s\n", static_cast<int>(result.status),
                             result.failure_reason.c_str());
            }
            return static_cast<int>(result.status);
        }

        // exec subcommand
        smart::ExecutorPoolOptions opts;
        opts.host = exec_host;
        opts.port = smart::resolve_port(exec_port);
        opts.plan = smart::load_plan_file(exec_plan_path);
        opts.tick = exec_tick;
        opts.controller.cell_size = exec_cell;
        opts.uncertainty.seed = exec_seed;
        opts.uncertainty.cmd_latency_ticks = exec_latency;
        opts.uncertainty.wheel_noise_sigma = exec_sigma;
        opts.uncertainty.action_hold_max = exec_hold;
        if (!exec_config_path.empty()) {
            smart::RunConfig tmp;
            smart::apply_config_file(exec_config_path, tmp, opts.plan.robot_count());
            opts.controller = tmp.controller;
            opts.controller.cell_size = exec_cell;
            opts.initial_headings = tmp.initial_headings;
        }
        opts.robots = parse_robot_list(exec_robots, opts.plan.robot_count());
        smart::run_executor_pool(opts);
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 6;
    }
}
