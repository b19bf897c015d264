#pragma once

#include <algorithm>
#include <deque>
#include <optional>
#include <vector>

#include "smart/actions.hpp"
#include "smart/geometry.hpp"
#include "smart/rng.hpp"

namespace smart {

struct ControllerConfig {
    double v_max = 5.0;            // m/s
    double a_max = 0.4;            // m/s^2
    double omega_max_deg = 30.0;   // deg/s
    double kp = 2.0;               // per radian of heading error
    double ki = 0.0;
    double kd = 0.1;
    double pos_tol = 0.05;         // m
    double heading_tol_deg = 2.0;  // deg
    double cell_size = 1.0;        // m per cell
    double axle_length = 0.14;     // m, wheel separation for v_l/v_r reports
    // Known command transport delay. The controller brakes against the
    // pose it will have once the in-flight commands land; without this a
    // delayed turn hunts around its target and a delayed forward carries
    // speed past its endpoint.
    int cmd_latency_ticks = 0;
    // Wheel noise level the braking plan must tolerate. Multiplicative
    // noise re-clamped to the acceleration window only ever weakens
    // braking (downward draws clamp against the deceleration floor,
    // upward draws pass), and the lost deceleration grows with speed.
    // Under noise the controller therefore cruises slower and brakes
    // against a derated curve.
    double noise_margin = 0.0;

    double brake_accel() const { return a_max / (1.0 + 20.0 * noise_margin); }
    double noise_speed_cap(double dt) const {
        if (noise_margin <= 0.0) return v_max;
        return std::min(v_max, a_max * dt / (1.6 * noise_margin));
    }

    double omega_max() const { return omega_max_deg * M_PI / 180.0; }
    double heading_tol() const { return heading_tol_deg * M_PI / 180.0; }
};

// Continuous state of one robot as seen by its controller.
struct RobotState {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
    double v = 0.0;      // linear speed, >= 0
    double omega = 0.0;  // rad/s
};

struct WheelCommand {
    double v = 0.0;
    double omega = 0.0;
};

inline double left_wheel_speed(double v, double omega, double axle) { return v - omega * axle / 2; }
inline double right_wheel_speed(double v, double omega, double axle) { return v + omega * axle / 2; }

// A waypoint inside a merged command: the pose at which the constituent
// action with this seq is individually complete.
struct CommandWaypoint {
    int seq = 0;
    Vec2 point;       // Forward: end point; Turn: unused
    double along = 0.0;  // Forward: cumulative distance from command start
    bool reported = false;
};

struct MergedCommand {
    enum class Kind { Forward, Turn } kind = Kind::Forward;
    // Forward
    Orientation heading = Orientation::North;
    Vec2 origin;            // start point of the first constituent half
    double distance = 0.0;  // total length; grows when extended
    int end_lattice_x = 0;  // current end point in half-cell units, for
    int end_lattice_y = 0;  // exact continuity checks when extending
    // Turn
    double target_theta = 0.0;
    int angle_deg = 0;

    std::vector<CommandWaypoint> covered;

    bool all_reported() const {
        for (const auto& w : covered)
            if (!w.reported) return false;
        return true;
    }
};

// Pop the longest mergeable prefix of the queue into one command:
// consecutive colinear move halves become a single Forward, a rotation is
// returned alone as a Turn. The queue loses exactly the consumed prefix.
MergedCommand merge_head(std::deque<Action>& queue, const ControllerConfig& cfg,
                         double current_theta);

// Try to extend an active Forward with further colinear halves from the
// queue front. Returns the number of actions absorbed.
int extend_forward(MergedCommand& cmd, std::deque<Action>& queue, const ControllerConfig& cfg);

// Controller memory between ticks: PID terms plus the commands still in
// flight toward the simulator, so ramps and braking can anticipate the
// transport delay instead of fighting it.
struct ControlState {
    double pid_prev_error = 0.0;
    double pid_integral = 0.0;
    std::deque<double> pending_v;      // issued but not yet applied
    std::deque<double> pending_omega;

    // Worst-case distance covered while the pending commands land: the
    // applied speed can never fall faster than a_max*dt per tick, no
    // matter what was commanded.
    double pending_travel(double v_now, double a_max, double dt) const {
        double s = 0.0;
        int i = 1;
        for (double v : pending_v) s += std::max(v, v_now - i++ * a_max * dt) * dt;
        return s;
    }
    double pending_rotation(double dt) const {
        double s = 0.0;
        for (double w : pending_omega) s += w * dt;
        return s;
    }
    void record(const WheelCommand& cmd, int latency_ticks) {
        pending_v.push_back(cmd.v);
        pending_omega.push_back(cmd.omega);
        while (static_cast<int>(pending_v.size()) > latency_ticks) pending_v.pop_front();
        while (static_cast<int>(pending_omega.size()) > latency_ticks) pending_omega.pop_front();
    }
    // Ramp base: the newest in-flight command, or the measured speed once
    // everything issued has landed. Never below what the robot can have
    // decelerated to by the time this command lands.
    double v_base(const RobotState& s, double a_max, double dt) const {
        if (pending_v.empty()) return s.v;
        return std::max(pending_v.back(), s.v - a_max * dt * static_cast<double>(pending_v.size()));
    }
};

// One control tick. Turn: rotate in place at up to omega_max, tapering to
// land within tolerance. Forward: trapezoidal speed profile limited by
// v_max/a_max with v^2 <= 2*a_max*remaining, heading held to the motion
// axis by PID steering toward a look-ahead point on the line. Both
// branches aim at the pose predicted after the in-flight commands land.
WheelCommand control_step(const RobotState& state, const MergedCommand& cmd,
                          const ControllerConfig& cfg, double dt, ControlState& ctl);

// Newly completed constituent seq values, in order. Intermediate forward
// waypoints complete when the along-axis coordinate passes them; the final
// one completes on crossing, or within pos_tol once the speed profile has
// wound down. Turns complete within heading_tol.
std::vector<int> check_waypoints(const RobotState& state, MergedCommand& cmd,
                                 const ControllerConfig& cfg, double dt);

// Closed-form duration of the trapezoidal profile over distance d from
// rest to rest: d/v_max + v_max/a_max when the plateau is reached
// (d >= v_max^2/a_max), else 2*sqrt(d/a_max).
double profile_duration(double d, double v_max, double a_max);

// Per-robot action queue plus the currently active merged command.
// Dispatched actions wait here in FIFO order; an optional uniform random
// hold delays the start of each merged command.
class ExecutorCore {
public:
    ExecutorCore() = default;
    ExecutorCore(int robot_id, const ControllerConfig& cfg, double hold_max, Xoshiro256pp hold_rng)
        : robot_id_(robot_id), cfg_(cfg), hold_max_(hold_max), hold_rng_(hold_rng) {}

    void enqueue(const Action& action);

    // Advance command management by one tick and produce the wheel
    // command for the current state. Completion is checked separately
    // (after the world integrates) via collect_completions.
    WheelCommand tick(const RobotState& state, double dt);

    // Check the active command against the new pose; returns the seq
    // values completed this tick, in order.
    std::vector<int> collect_completions(const RobotState& state, double dt);

    int queue_length() const { return static_cast<int>(queue_.size()) + active_covered_pending(); }
    bool idle() const { return !active_ && queue_.empty(); }
    const std::optional<MergedCommand>& active() const { return active_; }

private:
    int active_covered_pending() const;

    int robot_id_ = 0;
    ControllerConfig cfg_;
    double hold_max_ = 0.0;
    Xoshiro256pp hold_rng_;
    std::deque<Action> queue_;
    std::optional<MergedCommand> active_;
    double hold_remaining_ = 0.0;
    bool hold_drawn_ = false;
    ControlState ctl_;
};

}  // namespace smart
