#include "smart/executor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smart {

namespace {

// Exact continuity test in half-cell integer units: every half-move
// endpoint sits on the half-cell lattice.
struct HalfCellPoint {
    int x = 0;
    int y = 0;

    bool operator==(const HalfCellPoint&) const = default;
};

HalfCellPoint start_half(const Action& a) {
    Cell d = delta(a.toward);
    if (a.kind == ActionKind::MoveEnter) return {2 * a.into.x + 1 - d.x, 2 * a.into.y + 1 - d.y};
    return {2 * a.from.x + 1, 2 * a.from.y + 1};
}

HalfCellPoint end_half(const Action& a) {
    Cell d = delta(a.toward);
    if (a.kind == ActionKind::MoveExit && !a.unsplit)
        return {2 * a.from.x + 1 + d.x, 2 * a.from.y + 1 + d.y};
    return {2 * a.into.x + 1, 2 * a.into.y + 1};
}

Orientation nearest_cardinal(double theta) {
    Orientation best = Orientation::East;
    double best_err = 1e9;
    for (Orientation o : {Orientation::North, Orientation::East, Orientation::South,
                          Orientation::West}) {
        double err = std::fabs(wrap_angle(orientation_theta(o) - theta));
        if (err < best_err) {
            best_err = err;
            best = o;
        }
    }
    return best;
}

}  // namespace

MergedCommand merge_head(std::deque<Action>& queue, const ControllerConfig& cfg,
                         double current_theta) {
    if (queue.empty()) throw std::logic_error("merge_head on empty queue");
    MergedCommand cmd;
    const Action& head = queue.front();
    if (head.kind == ActionKind::Rotate) {
        cmd.kind = MergedCommand::Kind::Turn;
        cmd.angle_deg = head.angle_deg;
        // Target the nominal cardinal heading so drift never accumulates.
        Orientation base = nearest_cardinal(current_theta);
        cmd.target_theta = wrap_angle(orientation_theta(base) + head.angle_deg * M_PI / 180.0);
        cmd.covered.push_back({head.seq, {}, 0.0, false});
        queue.pop_front();
        return cmd;
    }

    cmd.kind = MergedCommand::Kind::Forward;
    cmd.heading = head.toward;
    cmd.origin = head.start_point(cfg.cell_size);
    HalfCellPoint start = start_half(head);
    cmd.end_lattice_x = start.x;
    cmd.end_lattice_y = start.y;
    extend_forward(cmd, queue, cfg);
    return cmd;
}

int extend_forward(MergedCommand& cmd, std::deque<Action>& queue, const ControllerConfig& cfg) {
    if (cmd.kind != MergedCommand::Kind::Forward) return 0;
    HalfCellPoint cursor{cmd.end_lattice_x, cmd.end_lattice_y};
    int absorbed = 0;
    while (!queue.empty()) {
        const Action& a = queue.front();
        if (!a.is_move() || a.toward != cmd.heading || start_half(a) != cursor) break;
        cmd.distance += a.length(cfg.cell_size);
        cursor = end_half(a);
        cmd.covered.push_back({a.seq, a.end_point(cfg.cell_size), cmd.distance, false});
        queue.pop_front();
        ++absorbed;
    }
    cmd.end_lattice_x = cursor.x;
    cmd.end_lattice_y = cursor.y;
    return absorbed;
}

WheelCommand control_step(const RobotState& state, const MergedCommand& cmd,
                          const ControllerConfig& cfg, double dt, ControlState& ctl) {
    if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
    WheelCommand out;
    if (cmd.kind == MergedCommand::Kind::Turn) {
        double theta_pred = state.theta + ctl.pending_rotation(dt);
        double remaining = wrap_angle(cmd.target_theta - theta_pred);
        out.omega = std::clamp(remaining / dt, -cfg.omega_max(), cfg.omega_max());
        out.v = 0.0;
        return out;
    }

    Cell d = delta(cmd.heading);
    double along = (state.x - cmd.origin.x) * d.x + (state.y - cmd.origin.y) * d.y;
    // Brake against the distance left once the in-flight commands land.
    double remaining = cmd.distance - along - ctl.pending_travel(state.v, cfg.a_max, dt);

    // Discrete-time trapezoid: the largest multiple of a_brake*dt whose
    // tick-quantized braking distance still fits in `remaining`. This
    // keeps v^2 <= 2*a_max*remaining and lands at rest on the target
    // instead of carrying residual speed across it; a_brake derates the
    // curve by the configured noise margin.
    double v_target = 0.0;
    if (remaining > 0.0) {
        double ab = cfg.brake_accel();
        double steps = std::floor((std::sqrt(1.0 + 8.0 * remaining / (ab * dt * dt)) - 1.0) / 2.0);
        v_target = std::min(cfg.noise_speed_cap(dt), ab * dt * steps);
    }
    double base = ctl.v_base(state, cfg.a_max, dt);
    out.v = std::clamp(v_target, base - cfg.a_max * dt, base + cfg.a_max * dt);
    out.v = std::max(0.0, out.v);

    // Steer toward a look-ahead point on the motion axis.
    double lookahead = 0.5 * cfg.cell_size;
    Vec2 proj{cmd.origin.x + along * d.x, cmd.origin.y + along * d.y};
    Vec2 carrot{proj.x + lookahead * d.x, proj.y + lookahead * d.y};
    double desired = std::atan2(carrot.y - state.y, carrot.x - state.x);
    double err = wrap_angle(desired - state.theta);
    ctl.pid_integral += err * dt;
    double deriv = (err - ctl.pid_prev_error) / dt;
    ctl.pid_prev_error = err;
    double omega = cfg.kp * err + cfg.ki * ctl.pid_integral + cfg.kd * deriv;
    out.omega = std::clamp(omega, -cfg.omega_max(), cfg.omega_max());
    return out;
}

std::vector<int> check_waypoints(const RobotState& state, MergedCommand& cmd,
                                 const ControllerConfig& cfg, double dt) {
    std::vector<int> done;
    if (cmd.kind == MergedCommand::Kind::Turn) {
        double remaining = wrap_angle(cmd.target_theta - state.theta);
        if (std::fabs(remaining) <= cfg.heading_tol()) {
            for (auto& w : cmd.covered) {
                if (!w.reported) {
                    w.reported = true;
                    done.push_back(w.seq);
                }
            }
        }
        return done;
    }

    Cell d = delta(cmd.heading);
    double along = (state.x - cmd.origin.x) * d.x + (state.y - cmd.origin.y) * d.y;
    for (size_t i = 0; i < cmd.covered.size(); ++i) {
        auto& w = cmd.covered[i];
        if (w.reported) continue;
        bool crossed = along >= w.along - 1e-9;
        bool last = i + 1 == cmd.covered.size();
        // The final waypoint also completes once the speed profile has
        // wound down inside the position tolerance; reporting it at
        // pos_tol while still moving would skew completion times.
        bool settled = last && (cmd.distance - along) <= cfg.pos_tol &&
                       state.v <= cfg.a_max * dt + 1e-9;
        if (crossed || settled) {
            w.reported = true;
            done.push_back(w.seq);
        } else {
            break;  // strictly in order
        }
    }
    return done;
}

double profile_duration(double d, double v_max, double a_max) {
    if (d < 0.0) throw std::invalid_argument("negative distance");
    if (d == 0.0) return 0.0;
    if (d >= v_max * v_max / a_max) return d / v_max + v_max / a_max;
    return 2.0 * std::sqrt(d / a_max);
}

void ExecutorCore::enqueue(const Action& action) {
    if (!queue_.empty() && action.seq <= queue_.back().seq)
        throw std::logic_error("enqueue out of order for robot " + std::to_string(robot_id_));
    queue_.push_back(action);
}

WheelCommand ExecutorCore::tick(const RobotState& state, double dt) {
    if (!active_ && !queue_.empty()) {
        if (!hold_drawn_) {
            hold_remaining_ = hold_max_ > 0.0 ? hold_rng_.uniform(0.0, hold_max_) : 0.0;
            hold_drawn_ = true;
        }
        if (hold_remaining_ > 0.0) {
            hold_remaining_ -= dt;
        } else {
            active_ = merge_head(queue_, cfg_, state.theta);
            ctl_.pid_prev_error = 0.0;
            ctl_.pid_integral = 0.0;
        }
    } else if (active_ && active_->kind == MergedCommand::Kind::Forward) {
        extend_forward(*active_, queue_, cfg_);
    }

    WheelCommand out{0.0, 0.0};  // idle or holding; the world ramps v down
    if (active_) out = control_step(state, *active_, cfg_, dt, ctl_);
    ctl_.record(out, cfg_.cmd_latency_ticks);
    return out;
}

std::vector<int> ExecutorCore::collect_completions(const RobotState& state, double dt) {
    if (!active_) return {};
    std::vector<int> done = check_waypoints(state, *active_, cfg_, dt);
    if (active_->all_reported()) {
        active_.reset();
        hold_drawn_ = false;
    }
    return done;
}

int ExecutorCore::active_covered_pending() const {
    if (!active_) return 0;
    int n = 0;
    for (const auto& w : active_->covered) n += w.reported ? 0 : 1;
    return n;
}

}  // namespace smart
