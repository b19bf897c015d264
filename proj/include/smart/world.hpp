#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "smart/executor.hpp"
#include "smart/plan.hpp"
#include "smart/rng.hpp"

namespace smart {

// Execution uncertainty knobs. All randomness is drawn from substreams of
// `seed` (see rng.hpp), so identical configurations replay bit-exactly.
struct UncertaintyConfig {
    std::uint64_t seed = 0;
    int cmd_latency_ticks = 0;        // command transport delay, in ticks
    double wheel_noise_sigma = 0.0;   // multiplicative N(1, sigma^2) on (v, omega)
    double action_hold_max = 0.0;     // uniform [0, max] pre-command hold, seconds
};

struct CollisionPair {
    int robot_i = 0;
    int robot_j = 0;
    double distance = 0.0;
    double sim_time = 0.0;
};

struct CollisionReport {
    std::vector<CollisionPair> pairs;

    bool empty() const { return pairs.empty(); }
};

// Deterministic discrete-time kinodynamic world. Commands pass through a
// per-robot latency queue, get clamped to the velocity/acceleration
// limits, are perturbed by multiplicative wheel noise, re-clamped, and
// integrated with unicycle kinematics.
class World {
public:
    World() = default;
    // robot_ids name the global ids behind each slot (defaults to
    // 0..n-1); noise substreams are derived from them, so a one-robot
    // world for robot r perturbs identically to slot r of the full world.
    World(std::vector<RobotState> robots, const ControllerConfig& cfg, double tick_seconds,
          const UncertaintyConfig& uc, std::vector<int> robot_ids = {});

    void tick(const std::vector<WheelCommand>& commands);

    CollisionReport check_collisions(double radius) const;

    double sim_time() const { return tick_count_ * tick_; }
    std::int64_t tick_count() const { return tick_count_; }
    double tick_seconds() const { return tick_; }
    const std::vector<RobotState>& robots() const { return robots_; }
    const RobotState& robot(int i) const { return robots_[i]; }
    int robot_count() const { return static_cast<int>(robots_.size()); }

private:
    std::vector<RobotState> robots_;
    double tick_ = 0.1;
    std::int64_t tick_count_ = 0;
    ControllerConfig cfg_;
    UncertaintyConfig uc_;
    std::vector<std::deque<WheelCommand>> latency_queues_;
    std::vector<Xoshiro256pp> noise_streams_;
};

// Uniform pre-action hold in [0, action_hold_max] seconds.
double hold_delay(const UncertaintyConfig& uc, Xoshiro256pp& rng);

// Initial world state: every robot at its start cell center facing its
// initial heading, at rest.
std::vector<RobotState> initial_robot_states(const PlanSet& plan,
                                             const std::vector<Orientation>& headings,
                                             double cell_size);

}  // namespace smart
