#include "smart/world.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "smart/plan.hpp"

namespace smart {

World::World(std::vector<RobotState> robots, const ControllerConfig& cfg, double tick_seconds,
             const UncertaintyConfig& uc, std::vector<int> robot_ids)
    : robots_(std::move(robots)), tick_(tick_seconds), cfg_(cfg), uc_(uc) {
    if (tick_ <= 0.0) throw std::invalid_argument("tick must be positive");
    if (robot_ids.empty()) {
        robot_ids.resize(robots_.size());
        for (size_t i = 0; i < robot_ids.size(); ++i) robot_ids[i] = static_cast<int>(i);
    }
    if (robot_ids.size() != robots_.size())
        throw std::invalid_argument("robot_ids size mismatch");
    latency_queues_.resize(robots_.size());
    noise_streams_.reserve(robots_.size());
    for (size_t i = 0; i < robots_.size(); ++i)
        noise_streams_.push_back(substream(uc_.seed, static_cast<std::uint64_t>(robot_ids[i]), kNoiseStream));
}

void World::tick(const std::vector<WheelCommand>& commands) {
    if (commands.size() != robots_.size())
        throw std::invalid_argument("one command per robot required");

    for (size_t i = 0; i < robots_.size(); ++i) {
        RobotState& r = robots_[i];

        WheelCommand cmd = commands[i];
        if (uc_.cmd_latency_ticks > 0) {
            auto& q = latency_queues_[i];
            q.push_back(cmd);
            if (static_cast<int>(q.size()) > uc_.cmd_latency_ticks) {
                cmd = q.front();
                q.pop_front();
            } else {
                cmd = {0.0, 0.0};  // nothing commanded yet
            }
        }

        double v_lo = std::max(0.0, r.v - cfg_.a_max * tick_);
        double v_hi = std::min(cfg_.v_max, r.v + cfg_.a_max * tick_);
        double v = std::clamp(cmd.v, v_lo, v_hi);
        double omega = std::clamp(cmd.omega, -cfg_.omega_max(), cfg_.omega_max());

        if (uc_.wheel_noise_sigma > 0.0) {
            // Noise multiplies the commanded values, then the hard limits
            // are re-imposed so the kinematic bounds stay invariant.
            double fv = 1.0 + uc_.wheel_noise_sigma * noise_streams_[i].normal();
            double fw = 1.0 + uc_.wheel_noise_sigma * noise_streams_[i].normal();
            v = std::clamp(v * fv, v_lo, v_hi);
            omega = std::clamp(omega * fw, -cfg_.omega_max(), cfg_.omega_max());
        }

        r.v = v;
        r.omega = omega;
        r.x += v * std::cos(r.theta) * tick_;
        r.y += v * std::sin(r.theta) * tick_;
        r.theta = wrap_angle(r.theta + omega * tick_);
    }
    ++tick_count_;
}

CollisionReport World::check_collisions(double radius) const {
    if (radius <= 0.0) throw std::invalid_argument("radius must be positive");
    CollisionReport report;
    const double diameter = 2.0 * radius;
    const double cell = diameter;

    // Spatial hash broad phase: a colliding pair is at most one bucket
    // apart in each axis.
    std::unordered_map<std::int64_t, std::vector<int>> buckets;
    auto bucket_key = [cell](double x, double y) {
        auto bx = static_cast<std::int64_t>(std::floor(x / cell));
        auto by = static_cast<std::int64_t>(std::floor(y / cell));
        return bx * 0x100000001LL + by;
    };
    for (size_t i = 0; i < robots_.size(); ++i)
        buckets[bucket_key(robots_[i].x, robots_[i].y)].push_back(static_cast<int>(i));

    double now = sim_time();
    for (size_t i = 0; i < robots_.size(); ++i) {
        auto bx = static_cast<std::int64_t>(std::floor(robots_[i].x / cell));
        auto by = static_cast<std::int64_t>(std::floor(robots_[i].y / cell));
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                auto it = buckets.find((bx + dx) * 0x100000001LL + (by + dy));
                if (it == buckets.end()) continue;
                for (int j : it->second) {
                    if (j <= static_cast<int>(i)) continue;
                    double ddx = robots_[i].x - robots_[j].x;
                    double ddy = robots_[i].y - robots_[j].y;
                    double dist = std::sqrt(ddx * ddx + ddy * ddy);
                    if (dist < diameter)
                        report.pairs.push_back({static_cast<int>(i), j, dist, now});
                }
            }
        }
    }
    std::sort(report.pairs.begin(), report.pairs.end(), [](const CollisionPair& a, const CollisionPair& b) {
        if (a.robot_i != b.robot_i) return a.robot_i < b.robot_i;
        return a.robot_j < b.robot_j;
    });
    return report;
}

double hold_delay(const UncertaintyConfig& uc, Xoshiro256pp& rng) {
    if (uc.action_hold_max <= 0.0) return 0.0;
    return rng.uniform(0.0, uc.action_hold_max);
}

std::vector<RobotState> initial_robot_states(const PlanSet& plan,
                                             const std::vector<Orientation>& headings,
                                             double cell_size) {
    std::vector<RobotState> states;
    states.reserve(plan.paths.size());
    for (const auto& path : plan.paths) {
        if (path.waypoints.empty()) throw std::runtime_error("empty path");
        RobotState s;
        Vec2 c = cell_center(path.waypoints.front().cell, cell_size);
        s.x = c.x;
        s.y = c.y;
        Orientation h = headings.empty() ? Orientation::North : headings[path.robot_id];
        s.theta = orientation_theta(h);
        states.push_back(s);
    }
    return states;
}

}  // namespace smart
