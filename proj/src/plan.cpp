#include "smart/plan.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace smart {

Cell PlanPath::cell_at(int t) const {
    if (waypoints.empty()) throw std::logic_error("cell_at on empty path");
    // Waypoints are sparse in t: the robot sits at waypoint k's cell for
    // all timesteps in [t_k, t_{k+1} - 1] and jumps on the last step.
    Cell cur = waypoints.front().cell;
    for (const auto& wp : waypoints) {
        if (wp.t > t) break;
        cur = wp.cell;
    }
    return cur;
}

int PlanSet::horizon() const {
    int h = 0;
    for (const auto& p : paths) h = std::max(h, p.horizon());
    return h;
}

std::string to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::OffMap: return "off-map";
        case ViolationKind::OnObstacle: return "on-obstacle";
        case ViolationKind::NonAdjacent: return "non-adjacent";
        case ViolationKind::VertexConflict: return "vertex-conflict";
        case ViolationKind::SwapConflict: return "swap-conflict";
    }
    return "?";
}

namespace {

struct Cursor {
    const std::string& s;
    size_t pos = 0;
    int line_no;

    explicit Cursor(const std::string& str, int line) : s(str), line_no(line) {}

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool at_end() {
        skip_ws();
        return pos >= s.size();
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error("plan syntax error at line " + std::to_string(line_no) + ": " + what);
    }

    void expect(char c) {
        skip_ws();
        if (pos >= s.size() || s[pos] != c) fail(std::string("expected '") + c + "'");
        ++pos;
    }

    bool consume(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    int integer() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) fail("expected non-negative integer");
        return std::atoi(s.substr(start, pos - start).c_str());
    }
};

}  // namespace

PlanSet parse_plan(const std::string& text) {
    PlanSet plan;
    std::unordered_set<int> seen_ids;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        bool blank = std::all_of(line.begin(), line.end(),
                                 [](unsigned char c) { return std::isspace(c); });
        if (blank) continue;

        Cursor cur(line, line_no);
        PlanPath path;
        path.robot_id = cur.integer();
        cur.expect(':');
        if (!seen_ids.insert(path.robot_id).second)
            throw std::runtime_error("duplicate robot id " + std::to_string(path.robot_id) +
                                     " at line " + std::to_string(line_no));

        while (!cur.at_end()) {
            cur.expect('(');
            Waypoint wp;
            wp.cell.x = cur.integer();
            cur.expect(',');
            wp.cell.y = cur.integer();
            cur.expect(',');
            wp.t = cur.integer();
            cur.expect(')');

            if (path.waypoints.empty()) {
                if (wp.t != 0) cur.fail("first waypoint must have t=0");
            } else {
                if (wp.t <= path.waypoints.back().t) cur.fail("non-increasing t");
                int dist = std::abs(wp.cell.x - path.waypoints.back().cell.x) +
                           std::abs(wp.cell.y - path.waypoints.back().cell.y);
                if (dist > 1) cur.fail("non-adjacent consecutive waypoints");
            }
            path.waypoints.push_back(wp);
            if (!cur.consume(';')) break;
        }
        if (!cur.at_end()) cur.fail("trailing characters");
        if (path.waypoints.empty()) cur.fail("empty waypoint list");
        plan.paths.push_back(std::move(path));
    }

    std::sort(plan.paths.begin(), plan.paths.end(),
              [](const PlanPath& a, const PlanPath& b) { return a.robot_id < b.robot_id; });
    for (int i = 0; i < plan.robot_count(); ++i) {
        if (plan.paths[i].robot_id != i)
            throw std::runtime_error("robot ids must be contiguous from 0; missing id " +
                                     std::to_string(i));
    }
    return plan;
}

std::string print_plan(const PlanSet& plan) {
    std::ostringstream out;
    for (const auto& path : plan.paths) {
        out << path.robot_id << ": ";
        for (size_t i = 0; i < path.waypoints.size(); ++i) {
            const auto& wp = path.waypoints[i];
            if (i > 0) out << ';';
            out << '(' << wp.cell.x << ',' << wp.cell.y << ',' << wp.t << ')';
        }
        out << '\n';
    }
    return out.str();
}

PlanSet load_plan_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_plan(buf.str());
}

ValidationReport validate_plan(const PlanSet& plan, const GridMap& map) {
    ValidationReport report;
    auto add = [&report](ViolationKind kind, std::vector<int> robots, int t) {
        report.violations.push_back({kind, std::move(robots), t});
    };

    // Static checks per waypoint.
    for (const auto& path : plan.paths) {
        for (const auto& wp : path.waypoints) {
            if (!map.in_bounds(wp.cell))
                add(ViolationKind::OffMap, {path.robot_id}, wp.t);
            else if (!map.is_passable(wp.cell))
                add(ViolationKind::OnObstacle, {path.robot_id}, wp.t);
        }
        for (size_t i = 1; i < path.waypoints.size(); ++i) {
            int dist = std::abs(path.waypoints[i].cell.x - path.waypoints[i - 1].cell.x) +
                       std::abs(path.waypoints[i].cell.y - path.waypoints[i - 1].cell.y);
            if (dist > 1) add(ViolationKind::NonAdjacent, {path.robot_id}, path.waypoints[i].t);
        }
    }

    // Conflicts over the common horizon. Robots hold their goal cell after
    // their last waypoint, so the horizon is the global maximum. Occupancy
    // is hashed per timestep to stay near-linear in robots.
    int horizon = plan.horizon();
    int n = plan.robot_count();
    auto key = [&map](const Cell& c) {
        return static_cast<long long>(c.y) * (map.width + 1) + c.x;
    };
    std::vector<Cell> prev(n);
    std::vector<Cell> cur(n);
    std::unordered_map<long long, std::vector<int>> occ_prev;
    std::unordered_map<long long, std::vector<int>> occ_cur;
    std::vector<size_t> next_wp(n, 0);
    for (int t = 0; t <= horizon; ++t) {
        prev = cur;
        std::swap(occ_prev, occ_cur);
        occ_cur.clear();
        for (int i = 0; i < n; ++i) {
            const auto& wps = plan.paths[i].waypoints;
            while (next_wp[i] < wps.size() && wps[next_wp[i]].t <= t) {
                cur[i] = wps[next_wp[i]].cell;
                ++next_wp[i];
            }
            occ_cur[key(cur[i])].push_back(i);
        }
        for (const auto& [cell_key, robots] : occ_cur) {
            (void)cell_key;
            for (size_t a = 0; a < robots.size(); ++a)
                for (size_t b = a + 1; b < robots.size(); ++b)
                    add(ViolationKind::VertexConflict, {robots[a], robots[b]}, t);
        }
        if (t > 0) {
            for (int i = 0; i < n; ++i) {
                if (cur[i] == prev[i]) continue;
                auto it = occ_prev.find(key(cur[i]));
                if (it == occ_prev.end()) continue;
                for (int j : it->second) {
                    if (j <= i) continue;  // report each pair once, (i, j) with i < j
                    if (cur[j] == prev[i]) add(ViolationKind::SwapConflict, {i, j}, t);
                }
            }
        }
    }

    // Hash iteration order is not deterministic; sort for stable reports.
    std::sort(report.violations.begin(), report.violations.end(),
              [](const Violation& a, const Violation& b) {
                  if (a.timestep != b.timestep) return a.timestep < b.timestep;
                  if (a.kind != b.kind) return a.kind < b.kind;
                  return a.robots < b.robots;
              });
    report.ok = report.violations.empty();
    return report;
}

}  // namespace smart
