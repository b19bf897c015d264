#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace smart {

// Grid coordinates: x = column, y = row, y grows downward (file order).
struct Cell {
    int x = 0;
    int y = 0;

    auto operator<=>(const Cell&) const = default;
};

inline std::string to_string(const Cell& c) {
    return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

// Headings in clockwise order. N points toward decreasing y.
enum class Orientation : std::uint8_t { North = 0, East = 1, South = 2, West = 3 };

inline Cell delta(Orientation o) {
    switch (o) {
        case Orientation::North: return {0, -1};
        case Orientation::East: return {1, 0};
        case Orientation::South: return {0, 1};
        case Orientation::West: return {-1, 0};
    }
    throw std::logic_error("bad orientation");
}

inline Cell neighbor(const Cell& c, Orientation o) {
    Cell d = delta(o);
    return {c.x + d.x, c.y + d.y};
}

inline char to_char(Orientation o) {
    switch (o) {
        case Orientation::North: return 'N';
        case Orientation::East: return 'E';
        case Orientation::South: return 'S';
        case Orientation::West: return 'W';
    }
    return '?';
}

inline Orientation orientation_from_char(char c) {
    switch (c) {
        case 'N': return Orientation::North;
        case 'E': return Orientation::East;
        case 'S': return Orientation::South;
        case 'W': return Orientation::West;
        default: throw std::runtime_error(std::string("unknown orientation '") + c + "'");
    }
}

// Heading whose unit delta maps a to b. Requires Manhattan distance 1.
inline Orientation heading_between(const Cell& a, const Cell& b) {
    int dx = b.x - a.x;
    int dy = b.y - a.y;
    if (dx == 1 && dy == 0) return Orientation::East;
    if (dx == -1 && dy == 0) return Orientation::West;
    if (dx == 0 && dy == 1) return Orientation::South;
    if (dx == 0 && dy == -1) return Orientation::North;
    throw std::runtime_error("heading_between: cells " + to_string(a) + " and " + to_string(b) +
                             " are not adjacent");
}

// Minimal signed rotation in degrees; +90 is clockwise (N -> E).
// 180-degree turns resolve to +180 (executed clockwise).
inline int rotation_delta(Orientation from, Orientation to) {
    int steps = (static_cast<int>(to) - static_cast<int>(from) + 4) % 4;
    switch (steps) {
        case 0: return 0;
        case 1: return 90;
        case 2: return 180;
        case 3: return -90;
    }
    return 0;
}

// World angle of a heading, radians. With y growing downward, E = 0 and
// S = +pi/2, so positive angular rate is a clockwise turn on screen.
inline double orientation_theta(Orientation o) {
    switch (o) {
        case Orientation::East: return 0.0;
        case Orientation::South: return M_PI / 2.0;
        case Orientation::West: return M_PI;
        case Orientation::North: return -M_PI / 2.0;
    }
    return 0.0;
}

// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * M_PI);
    if (a <= -M_PI) a += 2.0 * M_PI;
    if (a > M_PI) a -= 2.0 * M_PI;
    return a;
}

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// World-frame coordinates of a cell center.
inline Vec2 cell_center(const Cell& c, double cell_size) {
    return {(c.x + 0.5) * cell_size, (c.y + 0.5) * cell_size};
}

// Midpoint of the shared boundary between cell c and its neighbor toward o.
inline Vec2 boundary_midpoint(const Cell& c, Orientation o, double cell_size) {
    Vec2 center = cell_center(c, cell_size);
    Cell d = delta(o);
    return {center.x + 0.5 * d.x * cell_size, center.y + 0.5 * d.y * cell_size};
}

}  // namespace smart
