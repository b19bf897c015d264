#pragma once

#include <string>
#include <vector>

#include "smart/geometry.hpp"

namespace smart {

// Obstacle grid converted from a MovingAI map. Passable cells are the
// vertices of the MAPF graph; edges are implied 4-neighbor adjacency.
struct GridMap {
    int width = 0;
    int height = 0;
    double cell_size = 1.0;
    std::vector<char> passable;  // row-major, width*height entries

    bool in_bounds(const Cell& c) const {
        return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height;
    }

    bool is_passable(const Cell& c) const {
        return in_bounds(c) && passable[static_cast<size_t>(c.y) * width + c.x] != 0;
    }

    int passable_count() const {
        int n = 0;
        for (char p : passable) n += (p != 0);
        return n;
    }
};

struct ScenarioEntry {
    int bucket = 0;
    std::string map_name;
    Cell start;
    Cell goal;
    double optimal_length = 0.0;
};

struct Scenario {
    std::vector<ScenarioEntry> entries;
};

// Parse MovingAI .map text. Header lines `type ...`, `height H`, `width W`,
// `map`, then H rows of W cells. '.' and 'G' are passable; '@', 'O', 'T'
// are obstacles; anything else is an error.
// Throws std::runtime_error on malformed input.
GridMap parse_map(const std::string& text);

// Parse MovingAI .scen text and bind it against `map`: entry dimensions
// must match the map and all starts/goals must be passable and in bounds.
// Throws std::runtime_error on malformed input or binding failures.
Scenario parse_scenario(const std::string& text, const GridMap& map);

GridMap load_map_file(const std::string& path);
Scenario load_scenario_file(const std::string& path, const GridMap& map);

}  // namespace smart
