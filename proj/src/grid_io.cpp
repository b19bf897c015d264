#include "smart/grid_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace smart {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// getline that tolerates CRLF line endings.
bool next_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

}  // namespace

GridMap parse_map(const std::string& text) {
    std::istringstream in(text);
    std::string line;

    if (!next_line(in, line) || line.rfind("type", 0) != 0)
        throw std::runtime_error("malformed header: expected 'type' line");

    int height = -1;
    int width = -1;
    for (int i = 0; i < 2; ++i) {
        if (!next_line(in, line)) throw std::runtime_error("malformed header: missing dimensions");
        std::istringstream ls(line);
        std::string key;
        int value = 0;
        if (!(ls >> key >> value)) throw std::runtime_error("malformed header: bad dimension line '" + line + "'");
        if (key == "height")
            height = value;
        else if (key == "width")
            width = value;
        else
            throw std::runtime_error("malformed header: unexpected key '" + key + "'");
    }
    if (height < 1 || width < 1) throw std::runtime_error("malformed header: non-positive dimensions");

    if (!next_line(in, line) || line != "map")
        throw std::runtime_error("malformed header: expected 'map' line");

    GridMap map;
    map.width = width;
    map.height = height;
    map.passable.assign(static_cast<size_t>(width) * height, 0);

    for (int y = 0; y < height; ++y) {
        if (!next_line(in, line))
            throw std::runtime_error("row count mismatch: expected " + std::to_string(height) +
                                     " rows, got " + std::to_string(y));
        if (static_cast<int>(line.size()) != width)
            throw std::runtime_error("row length mismatch at row " + std::to_string(y) + ": expected " +
                                     std::to_string(width) + " characters, got " +
                                     std::to_string(line.size()));
        for (int x = 0; x < width; ++x) {
            char c = line[x];
            bool open;
            switch (c) {
                case '.':
                case 'G': open = true; break;
                case '@':
                case 'O':
                case 'T': open = false; break;
                default:
                    throw std::runtime_error(std::string("unknown cell character '") + c + "' at (" +
                                             std::to_string(x) + "," + std::to_string(y) + ")");
            }
            map.passable[static_cast<size_t>(y) * width + x] = open ? 1 : 0;
        }
    }
    // Trailing non-empty rows mean the header lied about the height.
    while (next_line(in, line)) {
        if (!line.empty()) throw std::runtime_error("row count mismatch: extra row after map body");
    }
    return map;
}

Scenario parse_scenario(const std::string& text, const GridMap& map) {
    std::istringstream in(text);
    std::string line;
    if (!next_line(in, line) || line.rfind("version", 0) != 0)
        throw std::runtime_error("malformed scenario: expected 'version' line");

    Scenario scen;
    int line_no = 1;
    while (next_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        ScenarioEntry e;
        int w = 0;
        int h = 0;
        if (!(ls >> e.bucket >> e.map_name >> w >> h >> e.start.x >> e.start.y >> e.goal.x >>
              e.goal.y >> e.optimal_length))
            throw std::runtime_error("malformed scenario entry at line " + std::to_string(line_no));
        if (w != map.width || h != map.height)
            throw std::runtime_error("scenario dimension mismatch at line " + std::to_string(line_no) +
                                     ": entry says " + std::to_string(w) + "x" + std::to_string(h) +
                                     ", map is " + std::to_string(map.width) + "x" +
                                     std::to_string(map.height));
        if (!map.in_bounds(e.start))
            throw std::runtime_error("start out of bounds at line " + std::to_string(line_no));
        if (!map.in_bounds(e.goal))
            throw std::runtime_error("goal out of bounds at line " + std::to_string(line_no));
        if (!map.is_passable(e.start))
            throw std::runtime_error("start on obstacle at line " + std::to_string(line_no));
        if (!map.is_passable(e.goal))
            throw std::runtime_error("goal on obstacle at line " + std::to_string(line_no));
        scen.entries.push_back(e);
    }
    return scen;
}

GridMap load_map_file(const std::string& path) { return parse_map(read_file(path)); }

Scenario load_scenario_file(const std::string& path, const GridMap& map) {
    return parse_scenario(read_file(path), map);
}

}  // namespace smart
