#include <doctest.h>

#include "smart/grid_io.hpp"

using namespace smart;

namespace {

const char* kTinyMap =
    "type octile\n"
    "height 2\n"
    "width 2\n"
    "map\n"
    ".@\n"
    "..\n";

}  // namespace

TEST_CASE("parse_map reads dimensions and passability") {
    GridMap map = parse_map(kTinyMap);
    CHECK(map.width == 2);
    CHECK(map.height == 2);
    CHECK(map.passable_count() == 3);
    CHECK(map.is_passable({0, 0}));
    CHECK_FALSE(map.is_passable({1, 0}));
    CHECK(map.is_passable({0, 1}));
    CHECK(map.is_passable({1, 1}));
}

TEST_CASE("parse_map rejects empty input") {
    CHECK_THROWS_WITH_AS(parse_map(""), doctest::Contains("malformed header"), std::runtime_error);
}

TEST_CASE("parse_map counts a fully open 32x32 map") {
    std::string text = "type octile\nheight 32\nwidth 32\nmap\n";
    for (int i = 0; i < 32; ++i) text += std::string(32, '.') + "\n";
    GridMap map = parse_map(text);
    CHECK(map.passable_count() == 1024);
}

TEST_CASE("parse_map accepts G/O/T cells and rejects unknown characters") {
    GridMap map = parse_map("type octile\nheight 1\nwidth 3\nmap\nGOT\n");
    CHECK(map.is_passable({0, 0}));
    CHECK_FALSE(map.is_passable({1, 0}));
    CHECK_FALSE(map.is_passable({2, 0}));
    CHECK_THROWS_WITH_AS(parse_map("type octile\nheight 1\nwidth 1\nmap\nx\n"),
                         doctest::Contains("unknown cell character"), std::runtime_error);
}

TEST_CASE("parse_map rejects dimension mismatches") {
    CHECK_THROWS_WITH_AS(parse_map("type octile\nheight 2\nwidth 2\nmap\n..\n"),
                         doctest::Contains("row count mismatch"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_map("type octile\nheight 1\nwidth 2\nmap\n...\n"),
                         doctest::Contains("row length mismatch"), std::runtime_error);
}

TEST_CASE("parse_map handles CRLF line endings") {
    GridMap map = parse_map("type octile\r\nheight 1\r\nwidth 2\r\nmap\r\n..\r\n");
    CHECK(map.passable_count() == 2);
}

TEST_CASE("parse_scenario maps fields and validates against the map") {
    GridMap map = parse_map(kTinyMap);
    Scenario scen = parse_scenario("version 1\n0\tm.map\t2\t2\t0\t0\t1\t1\t2.0\n", map);
    REQUIRE(scen.entries.size() == 1);
    CHECK(scen.entries[0].start == Cell{0, 0});
    CHECK(scen.entries[0].goal == Cell{1, 1});
    CHECK(scen.entries[0].map_name == "m.map");
}

TEST_CASE("parse_scenario rejects goals on obstacles") {
    GridMap map = parse_map(kTinyMap);
    CHECK_THROWS_WITH_AS(parse_scenario("version 1\n0 m.map 2 2 0 0 1 0 1.0\n", map),
                         doctest::Contains("goal on obstacle"), std::runtime_error);
}

TEST_CASE("parse_scenario accepts a header with zero entries") {
    GridMap map = parse_map(kTinyMap);
    CHECK(parse_scenario("version 1\n", map).entries.empty());
}

TEST_CASE("parse_scenario rejects dimension mismatches") {
    GridMap map = parse_map(kTinyMap);
    CHECK_THROWS_WITH_AS(parse_scenario("version 1\n0 m.map 4 4 0 0 1 1 1.0\n", map),
                         doctest::Contains("dimension mismatch"), std::runtime_error);
}
