#include <doctest.h>

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "smart/adg.hpp"
#include "testutil.hpp"

using namespace smart;
using namespace smart::test;

namespace {

Adg build_from(const PlanSet& plan, bool safe_stops) {
    std::vector<Orientation> headings(plan.robot_count(), Orientation::North);
    return build_adg(compile_plan(plan, headings, safe_stops), plan);
}

}  // namespace

TEST_CASE("cell_occupancy_order sorts visits chronologically") {
    PlanSet plan;
    plan.paths.push_back(make_path(0, {{{0, 1}, 0}, {{1, 1}, 2}, {{1, 0}, 3}}));
    plan.paths.push_back(make_path(1, {{{2, 1}, 0}, {{2, 1}, 4}, {{1, 1}, 5}, {{1, 2}, 6}}));
    OccupancyOrder order = cell_occupancy_order(plan);
    const auto& visits = order.at({1, 1});
    REQUIRE(visits.size() == 2);
    CHECK(visits[0].robot == 0);
    CHECK(visits[0].t_enter == 2);
    CHECK(visits[0].t_leave == 3);
    CHECK(visits[1].robot == 1);
    CHECK(visits[1].t_enter == 5);
    CHECK(visits[1].t_leave == 6);
}

TEST_CASE("cell_occupancy_order folds waits into one visit") {
    PlanSet plan;
    plan.paths.push_back(make_path(
        0, {{{0, 1}, 0}, {{1, 1}, 2}, {{1, 1}, 3}, {{1, 1}, 4}, {{2, 1}, 5}}));
    OccupancyOrder order = cell_occupancy_order(plan);
    const auto& visits = order.at({1, 1});
    REQUIRE(visits.size() == 1);
    CHECK(visits[0].t_enter == 2);
    CHECK(visits[0].t_leave == 5);
}

TEST_CASE("cell_occupancy_order marks start and goal visits") {
    PlanSet plan;
    plan.paths.push_back(make_path(0, {{{0, 0}, 0}, {{1, 0}, 4}}));
    OccupancyOrder order = cell_occupancy_order(plan);
    CHECK(order.at({0, 0}).front().t_enter == 0);
    CHECK(order.at({0, 0}).front().t_leave == 4);
    CHECK(order.at({1, 0}).front().t_enter == 4);
    CHECK_FALSE(order.at({1, 0}).front().t_leave.has_value());
}

TEST_CASE("cell_occupancy_order rejects overlapping occupancy") {
    PlanSet plan;
    plan.paths.push_back(
        make_path(0, {{{0, 0}, 0}, {{1, 0}, 1}, {{1, 0}, 3}, {{0, 0}, 4}}));
    plan.paths.push_back(make_path(1, {{{1, 1}, 0}, {{1, 0}, 2}}));
    CHECK_THROWS_WITH_AS(cell_occupancy_order(plan), doctest::Contains("overlapping"),
                         std::runtime_error);
}

TEST_CASE("build_adg emits no Type-2 edges for disjoint paths") {
    PlanSet plan;
    plan.paths.push_back(make_path(0, {{{0, 0}, 0}, {{1, 0}, 1}}));
    plan.paths.push_back(make_path(1, {{{0, 3}, 0}, {{1, 3}, 1}}));
    Adg adg = build_from(plan, true);
    CHECK(adg.type2_edges().empty());
}

TEST_CASE("build_adg links exit and enter across a shared cell") {
    // Occupancy of (1,0): r0 over [1,2), then r1 from 2 onward.
    PlanSet plan;
    plan.paths.push_back(make_path(0, {{{0, 0}, 0}, {{1, 0}, 1}, {{2, 0}, 2}}));
    plan.paths.push_back(make_path(1, {{{1, 1}, 0}, {{1, 1}, 1}, {{1, 0}, 2}}));
    Adg adg = build_from(plan, true);
    REQUIRE(adg.type2_edges().size() == 1);
    const Type2Edge& e = adg.type2_edges().front();
    CHECK(e.cell == Cell{1, 0});
    const Action& from = adg.vertex(e.from).action;
    const Action& to = adg.vertex(e.to).action;
    CHECK(e.from.robot == 0);
    CHECK(from.kind == ActionKind::MoveExit);
    CHECK(from.from == Cell{1, 0});
    CHECK(e.to.robot == 1);
    CHECK(to.kind == ActionKind::MoveEnter);
    CHECK(to.into == Cell{1, 0});
}

TEST_CASE("build_adg orders consecutive crossings of one boundary") {
    // r0 crosses the (0,0)|(1,0) boundary at t=1, r1 follows through the
    // same boundary at t=3. r1 must not aim at the midpoint until r0 has
    // fully arrived in (1,0): the boundary edge runs from r0's enter to
    // r1's exit.
    PlanSet plan;
    plan.paths.push_back(make_path(0, {{{0, 0}, 0}, {{1, 0}, 1}, {{2, 0}, 2}}));
    plan.paths.push_back(make_path(1, {{{0, 1}, 0}, {{0, 0}, 2}, {{1, 0}, 3}}));
    Adg adg = build_from(plan, true);

    int boundary_edges = 0;
    for (const Type2Edge& e : adg.type2_edges()) {
        if (!e.is_boundary()) continue;
        ++boundary_edges;
        const Action& from = adg.vertex(e.from).action;
        const Action& to = adg.vertex(e.to).action;
        CHECK(from.kind == ActionKind::MoveEnter);
        CHECK(from.into == Cell{1, 0});
        CHECK(e.from.robot == 0);
        CHECK(to.kind == ActionKind::MoveExit);
        CHECK(to.from == Cell{0, 0});
        CHECK(e.to.robot == 1);
    }
    CHECK(boundary_edges == 1);
    CHECK(check_acyclic(adg).acyclic);
}

TEST_CASE("build_adg on the rotation cycle emits one edge per cell") {
    Adg adg = build_from(rotation_cycle_plan(), true);
    REQUIRE(adg.type2_edges().size() == 4);
    std::set<Cell> cells;
    for (const auto& e : adg.type2_edges()) {
        cells.insert(e.cell);
        const Action& from = adg.vertex(e.from).action;
        const Action& to = adg.vertex(e.to).action;
        CHECK(from.kind == ActionKind::MoveExit);
        CHECK(to.kind == ActionKind::MoveEnter);
        CHECK(from.from == e.cell);
        CHECK(to.into == e.cell);
    }
    CHECK(cells.size() == 4);
}

TEST_CASE("build_adg rejects entry into a goal-occupied cell") {
    PlanSet plan;
    plan.paths.push_back(make_path(0, {{{1, 0}, 0}}));
    plan.paths.push_back(make_path(1, {{{0, 0}, 0}, {{1, 0}, 1}}));
    CHECK_THROWS_WITH_AS(build_from(plan, true), doctest::Contains("goal-occupied"),
                         std::runtime_error);
}

TEST_CASE("safe stops keep the rotation cycle acyclic; whole moves do not") {
    Adg safe = build_from(rotation_cycle_plan(), true);
    CHECK(check_acyclic(safe).acyclic);

    Adg unsafe = build_from(rotation_cycle_plan(), false);
    CycleReport report = check_acyclic(unsafe);
    REQUIRE_FALSE(report.acyclic);
    CHECK(report.cycle.size() == 4);
    // The witness is made of the four whole-move vertices.
    for (const VertexId& v : report.cycle) {
        CHECK(unsafe.vertex(v).action.is_move());
        CHECK(unsafe.vertex(v).action.unsplit);
    }
}

TEST_CASE("single-robot graphs are acyclic") {
    PlanSet plan;
    plan.paths.push_back(make_path(0, {{{0, 0}, 0}, {{1, 0}, 1}, {{1, 1}, 2}, {{0, 1}, 3}}));
    CHECK(check_acyclic(build_from(plan, true)).acyclic);
    CHECK(check_acyclic(build_from(plan, false)).acyclic);
}

TEST_CASE("ready_vertices applies the two eligibility rules") {
    PlanSet plan;
    plan.paths.push_back(make_path(0, {{{0, 0}, 0}, {{1, 0}, 1}, {{2, 0}, 2}}));
    plan.paths.push_back(make_path(1, {{{1, 1}, 0}, {{1, 1}, 1}, {{1, 0}, 2}}));
    Adg adg = build_from(plan, true);
    // r0: Rotate(E), Exit(0,0), Enter(1,0), Exit(1,0), Enter(2,0)
    // r1: Rotate(N->N none)... r1 moves north: (1,1)->(1,0) is North; initial
    // heading North, so r1: Exit(1,1), Enter(1,0) with a Type-2 edge from
    // r0's Exit(1,0) to r1's Enter(1,0).
    REQUIRE(adg.action_count(0) == 5);
    REQUIRE(adg.action_count(1) == 2);

    // Rule (a): first vertices with no Type-2 predecessors.
    CHECK(adg.ready_vertices() == std::vector<VertexId>{{0, 0}, {1, 0}});

    // Rule (b): Type-1 predecessor enqueued suffices when Type-2
    // predecessors are finished.
    auto newly = adg.mark_enqueued({0, 0});
    CHECK(newly == std::vector<VertexId>{{0, 1}});
    CHECK(adg.is_eligible({0, 1}));

    // r1's Enter(1,0) needs r0's Exit(1,0) *finished*; enqueued is not enough.
    adg.mark_enqueued({1, 0});
    adg.mark_enqueued({0, 1});
    adg.mark_enqueued({0, 2});
    adg.mark_enqueued({0, 3});  // r0's Exit(1,0)
    CHECK_FALSE(adg.is_eligible({1, 1}));
    adg.mark_finished({1, 0});
    CHECK_FALSE(adg.is_eligible({1, 1}));  // Type-1 ok, Type-2 still enqueued
    adg.mark_finished({0, 0});
    adg.mark_finished({0, 1});
    adg.mark_finished({0, 2});
    auto released = adg.mark_finished({0, 3});
    CHECK(released == std::vector<VertexId>{{1, 1}});
    CHECK(adg.is_eligible({1, 1}));
}

TEST_CASE("mark transitions reject illegal moves") {
    PlanSet plan;
    plan.paths.push_back(make_path(0, {{{0, 0}, 0}, {{1, 0}, 1}}));
    Adg adg = build_from(plan, true);
    CHECK_THROWS_AS(adg.mark_finished({0, 0}), std::logic_error);  // staged -> finished
    adg.mark_enqueued({0, 0});
    CHECK_THROWS_AS(adg.mark_enqueued({0, 0}), std::logic_error);
    adg.mark_finished({0, 0});
    CHECK_THROWS_AS(adg.mark_finished({0, 0}), std::logic_error);
    CHECK_THROWS_AS(adg.mark_enqueued({0, 9}), std::out_of_range);
}

TEST_CASE("finishing the last vertex releases nothing") {
    PlanSet plan;
    plan.paths.push_back(make_path(0, {{{0, 0}, 0}, {{1, 0}, 1}}));
    Adg adg = build_from(plan, false);  // single unsplit move after the rotate
    adg.mark_enqueued({0, 0});
    adg.mark_enqueued({0, 1});
    adg.mark_finished({0, 0});
    CHECK(adg.mark_finished({0, 1}).empty());
    CHECK(adg.all_finished());
}

TEST_CASE("oracle_execute runs a single robot in chain order") {
    PlanSet plan;
    plan.paths.push_back(make_path(0, {{{0, 0}, 0}, {{0, 1}, 1}}));  // South: rotate 180 + move
    Adg adg = build_from(plan, true);
    REQUIRE(adg.total_vertices() == 3);
    auto order = oracle_execute(adg);
    CHECK(order == std::vector<VertexId>{{0, 0}, {0, 1}, {0, 2}});
}

TEST_CASE("oracle_execute interleaves independent robots by round") {
    PlanSet plan;
    plan.paths.push_back(make_path(0, {{{0, 0}, 0}, {{1, 0}, 1}}));
    plan.paths.push_back(make_path(1, {{{0, 3}, 0}, {{1, 3}, 1}}));
    Adg adg = build_from(plan, false);  // rotate + unsplit move each
    auto order = oracle_execute(adg);
    REQUIRE(order.size() == 4);
    CHECK(order[0] == VertexId{0, 0});
    CHECK(order[1] == VertexId{1, 0});
    CHECK(order[2] == VertexId{0, 1});
    CHECK(order[3] == VertexId{1, 1});
}

TEST_CASE("oracle_execute finishes all exit halves before any enter half on the cycle") {
    Adg adg = build_from(rotation_cycle_plan(), true);
    auto order = oracle_execute(adg);
    std::map<VertexId, size_t> position;
    for (size_t i = 0; i < order.size(); ++i) position[order[i]] = i;
    size_t last_exit = 0;
    size_t first_enter = order.size();
    for (int r = 0; r < adg.robot_count(); ++r) {
        for (int k = 0; k < adg.action_count(r); ++k) {
            const Action& a = adg.vertex({r, k}).action;
            if (a.kind == ActionKind::MoveExit) last_exit = std::max(last_exit, position[{r, k}]);
            if (a.kind == ActionKind::MoveEnter)
                first_enter = std::min(first_enter, position[{r, k}]);
        }
    }
    CHECK(last_exit < first_enter);
}

TEST_CASE("oracle_execute stalls on a cyclic graph") {
    Adg adg = build_from(rotation_cycle_plan(), false);
    CHECK_THROWS_WITH_AS(oracle_execute(adg), doctest::Contains("stalled"), std::runtime_error);
}

TEST_CASE("exactly one Type-2 edge per consecutive visit or crossing pair") {
    Xoshiro256pp rng(9001);
    GridMap map = open_map(8, 8);
    for (int i = 0; i < 100; ++i) {
        PlanSet plan = random_valid_plan(map, 5, 12, rng, false);
        Adg adg = build_from(plan, true);

        std::map<Cell, int> expected;
        for (const auto& [cell, visits] : cell_occupancy_order(plan)) {
            for (size_t k = 1; k < visits.size(); ++k)
                if (visits[k - 1].robot != visits[k].robot) ++expected[cell];
        }
        std::map<Cell, int> actual;
        int boundary_edges = 0;
        for (const auto& e : adg.type2_edges()) {
            if (e.is_boundary())
                ++boundary_edges;
            else
                ++actual[e.cell];
        }
        REQUIRE(actual == expected);

        // Boundary family: one edge per consecutive distinct-robot
        // crossing pair of each cell boundary.
        std::map<std::pair<Cell, Cell>, std::vector<std::pair<int, int>>> crossings;
        for (const auto& path : plan.paths) {
            for (size_t k = 1; k < path.waypoints.size(); ++k) {
                Cell a = path.waypoints[k - 1].cell;
                Cell b = path.waypoints[k].cell;
                if (a == b) continue;
                auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
                crossings[key].emplace_back(path.waypoints[k].t, path.robot_id);
            }
        }
        int expected_boundary = 0;
        for (auto& [key, list] : crossings) {
            std::sort(list.begin(), list.end());
            for (size_t k = 1; k < list.size(); ++k)
                if (list[k - 1].second != list[k].second) ++expected_boundary;
        }
        REQUIRE(boundary_edges == expected_boundary);
    }
}

TEST_CASE("random-delay executions respect every Type-2 edge and finish") {
    // Adversarial discrete executor: finish a random enqueued vertex each
    // step. Safety and liveness must hold regardless of delays.
    Xoshiro256pp rng(31337);
    GridMap map = open_map(8, 8);
    for (int i = 0; i < 60; ++i) {
        PlanSet plan = random_valid_plan(map, 5, 12, rng, false);
        Adg adg = build_from(plan, true);
        REQUIRE(check_acyclic(adg).acyclic);

        // Per-robot FIFO queues drained in random robot order: models
        // executors with arbitrary relative delays.
        std::map<VertexId, size_t> finish_pos;
        std::vector<std::deque<VertexId>> queues(adg.robot_count());
        size_t step = 0;
        while (!adg.all_finished()) {
            std::vector<VertexId> ready = adg.ready_vertices();
            for (const VertexId& id : ready) {
                adg.mark_enqueued(id);
                queues[id.robot].push_back(id);
            }
            std::vector<int> busy;
            for (int r = 0; r < adg.robot_count(); ++r)
                if (!queues[r].empty()) busy.push_back(r);
            REQUIRE_FALSE(busy.empty());
            int robot = busy[static_cast<size_t>(rng.uniform01() * busy.size())];
            VertexId victim = queues[robot].front();
            queues[robot].pop_front();
            adg.mark_finished(victim);
            finish_pos[victim] = step++;
        }
        for (const auto& e : adg.type2_edges())
            REQUIRE(finish_pos.at(e.from) < finish_pos.at(e.to));
        // Type-1 order within each robot.
        for (int r = 0; r < adg.robot_count(); ++r)
            for (int k = 0; k + 1 < adg.action_count(r); ++k)
                REQUIRE(finish_pos.at({r, k}) < finish_pos.at({r, k + 1}));
    }
}

TEST_CASE("adg JSON dump lists vertices and typed edges") {
    Adg adg = build_from(rotation_cycle_plan(), true);
    std::string dump = dump_adg_json(adg);
    CHECK(dump.find("\"vertices\"") != std::string::npos);
    CHECK(dump.find("\"type\": \"2\"") != std::string::npos);
    CHECK(dump.find("\"move_exit\"") != std::string::npos);
    CHECK(dump.find("\"staged\"") != std::string::npos);
}
