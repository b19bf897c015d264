#include <doctest.h>

#include <deque>

#include "smart/server.hpp"
#include "testutil.hpp"

using namespace smart;
using namespace smart::test;

namespace {

Adg two_robot_adg() {
    // r0: (0,0)->(1,0)->(2,0) eastward; r1 waits then enters (1,0) behind
    // it from the south. One Type-2 edge: r0's Exit(1,0) -> r1's Enter(1,0).
    PlanSet plan;
    plan.paths.push_back(make_path(0, {{{0, 0}, 0}, {{1, 0}, 1}, {{2, 0}, 2}}));
    plan.paths.push_back(make_path(1, {{{1, 1}, 0}, {{1, 1}, 1}, {{1, 0}, 2}}));
    std::vector<Orientation> headings = {Orientation::East, Orientation::North};
    return build_adg(compile_plan(plan, headings, true), plan);
}

// Hand-built graph: finishing (0,0) releases one vertex of robot 1 and
// one of robot 2 at once.
Adg fan_out_adg() {
    std::vector<ActionSequence> seqs(3);
    for (int r = 0; r < 3; ++r) {
        seqs[r].robot_id = r;
        Action a;
        a.kind = ActionKind::Rotate;
        a.angle_deg = 90;
        a.robot_id = r;
        a.seq = 0;
        seqs[r].actions.push_back(a);
    }
    std::vector<Type2Edge> edges = {{{0, 0}, {1, 0}, {0, 0}, std::nullopt},
                                    {{0, 0}, {2, 0}, {0, 0}, std::nullopt}};
    return Adg(std::move(seqs), std::move(edges));
}

// Drive the server to completion, acknowledging every dispatch in FIFO
// order; returns the number of ticks simulated.
int drive_to_completion(EmServer& server) {
    std::deque<EnqueueMsg> pending;
    double now = 0.0;
    auto push = [&pending](std::vector<EnqueueMsg> msgs) {
        for (auto& m : msgs) pending.push_back(m);
    };
    push(server.step_dispatch(now));
    int ticks = 0;
    while (!pending.empty()) {
        EnqueueMsg m = pending.front();
        pending.pop_front();
        now += 0.1;
        ++ticks;
        push(server.on_completion(DoneMsg{m.robot, m.seq, now}, now));
        push(server.step_dispatch(now));
    }
    REQUIRE(server.is_complete());
    return ticks;
}

}  // namespace

TEST_CASE("step_dispatch sends the currently eligible wave") {
    EmServer server(two_robot_adg());
    auto msgs = server.step_dispatch(0.0);
    REQUIRE(msgs.size() == 2);  // first eligible action of each robot
    CHECK(msgs[0].robot == 0);
    CHECK(msgs[0].seq == 0);
    CHECK(msgs[1].robot == 1);
    CHECK(msgs[1].seq == 0);

    // The next wave picks up the Type-1 successors made eligible above.
    auto next = server.step_dispatch(0.1);
    REQUIRE(next.size() == 1);
    CHECK(next[0].robot == 0);
    CHECK(next[0].seq == 1);
}

TEST_CASE("step_dispatch with nothing eligible sends nothing") {
    EmServer server(two_robot_adg());
    while (!server.step_dispatch(0.0).empty()) {
    }
    CHECK(server.step_dispatch(0.0).empty());
}

TEST_CASE("finishing an exit releases the dependent enter once Type-1 ready") {
    EmServer server(two_robot_adg());
    // Drain dispatch: everything except r1's Enter(1,0) = (1,1), which
    // waits on r0's Exit(1,0) = (0,2) to finish.
    while (!server.step_dispatch(0.0).empty()) {
    }
    CHECK(server.adg().status({1, 1}) == VertexStatus::Staged);
    CHECK(server.on_completion(DoneMsg{0, 0, 0.1}, 0.1).empty());
    CHECK(server.on_completion(DoneMsg{0, 1, 0.2}, 0.2).empty());
    auto released = server.on_completion(DoneMsg{0, 2, 0.3}, 0.3);
    REQUIRE(released.size() == 1);  // Type-1 pred (1,0) is enqueued, so it goes out
    CHECK(released[0].robot == 1);
    CHECK(released[0].seq == 1);
    CHECK(server.adg().status({1, 1}) == VertexStatus::Enqueued);
}

TEST_CASE("completion time lands on the final done message") {
    PlanSet plan;
    plan.paths.push_back(make_path(0, {{{0, 0}, 0}, {{1, 0}, 1}}));
    Adg adg = build_adg(compile_plan(plan, {Orientation::East}, false), plan);
    EmServer server(std::move(adg));  // one unsplit move
    server.step_dispatch(0.0);
    server.on_completion(DoneMsg{0, 0, 3.4}, 3.5);
    CHECK(server.is_complete());
    CHECK(server.completion_times()[0] == doctest::Approx(3.4));
}

TEST_CASE("duplicate and malformed completions are rejected without state change") {
    EmServer server(two_robot_adg());
    server.step_dispatch(0.0);  // first wave only: (0,0) and (1,0)
    server.on_completion(DoneMsg{0, 0, 0.1}, 0.1);
    size_t errors_before = server.protocol_errors().size();

    server.on_completion(DoneMsg{0, 0, 0.2}, 0.2);  // duplicate
    REQUIRE(server.protocol_errors().size() == errors_before + 1);
    CHECK(server.protocol_errors().back().find("duplicate") != std::string::npos);
    CHECK(server.adg().status({0, 0}) == VertexStatus::Finished);

    // (0,2) is eligible but was never dispatched by on_completion's
    // follow-ups, so a done for it is a protocol violation.
    REQUIRE(server.adg().status({0, 2}) == VertexStatus::Staged);
    server.on_completion(DoneMsg{0, 2, 0.2}, 0.2);
    CHECK(server.protocol_errors().back().find("non-enqueued") != std::string::npos);
    CHECK(server.adg().status({0, 2}) == VertexStatus::Staged);

    server.on_completion(DoneMsg{9, 0, 0.2}, 0.2);  // unknown robot
    CHECK(server.protocol_errors().back().find("unknown") != std::string::npos);
}

TEST_CASE("per-robot done messages must arrive in seq order") {
    EmServer server(two_robot_adg());
    while (!server.step_dispatch(0.0).empty()) {
    }
    // (0,0) and (0,1) are both enqueued; acking (0,1) first violates the
    // FIFO executor contract.
    server.on_completion(DoneMsg{0, 1, 0.1}, 0.1);
    REQUIRE_FALSE(server.protocol_errors().empty());
    CHECK(server.protocol_errors().back().find("out-of-order") != std::string::npos);
    CHECK(server.adg().status({0, 1}) == VertexStatus::Enqueued);

    server.on_completion(DoneMsg{0, 0, 0.2}, 0.2);
    server.on_completion(DoneMsg{0, 1, 0.3}, 0.3);
    CHECK(server.adg().status({0, 1}) == VertexStatus::Finished);
}

TEST_CASE("a fan-out completion dispatches dependents in robot order") {
    EmServer server(fan_out_adg());
    auto first = server.step_dispatch(0.0);
    REQUIRE(first.size() == 1);  // only robot 0 is unblocked
    CHECK(first[0].robot == 0);
    auto released = server.on_completion(DoneMsg{0, 0, 1.0}, 1.0);
    REQUIRE(released.size() == 2);
    CHECK(released[0].robot == 1);
    CHECK(released[1].robot == 2);
}

TEST_CASE("detect_stall fires only past the threshold while incomplete") {
    EmServer server(two_robot_adg());
    server.step_dispatch(0.0);
    CHECK_FALSE(server.detect_stall(299.9, 300.0).has_value());  // one tick early
    auto stall = server.detect_stall(300.0, 300.0);
    REQUIRE(stall.has_value());
    CHECK(stall->enqueued_unfinished.size() >= 1);
    CHECK_FALSE(stall->staged_ineligible.empty());  // r1's blocked enter

    // Progress resets the watchdog.
    server.on_completion(DoneMsg{0, 0, 299.0}, 350.0);
    CHECK_FALSE(server.detect_stall(400.0, 300.0).has_value());
    CHECK_THROWS_AS(server.detect_stall(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("a completed run never stalls") {
    EmServer server(two_robot_adg());
    drive_to_completion(server);
    CHECK_FALSE(server.detect_stall(1e9, 300.0).has_value());
}

TEST_CASE("every vertex is dispatched and acked exactly once in a full run") {
    EmServer server(two_robot_adg());
    server.set_record_events(true);
    drive_to_completion(server);
    int total = server.adg().total_vertices();
    CHECK(static_cast<int>(server.events().size()) == 2 * total);
    int enq = 0;
    int fin = 0;
    for (const auto& e : server.events()) {
        if (e.status == VertexStatus::Enqueued) ++enq;
        if (e.status == VertexStatus::Finished) ++fin;
    }
    CHECK(enq == total);
    CHECK(fin == total);
    CHECK(server.protocol_errors().empty());
}

TEST_CASE("is_complete handles fresh, finished, and empty graphs") {
    EmServer fresh(two_robot_adg());
    CHECK_FALSE(fresh.is_complete());

    EmServer empty((Adg()));
    CHECK(empty.is_complete());
    CHECK_FALSE(empty.detect_stall(1e9, 300.0).has_value());
}

TEST_CASE("enter completions are recorded per cell in finish order") {
    EmServer server(two_robot_adg());
    drive_to_completion(server);
    const auto& order = server.enter_completion_order();
    REQUIRE(order.count({1, 0}) == 1);
    CHECK(order.at({1, 0}) == std::vector<int>{0, 1});
    CHECK(order.at({2, 0}) == std::vector<int>{0});
    CHECK(order.count({1, 1}) == 0);  // start cells are never entered
}
