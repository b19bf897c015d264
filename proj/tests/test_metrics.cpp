#include <doctest.h>

#include "smart/metrics.hpp"

using namespace smart;

TEST_CASE("finalize computes aet and max from completion times") {
    Metrics m = finalize({10.0, 20.0, 30.0}, 30.0, 3.0, 0, true);
    CHECK(m.aet == doctest::Approx(20.0));
    CHECK(m.max_exec == doctest::Approx(30.0));
    CHECK(m.sim_speed == doctest::Approx(10.0));
    CHECK(m.success);
    REQUIRE(m.per_robot.size() == 3);
    CHECK(m.per_robot[2].second == doctest::Approx(30.0));
}

TEST_CASE("finalize of a single robot has aet equal to max") {
    Metrics m = finalize({5.0}, 5.0, 1.0, 0, true);
    CHECK(m.aet == doctest::Approx(5.0));
    CHECK(m.max_exec == doctest::Approx(5.0));
}

TEST_CASE("finalize computes the sim speed ratio") {
    Metrics m = finalize({50.0}, 100.0, 10.0, 0, true);
    CHECK(m.sim_speed == doctest::Approx(10.0));
}

TEST_CASE("finalize rejects an empty robot set") {
    CHECK_THROWS_AS(finalize({}, 0.0, 1.0, 0, true), std::runtime_error);
}

TEST_CASE("collisions or incompletion clear the success flag") {
    CHECK_FALSE(finalize({1.0}, 1.0, 1.0, 2, true).success);
    CHECK_FALSE(finalize({1.0}, 1.0, 1.0, 0, false).success);
}

TEST_CASE("trace export writes a header and one line per row") {
    CHECK(trace_to_csv({}) == "sim_time,robot,x,y,theta,v_l,v_r,queue_len\n");
    std::vector<TraceRow> rows = {{0.1, 3, 1.5, 2.25, -0.5, 0.125, 0.375, 4}};
    std::string csv = trace_to_csv(rows);
    CHECK(csv == "sim_time,robot,x,y,theta,v_l,v_r,queue_len\n0.1,3,1.5,2.25,-0.5,0.125,0.375,4\n");
}

TEST_CASE("trace export round-trips through the parser") {
    std::vector<TraceRow> rows;
    for (int i = 0; i < 20; ++i)
        rows.push_back({0.1 * (i + 1), i % 3, 1.0 + i * 0.25, 2.0 - i * 0.5,
                        0.125 * (i % 7), 0.5, -0.5, i});
    auto parsed = parse_trace_csv(trace_to_csv(rows));
    REQUIRE(parsed.size() == rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(parsed[i].sim_time == doctest::Approx(rows[i].sim_time));
        CHECK(parsed[i].robot == rows[i].robot);
        CHECK(parsed[i].x == doctest::Approx(rows[i].x));
        CHECK(parsed[i].queue_len == rows[i].queue_len);
    }
    CHECK_THROWS_AS(parse_trace_csv("bogus\n"), std::runtime_error);
}

TEST_CASE("metrics JSON carries a format version") {
    Metrics m = finalize({1.0, 3.0}, 3.0, 1.0, 0, true);
    std::string json = metrics_to_json(m);
    CHECK(json.find("\"format_version\": 1") != std::string::npos);
    CHECK(json.find("\"aet\": 2.0") != std::string::npos);
    CHECK(json.find("\"success\": true") != std::string::npos);
}

TEST_CASE("event log round-trips and reproduces completion times") {
    std::vector<StatusEvent> events = {
        {0.1, {0, 0}, VertexStatus::Enqueued}, {0.5, {0, 0}, VertexStatus::Finished},
        {0.5, {0, 1}, VertexStatus::Enqueued}, {1.2, {1, 0}, VertexStatus::Enqueued},
        {2.5, {0, 1}, VertexStatus::Finished}, {3.0, {1, 0}, VertexStatus::Finished},
    };
    std::string csv = events_to_csv(events);
    auto parsed = parse_events_csv(csv);
    REQUIRE(parsed.size() == events.size());
    for (size_t i = 0; i < events.size(); ++i) {
        CHECK(parsed[i].sim_time == doctest::Approx(events[i].sim_time));
        CHECK(parsed[i].vertex == events[i].vertex);
        CHECK(parsed[i].status == events[i].status);
    }
    auto times = completion_times_from_events(parsed, 2);
    REQUIRE(times.size() == 2);
    CHECK(times[0] == doctest::Approx(2.5));
    CHECK(times[1] == doctest::Approx(3.0));
}
