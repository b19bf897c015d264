#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "smart/actions.hpp"

namespace smart {

// Server <-> executor message schema. One JSON object per line on the
// wire; the in-process transport passes Message values directly.

struct HelloMsg {
    int robot = 0;

    bool operator==(const HelloMsg&) const = default;
};

struct EnqueueMsg {
    int robot = 0;
    int seq = 0;
    Action action;
    double sim_time = 0.0;

    bool operator==(const EnqueueMsg& o) const;
};

struct DoneMsg {
    int robot = 0;
    int seq = 0;
    double sim_time = 0.0;

    bool operator==(const DoneMsg&) const = default;
};

struct StateMsg {
    int robot = 0;
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
    double v_l = 0.0;
    double v_r = 0.0;
    int queue_len = 0;
    double sim_time = 0.0;

    bool operator==(const StateMsg&) const = default;
};

struct ShutdownMsg {
    bool operator==(const ShutdownMsg&) const = default;
};

using Message = std::variant<HelloMsg, EnqueueMsg, DoneMsg, StateMsg, ShutdownMsg>;

// Serialize to one newline-terminated JSON line. Integers print as
// integers; sim_time and poses as decimals with at most 6 fractional
// digits (trailing zeros trimmed).
std::string encode(const Message& msg);

// Parse one line (without or with the trailing newline). Field order is
// insignificant and unknown fields are ignored. Throws std::runtime_error
// naming the offending field on missing/malformed input.
Message decode(const std::string& line);

// Decimal formatting used for all floating-point wire and trace values.
std::string format_decimal(double value);

}  // namespace smart
