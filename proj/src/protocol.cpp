#include "smart/protocol.hpp"

#include <cstdio>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace smart {

using nlohmann::json;

bool EnqueueMsg::operator==(const EnqueueMsg& o) const {
    if (robot != o.robot || seq != o.seq || sim_time != o.sim_time) return false;
    const Action& a = action;
    const Action& b = o.action;
    return a.kind == b.kind && a.angle_deg == b.angle_deg && a.from == b.from && a.into == b.into &&
           a.toward == b.toward && a.unsplit == b.unsplit && a.ref_time == b.ref_time;
}

std::string format_decimal(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    std::string s(buf);
    size_t dot = s.find('.');
    size_t last = s.find_last_not_of('0');
    if (last == dot) last -= 1;  // drop the bare point too
    s.erase(last + 1);
    if (s == "-0") s = "0";
    return s;
}

namespace {

std::string action_params_json(const Action& a) {
    std::string out = "{";
    if (a.kind == ActionKind::Rotate) {
        out += "\"angle\":" + std::to_string(a.angle_deg);
    } else {
        out += "\"from\":[" + std::to_string(a.from.x) + "," + std::to_string(a.from.y) + "]";
        out += ",\"into\":[" + std::to_string(a.into.x) + "," + std::to_string(a.into.y) + "]";
        out += ",\"toward\":\"" + std::string(1, to_char(a.toward)) + "\"";
        if (a.unsplit) out += ",\"unsplit\":true";
    }
    out += ",\"ref_time\":" + std::to_string(a.ref_time);
    out += "}";
    return out;
}

[[noreturn]] void missing(const std::string& field) {
    throw std::runtime_error("missing field " + field);
}

const json& require(const json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end()) missing(field);
    return *it;
}

int require_int(const json& j, const char* field) {
    const json& v = require(j, field);
    if (!v.is_number_integer()) throw std::runtime_error(std::string("malformed number in field ") + field);
    return v.get<int>();
}

double require_number(const json& j, const char* field) {
    const json& v = require(j, field);
    if (!v.is_number()) throw std::runtime_error(std::string("malformed number in field ") + field);
    return v.get<double>();
}

Cell require_cell(const json& j, const char* field) {
    const json& v = require(j, field);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
        throw std::runtime_error(std::string("malformed cell in field ") + field);
    return {v[0].get<int>(), v[1].get<int>()};
}

Action decode_action(const json& j) {
    const json& aj = require(j, "action");
    std::string kind = require(aj, "kind").get<std::string>();
    const json& p = require(aj, "params");
    Action a;
    if (kind == "rotate") {
        a.kind = ActionKind::Rotate;
        a.angle_deg = require_int(p, "angle");
    } else if (kind == "move_exit" || kind == "move_enter") {
        a.kind = kind == "move_exit" ? ActionKind::MoveExit : ActionKind::MoveEnter;
        a.from = require_cell(p, "from");
        a.into = require_cell(p, "into");
        std::string toward = require(p, "toward").get<std::string>();
        if (toward.size() != 1) throw std::runtime_error("malformed field toward");
        a.toward = orientation_from_char(toward[0]);
        a.unsplit = p.value("unsplit", false);
    } else {
        throw std::runtime_error("unknown action kind '" + kind + "'");
    }
    a.ref_time = require_int(p, "ref_time");
    return a;
}

}  // namespace

std::string encode(const Message& msg) {
    std::string line = std::visit(
        [](const auto& m) -> std::string {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, HelloMsg>) {
                return "{\"type\":\"hello\",\"robot\":" + std::to_string(m.robot) + "}";
            } else if constexpr (std::is_same_v<T, EnqueueMsg>) {
                return "{\"type\":\"enqueue\",\"robot\":" + std::to_string(m.robot) +
                       ",\"seq\":" + std::to_string(m.seq) +
                       ",\"action\":{\"kind\":\"" + to_string(m.action.kind) +
                       "\",\"params\":" + action_params_json(m.action) +
                       "},\"sim_time\":" + format_decimal(m.sim_time) + "}";
            } else if constexpr (std::is_same_v<T, DoneMsg>) {
                return "{\"type\":\"done\",\"robot\":" + std::to_string(m.robot) +
                       ",\"seq\":" + std::to_string(m.seq) +
                       ",\"sim_time\":" + format_decimal(m.sim_time) + "}";
            } else if constexpr (std::is_same_v<T, StateMsg>) {
                return "{\"type\":\"state\",\"robot\":" + std::to_string(m.robot) +
                       ",\"x\":" + format_decimal(m.x) + ",\"y\":" + format_decimal(m.y) +
                       ",\"theta\":" + format_decimal(m.theta) +
                       ",\"v_l\":" + format_decimal(m.v_l) + ",\"v_r\":" + format_decimal(m.v_r) +
                       ",\"queue_len\":" + std::to_string(m.queue_len) +
                       ",\"sim_time\":" + format_decimal(m.sim_time) + "}";
            } else {
                return "{\"type\":\"shutdown\"}";
            }
        },
        msg);
    line += '\n';
    return line;
}

Message decode(const std::string& line) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw std::runtime_error("malformed JSON line");
    if (!j.is_object()) throw std::runtime_error("message is not a JSON object");
    auto type_it = j.find("type");
    if (type_it == j.end()) missing("type");
    std::string type = type_it->get<std::string>();

    if (type == "hello") {
        HelloMsg m;
        m.robot = require_int(j, "robot");
        return m;
    }
    if (type == "enqueue") {
        EnqueueMsg m;
        m.robot = require_int(j, "robot");
        m.seq = require_int(j, "seq");
        m.action = decode_action(j);
        m.action.robot_id = m.robot;
        m.action.seq = m.seq;
        m.sim_time = require_number(j, "sim_time");
        return m;
    }
    if (type == "done") {
        DoneMsg m;
        m.robot = require_int(j, "robot");
        m.seq = require_int(j, "seq");
        m.sim_time = require_number(j, "sim_time");
        return m;
    }
    if (type == "state") {
        StateMsg m;
        m.robot = require_int(j, "robot");
        m.x = require_number(j, "x");
        m.y = require_number(j, "y");
        m.theta = require_number(j, "theta");
        m.v_l = require_number(j, "v_l");
        m.v_r = require_number(j, "v_r");
        m.queue_len = require_int(j, "queue_len");
        m.sim_time = require_number(j, "sim_time");
        return m;
    }
    if (type == "shutdown") return ShutdownMsg{};
    throw std::runtime_error("unknown type '" + type + "'");
}

}  // namespace smart
