#include "deckwalk/run_record.hpp"

#include <cstdio>

namespace deckwalk {

ordered_json RunRecord::to_json() const {
    ordered_json j;
    j["command"] = command;
    j["params"] = params;
    j["seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
    j["method"] = method;
    j["values"] = values;
    j["error_bound"] = error_bound;
    j["wall_time_s"] = wall_time_s;
    return j;
}

RunRecord RunRecord::from_json(const ordered_json& j) {
    RunRecord r;
    r.command = j.at("command").get<std::string>();
    r.params = j.at("params");
    if (!j.at("seed").is_null()) r.seed = j.at("seed").get<std::uint64_t>();
    r.method = j.at("method").get<std::string>();
    r.values = j.at("values");
    r.error_bound = j.at("error_bound");
    r.wall_time_s = j.at("wall_time_s").get<double>();
    return r;
}

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace deckwalk
