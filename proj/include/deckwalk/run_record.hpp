#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

namespace deckwalk {

using ordered_json = nlohmann::ordered_json;

/// Machine-readable account of one CLI invocation. Serializes with a fixed
/// field order: command, params, seed, method, values, error_bound, wall_time_s.
struct RunRecord {
    std::string command;
    ordered_json params = ordered_json::object();
    std::optional<std::uint64_t> seed;
    std::string method;
    ordered_json values = ordered_json::object();
    ordered_json error_bound;  // number, "exact", or null
    double wall_time_s = 0.0;

    ordered_json to_json() const;
    static RunRecord from_json(const ordered_json& j);

    friend bool operator==(const RunRecord& a, const RunRecord& b) { return a.to_json() == b.to_json(); }
};

/// printf("%.17g"): round-trippable doubles for CSV and tables.
std::string format_real(double x);

}  // namespace deckwalk
