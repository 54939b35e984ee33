#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "deckwalk/cli.hpp"
#include "deckwalk/profile.hpp"
#include "deckwalk/run_record.hpp"

using namespace deckwalk;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "deckwalk");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Outcome o;
    o.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

ordered_json run_json(std::vector<std::string> args) {
    args.insert(args.begin(), "--json");
    const auto o = run(args);
    REQUIRE(o.code == 0);
    return ordered_json::parse(o.out);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("deckwalk_test_" + name);
}

}  // namespace

TEST_CASE("exact") {
    const auto j = run_json({"exact", "--d", "1", "--n", "2", "--N", "4", "--mode", "rational"});
    CHECK(j["method"] == "exact-rational");
    CHECK(j["values"]["fraction"] == "1/6");
    CHECK(j["values"]["value"].get<double>() == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(j["error_bound"] == "exact");
    CHECK(j["seed"].is_null());

    CHECK(run_json({"exact", "--d", "1", "--n", "1", "--N", "52"})["values"]["value"].get<double>() == 0.0);

    const auto deck = run_json({"exact", "--d", "1", "--n", "26", "--N", "52", "--mode", "rational"});
    CHECK(deck["values"]["fraction"] == "619267250471412005/3823590232386699264");
    const auto deck_float = run_json({"exact", "--d", "1", "--n", "26", "--N", "52"});
    CHECK(deck_float["method"] == "log-float");
    CHECK(std::abs(deck_float["values"]["value"].get<double>() - 0.16195962768867705) <= 1e-9);

    const auto text = run({"exact", "--d", "1", "--n", "2", "--N", "4", "--mode", "rational"});
    CHECK(text.code == 0);
    CHECK(text.out.find("1/6") != std::string::npos);

    CHECK(run({"exact", "--d", "1", "--n", "5", "--N", "4"}).code == kExitUsage);
    CHECK(run({"exact", "--d", "2", "--n", "3", "--N", "10"}).code == kExitUsage);
    CHECK(run({"exact", "--d", "1", "--n", "2"}).code == kExitUsage);
    CHECK(run({"exact", "--d", "1", "--n", "2", "--N", "4", "--mode", "fast"}).code == kExitUsage);
    const auto capacity = run({"exact", "--d", "6", "--n", "40", "--N", "120", "--mode", "rational"});
    CHECK(capacity.code == kExitCapacity);
    CHECK_FALSE(capacity.err.empty());
}

TEST_CASE("profile") {
    const auto j = run_json({"profile", "--d", "1", "--c", "2"});
    CHECK(j["values"]["profile"].get<double>() == doctest::Approx(0.16606407498351290).epsilon(1e-13));
    CHECK(j["error_bound"].get<double>() == 0.0);

    const auto q = run_json({"profile", "--d", "2", "--c", "4", "--method", "quadrature"});
    CHECK(std::abs(q["values"]["profile"].get<double>() - profile_d2_closed(4.0)) <= 1e-9);
    CHECK(q["error_bound"].is_number());

    CHECK(run({"profile", "--d", "1", "--c", "1.5"}).code == kExitUsage);
    CHECK(run({"profile", "--d", "2", "--c", "3"}).code == kExitUsage);
    CHECK(run({"profile", "--d", "1"}).code == kExitUsage);
}

TEST_CASE("table1") {
    const auto j = run_json({"table1"});
    const auto& forward = j["values"]["forward"];
    REQUIRE(forward.size() == 6);
    CHECK(forward[0]["c"].get<double>() == 2.0);
    CHECK(forward[0]["profile"].get<double>() == doctest::Approx(0.16606407498351290).epsilon(1e-13));
    const double table_eps[] = {0.160, 0.100, 0.050, 0.010, 0.005, 0.001};
    for (std::size_t i = 1; i < 6; ++i) {
        CHECK(std::abs(forward[i]["profile"].get<double>() - table_eps[i]) <= 5e-4);
    }
    const auto& inverse = j["values"]["inverse"];
    REQUIRE(inverse.size() == 6);
    CHECK(inverse[2]["epsilon"].get<double>() == 0.05);
    CHECK(std::abs(inverse[2]["c"].get<double>() - 5.35) <= 0.01);
    CHECK(inverse[3]["epsilon"].get<double>() == 0.01);
    CHECK(std::abs(inverse[3]["c"].get<double>() - 24.70) <= 0.01);
}

TEST_CASE("sweep") {
    const auto path = temp_file("sweep.csv");
    REQUIRE(run({"sweep", "--d", "1", "--c-min", "2", "--c-max", "300", "--points", "200", "--out", path.string()}).code == 0);
    const auto rows = read_csv(slurp(path));
    REQUIRE(rows.size() == 201);
    CHECK(rows[0] == std::vector<std::string>{"c", "profile"});
    CHECK(rows[1][0] == "2");
    CHECK(rows[200][0] == "300");
    double previous = 2.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double v = std::stod(rows[i][1]);
        CHECK(v < previous);
        previous = v;
    }

    const auto d2 = run({"sweep", "--d", "2", "--c-max", "300", "--out", "-"});
    REQUIRE(d2.code == 0);
    const auto d2rows = read_csv(d2.out);
    REQUIRE(d2rows.size() >= 2);
    CHECK(std::stod(d2rows[1][0]) == 4.0);
    CHECK(std::stod(d2rows[1][1]) == profile_d2_closed(4.0));
    CHECK(d2.out.find('\r') == std::string::npos);

    CHECK(run({"sweep", "--d", "1", "--out", "/nonexistent_deckwalk_dir/x.csv"}).code == kExitIo);
    CHECK(run({"sweep", "--d", "1", "--c-min", "1.5", "--out", "-"}).code == kExitUsage);
    std::filesystem::remove(path);
}

TEST_CASE("plan") {
    const auto steps = run_json({"plan", "--d", "1", "--eps", "0.100", "--N", "52"});
    CHECK(std::abs(steps["values"]["n"].get<long long>() - 17) <= 1);
    CHECK(steps["values"]["asymptotic_n"].get<long long>() == 17);

    const auto one = run_json({"plan", "--d", "1", "--eps", "0.5", "--n", "1"});
    CHECK(one["values"]["N"].get<long long>() == 2);

    const auto big = run_json({"plan", "--d", "1", "--eps", "0.001", "--n", "1000", "--no-refine"});
    CHECK(big["method"] == "asymptotic");
    CHECK(std::abs(big["values"]["asymptotic_N"].get<long long>() - 242470) <= 2);
    CHECK(big["values"]["asymptotic_N"].get<long long>() % 2 == 0);

    CHECK(run({"plan", "--d", "1", "--eps", "0.1"}).code == kExitUsage);
    CHECK(run({"plan", "--d", "1", "--eps", "0.1", "--n", "4", "--N", "8"}).code == kExitUsage);
    CHECK(run({"plan", "--d", "1", "--eps", "1.5", "--n", "4"}).code == kExitUsage);
}

TEST_CASE("simulate") {
    const auto a = temp_file("walks_a.csv");
    const auto b = temp_file("walks_b.csv");
    const std::vector<std::string> base = {"simulate", "--d", "2", "--N", "52", "--n", "20", "--samples", "50", "--seed", "17"};
    auto with_a = base;
    with_a.insert(with_a.end(), {"--out", a.string()});
    auto with_b = base;
    with_b.insert(with_b.end(), {"--out", b.string()});
    REQUIRE(run(with_a).code == 0);
    REQUIRE(run(with_b).code == 0);
    const auto bytes = slurp(a);
    CHECK(bytes == slurp(b));
    const auto rows = read_csv(bytes);
    CHECK(rows[0] == std::vector<std::string>{"sample", "step", "suit", "x1", "x2"});
    CHECK(rows.size() == 1 + 50 * 21);

    auto other = base;
    other[10] = "18";
    other.insert(other.end(), {"--out", b.string()});
    REQUIRE(run(other).code == 0);
    CHECK(bytes != slurp(b));

    const auto tv = run_json({"simulate", "--d", "1", "--N", "4", "--n", "2", "--samples", "1000000", "--estimator", "tv", "--seed", "5"});
    CHECK(tv["method"] == "monte-carlo");
    CHECK(tv["seed"].get<std::uint64_t>() == 5);
    CHECK(std::abs(tv["values"]["value"].get<double>() - 1.0 / 6.0) <= tv["error_bound"].get<double>());

    const auto chi = run_json({"simulate", "--d", "2", "--N", "8", "--n", "3", "--samples", "1000000", "--estimator", "suitcount", "--seed", "6"});
    CHECK(chi["values"]["passed"].get<bool>());
    CHECK(chi["values"]["p_value"].get<double>() > 0.001);

    CHECK(run({"simulate", "--d", "1", "--N", "4", "--n", "5"}).code == kExitUsage);
    CHECK(run({"simulate", "--d", "1", "--N", "4", "--n", "2", "--estimator", "magic"}).code == kExitUsage);
    CHECK(run({"simulate", "--d", "1", "--N", "4", "--n", "2", "--out", "/nonexistent_deckwalk_dir/w.csv"}).code == kExitIo);
    std::filesystem::remove(a);
    std::filesystem::remove(b);
}

TEST_CASE("run records round-trip and are deterministic") {
    const std::vector<std::vector<std::string>> commands = {
        {"exact", "--d", "1", "--n", "6", "--N", "12", "--mode", "rational"},
        {"exact", "--d", "2", "--n", "9", "--N", "16"},
        {"profile", "--d", "3", "--c", "9"},
        {"table1"},
        {"plan", "--d", "1", "--eps", "0.05", "--N", "52"},
        {"plan", "--d", "2", "--eps", "0.1", "--n", "10"},
        {"simulate", "--d", "1", "--N", "10", "--n", "4", "--samples", "1000", "--estimator", "tv", "--seed", "8"},
    };
    for (const auto& cmd : commands) {
        const auto first = run_json(cmd);
        const auto record = RunRecord::from_json(first);
        CHECK(record.to_json() == first);
        CHECK(record.to_json().dump() == first.dump());
        std::vector<std::string> keys;
        for (const auto& [k, v] : first.items()) keys.push_back(k);
        CHECK(keys == std::vector<std::string>{"command", "params", "seed", "method", "values", "error_bound", "wall_time_s"});

        auto second = run_json(cmd);
        auto a = first, b = second;
        a.erase("wall_time_s");
        b.erase("wall_time_s");
        CHECK(a.dump() == b.dump());
    }
}

TEST_CASE("thread flag") {
    const auto one = run_json({"--threads", "1", "exact", "--d", "2", "--n", "20", "--N", "40"});
    const auto three = run_json({"--threads", "3", "exact", "--d", "2", "--n", "20", "--N", "40"});
    CHECK(one["params"]["threads"] == 1);
    CHECK(three["params"]["threads"] == 3);
    CHECK(one["values"]["value"] == three["values"]["value"]);
}

TEST_CASE("usage errors") {
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"bogus"}).code == kExitUsage);
    CHECK(run({"exact", "--d", "x", "--n", "2", "--N", "4"}).code == kExitUsage);
    CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("format_real") {
    CHECK(format_real(0.1) == "0.10000000000000001");
    CHECK(format_real(2.0) == "2");
    CHECK(format_real(300.0) == "300");
}
