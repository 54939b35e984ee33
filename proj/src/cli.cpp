#include "deckwalk/cli.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <numeric>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "deckwalk/errors.hpp"
#include "deckwalk/exact_tv.hpp"
#include "deckwalk/parallel.hpp"
#include "deckwalk/planner.hpp"
#include "deckwalk/profile.hpp"
#include "deckwalk/run_record.hpp"
#include "deckwalk/simulator.hpp"

namespace deckwalk {

namespace {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

constexpr std::array<double, 6> kTableC = {2.00, 2.94, 5.35, 24.70, 48.89, 242.47};
constexpr std::array<double, 6> kTableEps = {0.160, 0.100, 0.050, 0.010, 0.005, 0.001};

struct Common {
    bool json = false;
    unsigned threads = 0;
};

// Output file that fails loudly; "-" means the given stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : path_(path) {
        if (path == "-") {
            os_ = &fallback;
            return;
        }
        file_.open(path, std::ios::binary | std::ios::trunc);
        if (!file_) throw IoError("cannot open '" + path + "' for writing");
        os_ = &file_;
    }
    std::ostream& stream() { return *os_; }
    void close() {
        os_->flush();
        if (!*os_) throw IoError("write to '" + path_ + "' failed");
        if (file_.is_open()) file_.close();
    }

private:
    std::string path_;
    std::ofstream file_;
    std::ostream* os_ = nullptr;
};

void emit(const RunRecord& rec, const Common& common, std::ostream& out, const std::string& human) {
    if (common.json) {
        out << rec.to_json().dump(2) << '\n';
    } else {
        out << human;
    }
}

std::string row(const std::string& key, const std::string& value) {
    std::ostringstream os;
    os << "  " << key;
    for (std::size_t i = key.size(); i < 14; ++i) os << ' ';
    os << value << '\n';
    return os.str();
}

ordered_json bound_json(const TVEstimate& est) {
    return est.error_bound ? ordered_json(*est.error_bound) : ordered_json("exact");
}

// ---------------------------------------------------------------------------

struct ExactArgs {
    int d = 1;
    int n = 1;
    long long total = 0;
    std::string mode = "float";
};

RunRecord cmd_exact(const ExactArgs& a, const Common& common, std::string& human) {
    const DeckSpec deck = DeckSpec::from_total(a.d, a.total);
    const TvMode mode = a.mode == "rational" ? TvMode::ExactRational : TvMode::LogFloat;
    const TVEstimate est = tv_exact(deck, a.n, mode, {.threads = common.threads});

    RunRecord rec;
    rec.params = {{"d", a.d}, {"n", a.n}, {"N", deck.total()}, {"mode", a.mode}};
    rec.method = to_string(est.method);
    rec.values["value"] = est.value;
    if (est.exact) rec.values["fraction"] = est.exact->str();
    rec.values["terms"] = est.terms;
    rec.error_bound = bound_json(est);

    human = "d_n(N) for d=" + std::to_string(a.d) + ", n=" + std::to_string(a.n) + ", N=" +
            std::to_string(deck.total()) + "\n";
    human += row("method", rec.method);
    human += row("value", format_real(est.value));
    if (est.exact) human += row("fraction", est.exact->str());
    human += row("error_bound", est.error_bound ? format_real(*est.error_bound) : "exact");
    human += row("terms", std::to_string(est.terms));
    return rec;
}

struct ProfileArgs {
    int d = 1;
    double c = 2.0;
    std::string method;  // empty: closed when available
};

RunRecord cmd_profile(const ProfileArgs& a, std::string& human) {
    std::string method = a.method.empty() ? (a.d <= 2 ? "closed" : "quadrature") : a.method;
    RunRecord rec;
    rec.params = {{"d", a.d}, {"c", a.c}, {"method", method}};
    rec.method = method;
    double value = 0.0;
    double err = 0.0;
    bool warn = false;
    if (method == "closed") {
        if (a.d == 1) {
            value = profile_d1_closed(a.c);
        } else if (a.d == 2) {
            value = profile_d2_closed(a.c);
        } else {
            throw DomainError("no closed form for d = " + std::to_string(a.d) + "; use --method quadrature");
        }
    } else {
        const ProfileValue pv = profile_integral(ProfileParams::make(a.c, a.d));
        value = pv.value;
        err = pv.quadrature_error;
        warn = pv.below_theorem_range;
    }
    rec.values["profile"] = value;
    rec.values["radius"] = radius(a.c, a.d);
    rec.values["below_theorem_range"] = warn;
    rec.error_bound = err;

    human = "asymptotic profile for d=" + std::to_string(a.d) + ", c=" + format_real(a.c) + "\n";
    human += row("method", method);
    human += row("profile", format_real(value));
    human += row("radius", format_real(radius(a.c, a.d)));
    if (method == "quadrature") human += row("quad_error", format_real(err));
    if (warn) human += "  warning: c < 2d lies outside the range covered by the limit theorem\n";
    return rec;
}

RunRecord cmd_table1(std::string& human) {
    RunRecord rec;
    rec.params = {{"d", 1}};
    rec.method = "closed";
    ordered_json forward = ordered_json::array();
    ordered_json inverse = ordered_json::array();
    std::ostringstream os;
    os << "profile at tabulated c (d=1)\n";
    os << "       c    profile\n";
    for (double c : kTableC) {
        const double p = profile_d1_closed(c);
        forward.push_back({{"c", c}, {"profile", p}});
        char line[64];
        std::snprintf(line, sizeof line, "%8.2f    %.3f\n", c, p);
        os << line;
    }
    os << "\nc solving profile(c) = eps (d=1)\n";
    os << "     eps          c\n";
    for (double eps : kTableEps) {
        const CSolution sol = solve_c(1, eps);
        inverse.push_back({{"epsilon", eps}, {"c", sol.c_star}, {"profile", sol.profile_at_c}});
        char line[64];
        std::snprintf(line, sizeof line, "   %.3f   %8.2f\n", eps, sol.c_star);
        os << line;
    }
    rec.values["forward"] = forward;
    rec.values["inverse"] = inverse;
    rec.error_bound = 1e-9;
    human = os.str();
    return rec;
}

struct SweepArgs {
    int d = 1;
    double c_min = 0.0;  // 0: use 2d
    double c_max = 300.0;
    int points = 200;
    std::string out;
};

RunRecord cmd_sweep(const SweepArgs& a, std::ostream& stdout_stream, std::string& human) {
    if (a.d < 1) throw DomainError("d must be >= 1");
    const double c_min = a.c_min > 0.0 ? a.c_min : 2.0 * a.d;
    if (c_min < 2.0 * a.d) throw DomainError("--c-min must be >= 2d");
    if (!(a.c_max > c_min)) throw DomainError("--c-max must exceed --c-min");
    if (a.points < 2) throw DomainError("--points must be >= 2");

    Sink sink(a.out, stdout_stream);
    auto& os = sink.stream();
    os << "c,profile\n";
    double first = 0.0;
    double last = 0.0;
    for (int i = 0; i < a.points; ++i) {
        double c = c_min * std::pow(a.c_max / c_min, static_cast<double>(i) / (a.points - 1));
        if (i == 0) c = c_min;
        if (i == a.points - 1) c = a.c_max;
        const double p = profile_value(a.d, c);
        if (i == 0) first = p;
        last = p;
        os << format_real(c) << ',' << format_real(p) << '\n';
    }
    sink.close();

    RunRecord rec;
    rec.params = {{"d", a.d}, {"c_min", c_min}, {"c_max", a.c_max}, {"points", a.points}, {"out", a.out}};
    rec.method = a.d <= 2 ? "closed" : "quadrature";
    rec.values = {{"first_profile", first}, {"last_profile", last}};
    rec.error_bound = nullptr;
    if (a.out != "-") human = "wrote " + std::to_string(a.points) + " rows to " + a.out + "\n";
    return rec;
}

struct PlanArgs {
    int d = 1;
    double eps = 0.1;
    long long n = 0;
    long long total = 0;
    bool no_refine = false;
};

RunRecord cmd_plan(const PlanArgs& a, const Common& common, std::string& human) {
    if ((a.n > 0) == (a.total > 0)) throw DomainError("give exactly one of --n or --N");
    PlanOptions opts;
    opts.threads = common.threads;
    opts.refine = !a.no_refine;
    const bool by_steps = a.n > 0;
    if (by_steps && a.n > std::numeric_limits<int>::max()) throw DomainError("--n too large");
    const PlanResult res = by_steps ? min_deck_for_threshold(a.d, static_cast<int>(a.n), a.eps, opts)
                                    : max_steps_for_deck(a.d, a.total, a.eps, opts);
    const std::string unit = by_steps ? "N" : "n";

    RunRecord rec;
    rec.params = {{"d", a.d}, {"eps", a.eps}};
    if (by_steps) {
        rec.params["n"] = a.n;
    } else {
        rec.params["N"] = a.total;
    }
    rec.params["refine"] = !a.no_refine;
    rec.method = to_string(res.method);
    rec.values["c_star"] = res.c_star;
    rec.values["asymptotic_" + unit] = res.asymptotic_answer;
    rec.values[unit] = res.answer;
    rec.values["achieved_value"] = res.achieved_value;
    rec.values["feasible"] = res.feasible;
    rec.values["monotone_window"] = res.monotone_window;
    ordered_json scanned = ordered_json::array();
    for (const auto& [k, v] : res.scanned) scanned.push_back({{unit, k}, {"tv", v}});
    rec.values["scanned"] = scanned;
    rec.error_bound = nullptr;

    human = by_steps ? "smallest deck for " + std::to_string(a.n) + " steps" : "longest walk for a deck of " + std::to_string(a.total);
    human += " (d=" + std::to_string(a.d) + ", eps=" + format_real(a.eps) + ")\n";
    human += row("c_star", format_real(res.c_star));
    human += row("asymptotic", unit + " = " + std::to_string(res.asymptotic_answer));
    human += row("answer", unit + " = " + std::to_string(res.answer));
    human += row("method", rec.method);
    human += row("achieved", format_real(res.achieved_value));
    if (!res.feasible) human += "  warning: threshold not met within the scanned window\n";
    if (!res.monotone_window) human += "  warning: scanned distances were not monotone\n";
    return rec;
}

struct SimArgs {
    int d = 1;
    long long total = 0;
    int n = 0;
    std::uint64_t samples = 1;
    std::uint64_t seed = 0;
    std::string estimator = "walks";
    std::string out;
};

RunRecord cmd_simulate(const SimArgs& a, const Common& common, std::ostream& stdout_stream, std::string& human) {
    const DeckSpec deck = DeckSpec::from_total(a.d, a.total);
    if (a.n < 0 || a.n > deck.total()) throw DomainError("--n must lie in [0, N]");
    RunRecord rec;
    rec.params = {{"d", a.d},         {"N", deck.total()},       {"n", a.n},        {"samples", a.samples},
                  {"estimator", a.estimator}, {"rng", Rng::kAlgorithm}, {"out", a.out}};
    rec.seed = a.seed;
    McOptions mc{.threads = common.threads};
    std::ostringstream os;

    if (a.estimator == "walks") {
        std::unique_ptr<Sink> sink;
        if (!a.out.empty()) {
            sink = std::make_unique<Sink>(a.out, stdout_stream);
            auto& f = sink->stream();
            f << "sample,step,suit";
            for (int i = 1; i <= a.d; ++i) f << ",x" << i;
            f << '\n';
        }
        double mean_sq = 0.0;
        for (std::uint64_t s = 0; s < a.samples; ++s) {
            Rng rng(a.seed, s);
            Permutation sigma;
            sigma.order.resize(static_cast<std::size_t>(deck.total()));
            std::iota(sigma.order.begin(), sigma.order.end(), 1);
            shuffle_in_place(sigma.order, rng);
            const Trajectory t = deal_walk(sigma, a.n, a.d);
            if (sink) {
                auto& f = sink->stream();
                for (std::size_t j = 0; j < t.positions.size(); ++j) {
                    f << s << ',' << j << ',';
                    if (j > 0) f << t.suits[j - 1];
                    for (int x : t.positions[j]) f << ',' << x;
                    f << '\n';
                }
            }
            double sq = 0.0;
            for (int x : t.positions.back()) sq += static_cast<double>(x) * x;
            mean_sq += sq;
        }
        if (sink) sink->close();
        mean_sq /= static_cast<double>(a.samples);
        rec.method = "simulation";
        rec.values["mean_squared_displacement"] = mean_sq;
        rec.error_bound = nullptr;
        os << "simulated " << a.samples << " walks of " << a.n << " steps\n";
        os << row("mean |X_n|^2", format_real(mean_sq));
    } else if (a.estimator == "tv") {
        const TVEstimate est = tv_monte_carlo(deck, a.n, a.samples, a.seed, mc);
        rec.method = to_string(est.method);
        rec.values["value"] = est.value;
        rec.error_bound = bound_json(est);
        if (!a.out.empty()) {
            Sink sink(a.out, stdout_stream);
            sink.stream() << "estimator,value,error_bound,samples,seed,rng\n"
                          << "tv," << format_real(est.value) << ',' << format_real(*est.error_bound) << ','
                          << a.samples << ',' << a.seed << ',' << Rng::kAlgorithm << '\n';
            sink.close();
        }
        os << "Monte-Carlo d_n(N) for d=" << a.d << ", n=" << a.n << ", N=" << deck.total() << "\n";
        os << row("value", format_real(est.value));
        os << row("3 sigma", format_real(*est.error_bound));
    } else if (a.estimator == "suitcount") {
        const SuitCountReport rep = empirical_suitcount_check(deck, a.n, a.samples, a.seed, mc);
        rec.method = "chi-square";
        rec.values = {{"statistic", rep.statistic},
                      {"degrees_of_freedom", rep.degrees_of_freedom},
                      {"p_value", rep.p_value},
                      {"significance", rep.significance},
                      {"passed", rep.passed}};
        rec.error_bound = nullptr;
        if (!a.out.empty()) {
            Sink sink(a.out, stdout_stream);
            auto& f = sink.stream();
            f << "lambda,observed,expected\n";
            for (const auto& bin : rep.bins) {
                std::string label = "pooled";
                if (bin.lambda.size() > 0) {
                    label.clear();
                    for (std::size_t i = 0; i < bin.lambda.size(); ++i) {
                        if (i) label += ';';
                        label += std::to_string(bin.lambda[i]);
                    }
                }
                f << label << ',' << bin.observed << ',' << format_real(bin.expected) << '\n';
            }
            sink.close();
        }
        os << "suit-count chi-square for d=" << a.d << ", n=" << a.n << ", N=" << deck.total() << "\n";
        os << row("statistic", format_real(rep.statistic));
        os << row("dof", std::to_string(rep.degrees_of_freedom));
        os << row("p_value", format_real(rep.p_value));
        os << row("result", rep.passed ? "pass" : "fail");
    } else {
        throw DomainError("unknown estimator '" + a.estimator + "'");
    }
    human = os.str();
    return rec;
}

std::string echo(int argc, const char* const* argv) {
    std::string s;
    for (int i = 1; i < argc; ++i) {
        if (i > 1) s += ' ';
        s += argv[i];
    }
    return s;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Total-variation analysis of random walks simulated with a shuffled deck", "deckwalk"};
    app.require_subcommand(1);
    Common common;
    app.add_flag("--json", common.json, "Print the run record as JSON");
    app.add_option("--threads", common.threads, "Worker threads (default: $DECKWALK_THREADS or hardware)");

    ExactArgs ex;
    auto* exact = app.add_subcommand("exact", "Exact d_n(N)");
    exact->add_option("--d", ex.d, "Dimension (2d suits)")->required();
    exact->add_option("--n", ex.n, "Steps")->required();
    exact->add_option("--N", ex.total, "Deck size, multiple of 2d")->required();
    exact->add_option("--mode", ex.mode, "rational | float")->check(CLI::IsMember({"rational", "float"}));

    ProfileArgs pr;
    auto* profile = app.add_subcommand("profile", "Asymptotic profile lim d_n(cn)");
    profile->add_option("--d", pr.d)->required();
    profile->add_option("--c", pr.c)->required();
    profile->add_option("--method", pr.method, "closed | quadrature")->check(CLI::IsMember({"closed", "quadrature"}));

    auto* table1 = app.add_subcommand("table1", "Profile at the tabulated c values and the inverse problem");

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Profile on a log-spaced c grid, as CSV");
    sweep->add_option("--d", sw.d)->required();
    sweep->add_option("--c-min", sw.c_min, "Default 2d");
    sweep->add_option("--c-max", sw.c_max);
    sweep->add_option("--points", sw.points);
    sweep->add_option("--out", sw.out, "CSV path, or - for stdout")->required();

    PlanArgs pl;
    auto* plan = app.add_subcommand("plan", "Deck sizing for a TV threshold");
    plan->add_option("--d", pl.d)->required();
    plan->add_option("--eps", pl.eps)->required();
    plan->add_option("--n", pl.n, "Steps: find the smallest deck");
    plan->add_option("--N", pl.total, "Deck: find the longest walk");
    plan->add_flag("--no-refine", pl.no_refine, "Skip exact refinement");

    SimArgs si;
    auto* simulate = app.add_subcommand("simulate", "Deck-driven walks and Monte-Carlo estimators");
    simulate->add_option("--d", si.d)->required();
    simulate->add_option("--N", si.total)->required();
    simulate->add_option("--n", si.n)->required();
    simulate->add_option("--samples", si.samples);
    simulate->add_option("--seed", si.seed);
    simulate->add_option("--estimator", si.estimator, "walks | tv | suitcount")
        ->check(CLI::IsMember({"walks", "tv", "suitcount"}));
    simulate->add_option("--out", si.out, "CSV path, or - for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        std::string human;
        RunRecord rec;
        if (*exact) {
            rec = cmd_exact(ex, common, human);
        } else if (*profile) {
            rec = cmd_profile(pr, human);
        } else if (*table1) {
            rec = cmd_table1(human);
        } else if (*sweep) {
            rec = cmd_sweep(sw, out, human);
        } else if (*plan) {
            rec = cmd_plan(pl, common, human);
        } else {
            rec = cmd_simulate(si, common, out, human);
        }
        rec.command = echo(argc, argv);
        rec.params["threads"] = resolve_threads(common.threads);
        rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        emit(rec, common, out, human);
        return kExitOk;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const CapacityError& e) {
        err << "capacity exceeded: " << e.what() << '\n';
        return kExitCapacity;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const NumericError& e) {
        err << "numerical failure: " << e.what() << " (achieved " << e.achieved_tolerance() << ")\n";
        return kExitFailure;
    }
}

}  // namespace deckwalk
