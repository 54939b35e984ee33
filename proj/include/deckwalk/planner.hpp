#pragma once

// Deck sizing: smallest deck for an n-step walk, or longest walk for a deck,
// under a total-variation budget ε.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace deckwalk {

enum class PlanMethod { Asymptotic, ExactRefined };
std::string to_string(PlanMethod m);

struct CSolution {
    double c_star = 0.0;
    double profile_at_c = 0.0;
    double bracket = 0.0;  // width of the final bisection bracket (0 if c_star = 2d)
};

/// Smallest c >= 2d with profile(c) <= ε, by bisection on the decreasing
/// profile. Returns 2d when profile(2d) <= ε already.
CSolution solve_c(int d, double epsilon);
inline double solve_c_for_epsilon(int d, double epsilon) { return solve_c(d, epsilon).c_star; }

struct PlanOptions {
    unsigned threads = 0;
    std::uint64_t exact_budget = 1'000'000;  // max compositions per exact evaluation
    int deck_window = 5;                     // multiples of 2d scanned each way
    bool refine = true;
};

struct PlanResult {
    double c_star = 0.0;
    long long asymptotic_answer = 0;
    long long answer = 0;
    PlanMethod method = PlanMethod::Asymptotic;
    /// Exact d_n(N) at the answer when refined, else the profile at c_star.
    double achieved_value = 0.0;
    bool feasible = true;
    /// Scanned exact values were monotone in the scanned variable.
    bool monotone_window = true;
    /// (N or n, d_n(N)) pairs evaluated during refinement, sorted by the first member.
    std::vector<std::pair<long long, double>> scanned;
};

PlanResult min_deck_for_threshold(int d, int n, double epsilon, const PlanOptions& opts = {});
PlanResult max_steps_for_deck(int d, long long total_cards, double epsilon, const PlanOptions& opts = {});

}  // namespace deckwalk
