#include "deckwalk/planner.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "deckwalk/combinatorics.hpp"
#include "deckwalk/errors.hpp"
#include "deckwalk/exact_tv.hpp"
#include "deckwalk/profile.hpp"

namespace deckwalk {

namespace {

// Largest deck the outward search will try; decks are indexed by int.
constexpr long long kDeckCap = 1LL << 30;

void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
}

double exact_distance(int d, long long total_cards, int n, unsigned threads) {
    const DeckSpec deck = DeckSpec::from_total(d, total_cards);
    return tv_exact(deck, n, TvMode::LogFloat, {.threads = threads}).value;
}

bool nonincreasing(const std::vector<std::pair<long long, double>>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i].second > v[i - 1].second) return false;
    }
    return true;
}

bool nondecreasing(const std::vector<std::pair<long long, double>>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i].second < v[i - 1].second) return false;
    }
    return true;
}

}  // namespace

std::string to_string(PlanMethod m) { return m == PlanMethod::Asymptotic ? "asymptotic" : "exact-refined"; }

CSolution solve_c(int d, double epsilon) {
    require_epsilon(epsilon);
    if (d < 1) throw DomainError("d must be >= 1");
    const double lo_start = 2.0 * d;
    CSolution sol;
    const double at_min = profile_value(d, lo_start);
    if (at_min <= epsilon) {
        sol.c_star = lo_start;
        sol.profile_at_c = at_min;
        return sol;
    }
    double lo = lo_start;
    double hi = 2.0 * lo_start;
    double p_hi = profile_value(d, hi);
    while (p_hi > epsilon) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e15) throw NumericError("no c found below 1e15 for this epsilon", p_hi);
        p_hi = profile_value(d, hi);
    }
    // Invariant: profile(lo) > ε >= profile(hi).
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double p = profile_value(d, mid);
        if (p > epsilon) {
            lo = mid;
        } else {
            hi = mid;
            p_hi = p;
        }
    }
    sol.c_star = hi;
    sol.profile_at_c = p_hi;
    sol.bracket = hi - lo;
    return sol;
}

PlanResult min_deck_for_threshold(int d, int n, double epsilon, const PlanOptions& opts) {
    require_epsilon(epsilon);
    if (d < 1) throw DomainError("d must be >= 1");
    if (n < 1) throw DomainError("number of steps must be >= 1");
    const long long suits = 2LL * d;
    const CSolution sol = solve_c(d, epsilon);

    PlanResult res;
    res.c_star = sol.c_star;
    const double target = std::max(sol.c_star * n, static_cast<double>(n));
    res.asymptotic_answer = static_cast<long long>(std::ceil(target / static_cast<double>(suits))) * suits;
    res.answer = res.asymptotic_answer;
    res.achieved_value = sol.profile_at_c;

    if (!opts.refine || composition_count(n, 2 * d) > opts.exact_budget) return res;

    res.method = PlanMethod::ExactRefined;
    if (n == 1) {
        // The first card is uniform over suits whatever the deck.
        res.answer = suits;
        res.achieved_value = 0.0;
        res.scanned = {{suits, 0.0}};
        return res;
    }

    const long long smallest = std::max<long long>(suits, (n + suits - 1) / suits * suits);
    std::map<long long, double> seen;
    auto tv_at = [&](long long total) {
        auto it = seen.find(total);
        if (it != seen.end()) return it->second;
        const double v = exact_distance(d, total, n, opts.threads);
        seen.emplace(total, v);
        return v;
    };

    auto fits = [&](long long total) { return tv_at(total) <= epsilon; };

    // Local window first. If it ends without crossing ε, gallop outward and
    // bisect so the answer always sits next to a violating deck.
    long long deck = std::max(res.asymptotic_answer, smallest);
    if (fits(deck)) {
        for (int step = 0; step < opts.deck_window; ++step) {
            if (deck - suits < smallest || !fits(deck - suits)) break;
            deck -= suits;
        }
        if (deck - suits >= smallest && fits(deck - suits)) {
            long long bad = smallest - suits;
            for (long long jump = suits; deck > smallest; jump *= 2) {
                const long long probe = std::max(deck - jump, smallest);
                if (!fits(probe)) {
                    bad = probe;
                    break;
                }
                deck = probe;
            }
            while (deck - bad > suits) {
                const long long mid = bad + (deck - bad) / suits / 2 * suits;
                (fits(mid) ? deck : bad) = mid;
            }
        }
    } else {
        for (int step = 0; step < opts.deck_window && !fits(deck); ++step) deck += suits;
        if (!fits(deck)) {
            long long bad = deck;
            long long good = -1;
            for (long long jump = suits; bad + jump <= kDeckCap; jump *= 2) {
                if (fits(bad + jump)) {
                    good = bad + jump;
                    break;
                }
                bad += jump;
            }
            if (good < 0) {
                deck = bad;
            } else {
                while (good - bad > suits) {
                    const long long mid = bad + (good - bad) / suits / 2 * suits;
                    (fits(mid) ? good : bad) = mid;
                }
                deck = good;
            }
        }
    }
    res.answer = deck;
    res.achieved_value = tv_at(deck);
    res.feasible = res.achieved_value <= epsilon;
    res.scanned.assign(seen.begin(), seen.end());
    res.monotone_window = nonincreasing(res.scanned);
    return res;
}

PlanResult max_steps_for_deck(int d, long long total_cards, double epsilon, const PlanOptions& opts) {
    require_epsilon(epsilon);
    const DeckSpec deck = DeckSpec::from_total(d, total_cards);
    const CSolution sol = solve_c(d, epsilon);

    PlanResult res;
    res.c_star = sol.c_star;
    const double ratio = static_cast<double>(deck.total()) / sol.c_star;
    res.asymptotic_answer = std::clamp<long long>(static_cast<long long>(std::floor(ratio + 1e-9)), 1, deck.total());
    res.answer = res.asymptotic_answer;
    res.achieved_value = sol.profile_at_c;
    if (!opts.refine) return res;

    // Largest n whose exact evaluation fits the budget.
    long long cap = deck.total();
    if (composition_count(static_cast<int>(cap), deck.suits()) > opts.exact_budget) {
        long long lo = 1, hi = cap;
        while (lo < hi) {
            const long long mid = lo + (hi - lo + 1) / 2;
            if (composition_count(static_cast<int>(mid), deck.suits()) <= opts.exact_budget) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        cap = lo;
    }

    // d_n(N) is nondecreasing in n and d_1(N) = 0, so bisect for the last n
    // with d_n(N) <= ε.
    std::map<long long, double> seen;
    auto tv_at = [&](long long steps) {
        auto it = seen.find(steps);
        if (it != seen.end()) return it->second;
        const double v = steps == 1 ? 0.0 : exact_distance(d, deck.total(), static_cast<int>(steps), opts.threads);
        seen.emplace(steps, v);
        return v;
    };
    long long lo = 1, hi = cap;
    while (lo < hi) {
        const long long mid = lo + (hi - lo + 1) / 2;
        if (tv_at(mid) <= epsilon) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    if (lo < cap) tv_at(lo + 1);
    res.method = PlanMethod::ExactRefined;
    res.answer = lo;
    res.achieved_value = tv_at(lo);
    res.feasible = true;
    res.scanned.assign(seen.begin(), seen.end());
    res.monotone_window = nondecreasing(res.scanned);
    return res;
}

}  // namespace deckwalk
