#pragma once

// Deck-driven walk simulation and Monte-Carlo estimators of d_n(N).

#include <cstdint>
#include <random>
#include <vector>

#include "deckwalk/combinatorics.hpp"
#include "deckwalk/exact_tv.hpp"

namespace deckwalk {

/// Seeded 64-bit generator. Stream `s` of seed `x` is mt19937_64 seeded with
/// SplitMix64 applied to (x, s), so workers get independent, reproducible
/// streams regardless of how many threads run them.
class Rng {
public:
    static constexpr const char* kAlgorithm = "mt19937_64+splitmix64";

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, bound), bound > 0, without modulo bias.
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

struct Permutation {
    std::vector<int> order;  // card labels 1..N
};

/// Uniform random permutation of 1..N (Fisher–Yates).
Permutation shuffle(int total_cards, std::uint64_t seed);
void shuffle_in_place(std::vector<int>& cards, Rng& rng);

/// Suit of card j: j mod 2d.
int suit_of(long long card, int d);

struct Trajectory {
    int d = 1;
    std::vector<int> suits;                   // length n
    std::vector<std::vector<int>> positions;  // n + 1 points of Z^d, starting at the origin
};

/// Suit 2i moves +e_{i+1}, suit 2i+1 moves −e_{i+1}.
Trajectory deal_walk(const Permutation& sigma, int n, int d);

struct McOptions {
    unsigned threads = 0;
};

/// Mean of [f(λ) − 1]^+ over λ ~ Multinomial(n; uniform over 2d suits);
/// error_bound is three standard errors.
TVEstimate tv_monte_carlo(const DeckSpec& deck, int n, std::uint64_t samples, std::uint64_t seed,
                          const McOptions& opts = {});

struct SuitCountBin {
    CompositionVec lambda;  // representative; pooled bins carry an empty vector
    std::uint64_t observed = 0;
    double expected = 0.0;
};

struct SuitCountReport {
    std::vector<SuitCountBin> bins;
    double statistic = 0.0;
    int degrees_of_freedom = 0;
    double p_value = 1.0;
    double significance = 0.001;
    bool passed = true;
    std::uint64_t impossible_draws = 0;  // observations of zero-probability λ
};

/// Shuffles `samples` decks, tallies the suit counts of the first n cards and
/// runs a chi-square goodness-of-fit test against the hypergeometric pmf.
/// Bins whose expected count is below 5 are pooled.
SuitCountReport empirical_suitcount_check(const DeckSpec& deck, int n, std::uint64_t samples, std::uint64_t seed,
                                          const McOptions& opts = {});

}  // namespace deckwalk
