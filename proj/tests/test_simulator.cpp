#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "deckwalk/errors.hpp"
#include "deckwalk/exact_tv.hpp"
#include "deckwalk/simulator.hpp"

using namespace deckwalk;

TEST_CASE("rng") {
    Rng a(42), b(42), c(42, 1);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        differs |= (x != c.next_u64());
    }
    CHECK(differs);
    for (std::uint64_t bound : {1ull, 2ull, 3ull, 52ull, 1000003ull}) {
        for (int i = 0; i < 1000; ++i) CHECK(a.below(bound) < bound);
    }
    CHECK(splitmix64(0) != splitmix64(1));
    CHECK(std::string(Rng::kAlgorithm) == "mt19937_64+splitmix64");
}

TEST_CASE("shuffle") {
    CHECK(shuffle(1, 7).order == std::vector<int>{1});
    CHECK(shuffle(52, 9).order == shuffle(52, 9).order);
    CHECK(shuffle(52, 9).order != shuffle(52, 10).order);

    auto sorted = shuffle(52, 3).order;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> labels(52);
    std::iota(labels.begin(), labels.end(), 1);
    CHECK(sorted == labels);

    SUBCASE("uniform over the 24 orderings of 4 cards") {
        Rng rng(2024);
        std::map<std::vector<int>, long long> counts;
        const long long draws = 1'000'000;
        for (long long i = 0; i < draws; ++i) {
            std::vector<int> cards = {1, 2, 3, 4};
            shuffle_in_place(cards, rng);
            ++counts[cards];
        }
        REQUIRE(counts.size() == 24);
        const double expected = draws / 24.0;
        double stat = 0;
        for (const auto& [perm, count] : counts) {
            CHECK(std::abs(count / static_cast<double>(draws) - 1.0 / 24.0) <= 0.002);
            stat += (count - expected) * (count - expected) / expected;
        }
        const boost::math::chi_squared dist(23);
        CHECK(boost::math::cdf(boost::math::complement(dist, stat)) > 0.001);
    }
}

TEST_CASE("suit_of") {
    CHECK(suit_of(4, 2) == 0);
    CHECK(suit_of(7, 1) == 1);
    CHECK(suit_of(5, 2) == 1);
    CHECK(suit_of(52, 1) == 0);
}

TEST_CASE("deal_walk") {
    const Permutation identity{{1, 2, 3, 4}};
    const auto walk = deal_walk(identity, 4, 1);
    CHECK(walk.suits == std::vector<int>{1, 0, 1, 0});
    REQUIRE(walk.positions.size() == 5);
    const std::vector<int> xs = {0, -1, 0, -1, 0};
    for (std::size_t i = 0; i < 5; ++i) CHECK(walk.positions[i] == std::vector<int>{xs[i]});

    const auto empty = deal_walk(identity, 0, 1);
    CHECK(empty.suits.empty());
    REQUIRE(empty.positions.size() == 1);
    CHECK(empty.positions[0] == std::vector<int>{0});

    CHECK_THROWS_AS(deal_walk(identity, 5, 1), DomainError);

    SUBCASE("unit steps from the origin, all cards used once at n = N") {
        for (int d = 1; d <= 3; ++d) {
            const int total = 2 * d * 6;
            for (std::uint64_t seed = 0; seed < 20; ++seed) {
                const auto w = deal_walk(shuffle(total, seed), total, d);
                CHECK(std::all_of(w.positions[0].begin(), w.positions[0].end(), [](int x) { return x == 0; }));
                for (std::size_t s = 1; s < w.positions.size(); ++s) {
                    int l1 = 0;
                    for (int i = 0; i < d; ++i) l1 += std::abs(w.positions[s][static_cast<std::size_t>(i)] - w.positions[s - 1][static_cast<std::size_t>(i)]);
                    CHECK(l1 == 1);
                }
                std::vector<int> tally(static_cast<std::size_t>(2 * d), 0);
                for (int s : w.suits) ++tally[static_cast<std::size_t>(s)];
                CHECK(std::all_of(tally.begin(), tally.end(), [](int t) { return t == 6; }));
                // Every suit is used equally often, so the walk closes.
                CHECK(std::all_of(w.positions.back().begin(), w.positions.back().end(), [](int x) { return x == 0; }));
            }
        }
    }
}

TEST_CASE("tv_monte_carlo") {
    const DeckSpec small(1, 2);
    const auto est = tv_monte_carlo(small, 2, 1'000'000, 11);
    CHECK(est.method == TvMethod::MonteCarlo);
    REQUIRE(est.error_bound.has_value());
    CHECK(std::abs(est.value - 1.0 / 6.0) <= *est.error_bound);

    const auto zero = tv_monte_carlo(DeckSpec(2, 13), 1, 1000, 5);
    CHECK(zero.value == 0.0);
    CHECK(*zero.error_bound == 0.0);

    const auto deck52 = tv_monte_carlo(DeckSpec(1, 26), 26, 1'000'000, 12);
    CHECK(std::abs(deck52.value - 0.16195962768867705) <= *deck52.error_bound);

    SUBCASE("deterministic across thread counts") {
        const auto one = tv_monte_carlo(small, 2, 300'000, 99, McOptions{1});
        const auto three = tv_monte_carlo(small, 2, 300'000, 99, McOptions{3});
        CHECK(one.value == three.value);
        CHECK(*one.error_bound == *three.error_bound);
    }

    SUBCASE("consistent over repeated runs") {
        int inside = 0;
        for (std::uint64_t seed = 1000; seed < 1100; ++seed) {
            const auto run = tv_monte_carlo(small, 2, 100'000, seed);
            if (std::abs(run.value - 1.0 / 6.0) <= *run.error_bound) ++inside;
        }
        CHECK(inside >= 99);
    }
}

TEST_CASE("empirical_suitcount_check") {
    const auto report = empirical_suitcount_check(DeckSpec(1, 2), 2, 1'000'000, 21);
    CHECK(report.passed);
    CHECK(report.impossible_draws == 0);
    CHECK(report.p_value > 0.001);
    std::map<int, double> freq;
    for (const auto& bin : report.bins) {
        REQUIRE(bin.lambda.size() == 2);
        freq[bin.lambda[0]] = bin.observed / 1e6;
    }
    CHECK(std::abs(freq[0] - 1.0 / 6.0) <= 0.002);
    CHECK(std::abs(freq[1] - 2.0 / 3.0) <= 0.002);
    CHECK(std::abs(freq[2] - 1.0 / 6.0) <= 0.002);

    const auto d2 = empirical_suitcount_check(DeckSpec(2, 2), 3, 1'000'000, 22);
    CHECK(d2.passed);
    CHECK(d2.impossible_draws == 0);

    const auto full = empirical_suitcount_check(DeckSpec(2, 3), 12, 2000, 23);
    REQUIRE(full.bins.size() == 1);
    CHECK(full.bins[0].lambda == CompositionVec{3, 3, 3, 3});
    CHECK(full.bins[0].observed == 2000);

    const auto again = empirical_suitcount_check(DeckSpec(2, 2), 3, 50'000, 22);
    const auto again2 = empirical_suitcount_check(DeckSpec(2, 2), 3, 50'000, 22);
    CHECK(again.statistic == again2.statistic);
}
