#include "deckwalk/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "deckwalk/errors.hpp"
#include "deckwalk/parallel.hpp"

namespace deckwalk {

namespace {

constexpr std::uint64_t kBlock = 1u << 16;

std::size_t block_count(std::uint64_t samples) { return static_cast<std::size_t>((samples + kBlock - 1) / kBlock); }

std::uint64_t block_size(std::size_t b, std::uint64_t samples) {
    return std::min<std::uint64_t>(kBlock, samples - static_cast<std::uint64_t>(b) * kBlock);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

std::uint64_t Rng::below(std::uint64_t bound) {
    // Lemire's multiply-and-reject.
    unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<unsigned __int128>(engine_()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

void shuffle_in_place(std::vector<int>& cards, Rng& rng) {
    for (std::size_t i = cards.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(cards[i - 1], cards[j]);
    }
}

Permutation shuffle(int total_cards, std::uint64_t seed) {
    if (total_cards < 1) throw DomainError("shuffle needs at least one card");
    Permutation p;
    p.order.resize(static_cast<std::size_t>(total_cards));
    std::iota(p.order.begin(), p.order.end(), 1);
    Rng rng(seed);
    shuffle_in_place(p.order, rng);
    return p;
}

int suit_of(long long card, int d) {
    if (card < 1) throw DomainError("card labels start at 1");
    if (d < 1) throw DomainError("d must be >= 1");
    return static_cast<int>(card % (2LL * d));
}

Trajectory deal_walk(const Permutation& sigma, int n, int d) {
    if (d < 1) throw DomainError("d must be >= 1");
    if (n < 0) throw DomainError("number of steps must be non-negative");
    if (static_cast<std::size_t>(n) > sigma.order.size()) {
        throw DomainError("cannot deal " + std::to_string(n) + " cards from a deck of " +
                          std::to_string(sigma.order.size()));
    }
    Trajectory t;
    t.d = d;
    t.suits.reserve(static_cast<std::size_t>(n));
    t.positions.reserve(static_cast<std::size_t>(n) + 1);
    std::vector<int> pos(static_cast<std::size_t>(d), 0);
    t.positions.push_back(pos);
    for (int j = 0; j < n; ++j) {
        const int suit = suit_of(sigma.order[static_cast<std::size_t>(j)], d);
        t.suits.push_back(suit);
        pos[static_cast<std::size_t>(suit / 2)] += (suit % 2 == 0) ? 1 : -1;
        t.positions.push_back(pos);
    }
    return t;
}

TVEstimate tv_monte_carlo(const DeckSpec& deck, int n, std::uint64_t samples, std::uint64_t seed,
                          const McOptions& opts) {
    if (samples < 1) throw DomainError("need at least one sample");
    if (n < 1) throw DomainError("tv_monte_carlo requires n >= 1");
    const LogDensityRatio ratio(deck, n);
    const int suits = deck.suits();

    struct Moments {
        double sum = 0.0;
        double sum_sq = 0.0;
    };
    auto blocks = parallel_map(block_count(samples), opts.threads, [&](std::size_t b) {
        Rng rng(seed, b);
        Moments m;
        std::vector<int> lambda(static_cast<std::size_t>(suits));
        const std::uint64_t count = block_size(b, samples);
        for (std::uint64_t s = 0; s < count; ++s) {
            std::fill(lambda.begin(), lambda.end(), 0);
            for (int j = 0; j < n; ++j) ++lambda[rng.below(static_cast<std::uint64_t>(suits))];
            const double lf = ratio(lambda);
            if (lf > 0.0) {
                const double x = std::expm1(lf);
                m.sum += x;
                m.sum_sq += x * x;
            }
        }
        return m;
    });
    Moments total;
    for (const auto& m : blocks) {
        total.sum += m.sum;
        total.sum_sq += m.sum_sq;
    }
    const double count = static_cast<double>(samples);
    const double mean = total.sum / count;
    const double var = samples > 1 ? std::max(0.0, (total.sum_sq - count * mean * mean) / (count - 1.0)) : 0.0;

    TVEstimate est;
    est.method = TvMethod::MonteCarlo;
    est.value = std::clamp(mean, 0.0, 1.0);
    est.error_bound = 3.0 * std::sqrt(var / count);
    est.terms = samples;
    return est;
}

SuitCountReport empirical_suitcount_check(const DeckSpec& deck, int n, std::uint64_t samples, std::uint64_t seed,
                                          const McOptions& opts) {
    if (samples < 1) throw DomainError("need at least one sample");
    if (n < 0 || n > deck.total()) throw DomainError("n must lie in [0, N]");
    const int suits = deck.suits();
    const int d = deck.d();

    using Tally = std::map<std::vector<int>, std::uint64_t>;
    auto blocks = parallel_map(block_count(samples), opts.threads, [&](std::size_t b) {
        Rng rng(seed, b);
        Tally tally;
        std::vector<int> cards(static_cast<std::size_t>(deck.total()));
        std::vector<int> lambda(static_cast<std::size_t>(suits));
        const std::uint64_t count = block_size(b, samples);
        for (std::uint64_t s = 0; s < count; ++s) {
            std::iota(cards.begin(), cards.end(), 1);
            shuffle_in_place(cards, rng);
            std::fill(lambda.begin(), lambda.end(), 0);
            for (int j = 0; j < n; ++j) ++lambda[static_cast<std::size_t>(suit_of(cards[static_cast<std::size_t>(j)], d))];
            ++tally[lambda];
        }
        return tally;
    });
    Tally tally;
    for (const auto& t : blocks) {
        for (const auto& [k, v] : t) tally[k] += v;
    }

    SuitCountReport report;
    SuitCountBin pooled;
    CompositionStream stream(n, suits);
    const double total = static_cast<double>(samples);
    while (stream.next()) {
        const auto& lambda = stream.current();
        const double p = hypergeom_log_pmf(lambda, deck, n).value();
        const std::vector<int> key(lambda.parts().begin(), lambda.parts().end());
        const auto it = tally.find(key);
        const std::uint64_t observed = it == tally.end() ? 0 : it->second;
        if (p == 0.0) {
            report.impossible_draws += observed;
            continue;
        }
        const double expected = total * p;
        if (expected < 5.0) {
            pooled.observed += observed;
            pooled.expected += expected;
        } else {
            report.bins.push_back({lambda, observed, expected});
        }
    }
    if (pooled.expected > 0.0) report.bins.push_back(pooled);

    for (const auto& bin : report.bins) {
        const double diff = static_cast<double>(bin.observed) - bin.expected;
        report.statistic += diff * diff / bin.expected;
    }
    report.degrees_of_freedom = static_cast<int>(report.bins.size()) - 1;
    if (report.degrees_of_freedom > 0) {
        boost::math::chi_squared_distribution<double> chi2(report.degrees_of_freedom);
        report.p_value = boost::math::cdf(boost::math::complement(chi2, report.statistic));
    } else {
        report.p_value = 1.0;
    }
    if (report.impossible_draws > 0) report.p_value = 0.0;
    report.passed = report.p_value >= report.significance;
    return report;
}

}  // namespace deckwalk
