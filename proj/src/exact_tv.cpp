#include "deckwalk/exact_tv.hpp"

#include <algorithm>
#include <cmath>

#include "deckwalk/errors.hpp"
#include "deckwalk/parallel.hpp"
#include "deckwalk/profile.hpp"

namespace deckwalk {

namespace {

constexpr std::uint64_t kFullEnumerationChunk = 4096;

void require_suits(const CompositionVec& lambda, int suits) {
    if (static_cast<int>(lambda.size()) != suits) {
        throw DomainError("composition has " + std::to_string(lambda.size()) + " parts, expected " +
                          std::to_string(suits));
    }
}

void require_steps(const CompositionVec& lambda, int n) {
    if (lambda.total() != n) {
        throw DomainError("composition sums to " + std::to_string(lambda.total()) + ", expected n = " +
                          std::to_string(n));
    }
}

void require_n_within_deck(int n, const DeckSpec& deck) {
    if (n < 0) throw DomainError("number of steps must be non-negative");
    if (n > deck.total()) {
        throw DomainError("cannot deal " + std::to_string(n) + " cards from a deck of " +
                          std::to_string(deck.total()));
    }
}

bool feasible(std::span<const int> lambda, int per_suit) {
    return std::all_of(lambda.begin(), lambda.end(), [per_suit](int p) { return p <= per_suit; });
}

// C(total; parts) for parts given as K - λ_i.
mpz_class complement_multinomial(std::span<const int> lambda, int per_suit) {
    mpz_class result = 1;
    mpz_class b;
    unsigned long partial = 0;
    for (int p : lambda) {
        const auto rest = static_cast<unsigned long>(per_suit - p);
        partial += rest;
        mpz_bin_uiui(b.get_mpz_t(), partial, rest);
        result *= b;
    }
    return result;
}

mpz_class multinomial_of(std::span<const int> lambda) {
    mpz_class result = 1;
    mpz_class b;
    unsigned long partial = 0;
    for (int p : lambda) {
        partial += static_cast<unsigned long>(p);
        mpz_bin_uiui(b.get_mpz_t(), partial, static_cast<unsigned long>(p));
        result *= b;
    }
    return result;
}

mpz_class power(int base, int exp) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), static_cast<unsigned long>(exp));
    return r;
}

// Iterates either the orbit-reduced or the full λ set for task `task`,
// calling visit(parts, weight).
template <typename Visit>
void visit_task(int n, int suits, bool orbits, std::size_t task, Visit&& visit) {
    if (orbits) {
        PartitionStream s(n, suits, PartitionStream::min_leading(n, suits) + static_cast<int>(task));
        while (s.next()) visit(s.current().parts(), s.orbit());
        return;
    }
    CompositionStream s(n, suits);
    const std::uint64_t begin = task * kFullEnumerationChunk;
    const std::uint64_t end = std::min<std::uint64_t>(begin + kFullEnumerationChunk, s.count());
    s.seek(begin);
    for (std::uint64_t i = begin; i < end && s.next(); ++i) visit(s.current().parts(), std::uint64_t{1});
}

std::size_t task_count(int n, int suits, bool orbits) {
    if (orbits) return static_cast<std::size_t>(n - PartitionStream::min_leading(n, suits) + 1);
    const std::uint64_t count = composition_count(n, suits);
    return static_cast<std::size_t>((count + kFullEnumerationChunk - 1) / kFullEnumerationChunk);
}

}  // namespace

// ---------------------------------------------------------------------------

DeckSpec::DeckSpec(int d, int per_suit) : d_(d), k_(per_suit) {
    if (d < 1) throw DomainError("deck dimension d must be >= 1");
    if (per_suit < 1) throw DomainError("deck must hold at least one card per suit");
    if (static_cast<long long>(2) * d * per_suit > std::numeric_limits<int>::max()) {
        throw DomainError("deck too large");
    }
}

DeckSpec DeckSpec::from_total(int d, long long total) {
    if (d < 1) throw DomainError("deck dimension d must be >= 1");
    const long long suits = 2LL * d;
    if (total < suits || total % suits != 0) {
        throw DomainError("deck size N = " + std::to_string(total) + " is not a positive multiple of 2d = " +
                          std::to_string(suits));
    }
    if (total > std::numeric_limits<int>::max()) throw DomainError("deck too large");
    return DeckSpec(d, static_cast<int>(total / suits));
}

std::string to_string(TvMethod m) {
    switch (m) {
        case TvMethod::ExactRational: return "exact-rational";
        case TvMethod::LogFloat: return "log-float";
        case TvMethod::AsymptoticProfile: return "asymptotic-profile";
        case TvMethod::MonteCarlo: return "monte-carlo";
    }
    return "unknown";
}

LogDensityRatio::LogDensityRatio(const DeckSpec& deck, int n) : k_(deck.per_suit()) {
    require_n_within_deck(n, deck);
    const int top = std::min(n, k_);
    per_suit_.assign(static_cast<std::size_t>(top) + 1, 0.0);
    const double k = k_;
    for (int t = 1; t <= top; ++t) {
        per_suit_[static_cast<std::size_t>(t)] = per_suit_[static_cast<std::size_t>(t) - 1] + std::log1p(-(t - 1) / k);
    }
    const double total = deck.total();
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += std::log1p(-j / total);
    deck_term_ = acc;
}

double LogDensityRatio::operator()(std::span<const int> lambda) const {
    double l = -deck_term_;
    for (int p : lambda) {
        if (p > k_) return -std::numeric_limits<double>::infinity();
        l += per_suit_[static_cast<std::size_t>(p)];
    }
    return l;
}

LogValue hypergeom_log_pmf(const CompositionVec& lambda, const DeckSpec& deck, int n) {
    require_n_within_deck(n, deck);
    require_suits(lambda, deck.suits());
    require_steps(lambda, n);
    if (!feasible(lambda.parts(), deck.per_suit())) return LogValue::zero();
    const LogDensityRatio ratio(deck, n);
    return LogValue::from_log(log_multinomial(n, lambda).log - n * std::log(deck.suits()) +
                              ratio(lambda.parts()));
}

LogValue multinomial_log_pmf(const CompositionVec& lambda, int n, int suits) {
    if (suits < 1) throw DomainError("need at least one suit");
    require_suits(lambda, suits);
    require_steps(lambda, n);
    return LogValue::from_log(log_multinomial(n, lambda).log - n * std::log(suits));
}

LogValue radon_nikodym_f(const CompositionVec& lambda, long long total_cards, int n) {
    const auto suits = static_cast<int>(lambda.size());
    if (suits < 2 || suits % 2 != 0) throw DomainError("composition must have 2d parts");
    const DeckSpec deck = DeckSpec::from_total(suits / 2, total_cards);
    require_n_within_deck(n, deck);
    require_steps(lambda, n);
    if (!feasible(lambda.parts(), deck.per_suit())) return LogValue::zero();
    return LogValue::from_log(LogDensityRatio(deck, n)(lambda.parts()));
}

ExactRational hypergeom_pmf_exact(const CompositionVec& lambda, const DeckSpec& deck, int n) {
    require_n_within_deck(n, deck);
    require_suits(lambda, deck.suits());
    require_steps(lambda, n);
    if (!feasible(lambda.parts(), deck.per_suit())) return ExactRational();
    const std::vector<int> full(static_cast<std::size_t>(deck.suits()), 0);
    return ExactRational(complement_multinomial(lambda.parts(), deck.per_suit()) * multinomial_of(lambda.parts()),
                         complement_multinomial(full, deck.per_suit()));
}

ExactRational multinomial_pmf_exact(const CompositionVec& lambda, int n, int suits) {
    if (suits < 1) throw DomainError("need at least one suit");
    require_suits(lambda, suits);
    require_steps(lambda, n);
    return ExactRational(multinomial_of(lambda.parts()), power(suits, n));
}

double f_asymptotic(std::span<const double> a, double c, int d) {
    if (d < 1) throw DomainError("f_asymptotic requires d >= 1");
    if (static_cast<int>(a.size()) != 2 * d) throw DomainError("f_asymptotic: vector length must be 2d");
    if (!(c > 1.0)) throw DomainError("f_asymptotic requires c > 1");
    require_zero_sum(a, "f_asymptotic");
    double norm2 = 0.0;
    for (double x : a) norm2 += x * x;
    const double log_ratio = -std::log1p(-1.0 / c);
    return std::exp((d - 0.5) * log_ratio - norm2 / (4.0 * d * (c - 1.0)));
}

// ---------------------------------------------------------------------------

TVEstimate tv_exact(const DeckSpec& deck, int n, TvMode mode, const TvOptions& opts) {
    if (n < 1) throw DomainError("tv_exact requires n >= 1");
    require_n_within_deck(n, deck);
    const int suits = deck.suits();
    const int per_suit = deck.per_suit();
    const bool orbits = opts.orbit_reduction;
    const std::size_t tasks = task_count(n, suits, orbits);

    TVEstimate est;
    if (mode == TvMode::ExactRational) {
        const std::uint64_t full_terms = composition_count(n, suits);
        if (full_terms > kExactTermBudget) {
            throw CapacityError("exact-rational mode needs " + std::to_string(full_terms) +
                                " terms; budget is " + std::to_string(kExactTermBudget));
        }
        const std::vector<int> none(static_cast<std::size_t>(suits), 0);
        const mpz_class deck_count = complement_multinomial(none, per_suit);
        const mpz_class walk_count = power(suits, n);

        struct Partial {
            mpz_class sum = 0;
            std::uint64_t terms = 0;
        };
        auto partials = parallel_map(tasks, opts.threads, [&](std::size_t task) {
            Partial p;
            visit_task(n, suits, orbits, task, [&](std::span<const int> lambda, std::uint64_t weight) {
                ++p.terms;
                if (!feasible(lambda, per_suit)) return;
                mpz_class excess = complement_multinomial(lambda, per_suit) * walk_count - deck_count;
                if (sgn(excess) <= 0) return;
                mpz_class w(static_cast<unsigned long>(weight));
                p.sum += w * multinomial_of(lambda) * excess;
            });
            return p;
        });
        mpz_class total = 0;
        for (const auto& p : partials) {
            total += p.sum;
            est.terms += p.terms;
        }
        ExactRational exact(total, deck_count * walk_count);
        est.value = std::clamp(exact.to_double(), 0.0, 1.0);
        est.method = TvMethod::ExactRational;
        est.error_bound.reset();
        est.exact = std::move(exact);
        return est;
    }

    const LogDensityRatio ratio(deck, n);
    std::vector<double> log_fact(static_cast<std::size_t>(n) + 1);
    for (int m = 0; m <= n; ++m) log_fact[static_cast<std::size_t>(m)] = log_factorial(m);
    const double log_walks = n * std::log(static_cast<double>(suits));

    auto partials = parallel_map(tasks, opts.threads, [&](std::size_t task) {
        LogKahanSum acc;
        visit_task(n, suits, orbits, task, [&](std::span<const int> lambda, std::uint64_t weight) {
            const double lf = ratio(lambda);
            if (!(lf > 0.0)) {
                acc.add_log(-std::numeric_limits<double>::infinity());
                return;
            }
            double l = log_fact[static_cast<std::size_t>(n)] - log_walks;
            for (int p : lambda) l -= log_fact[static_cast<std::size_t>(p)];
            l += std::log(static_cast<double>(weight)) + std::log(std::expm1(lf));
            acc.add_log(l);
        });
        return acc;
    });
    LogKahanSum total;
    for (const auto& p : partials) total.merge(p);
    est.value = std::clamp(total.value(), 0.0, 1.0);
    est.method = TvMethod::LogFloat;
    est.terms = total.terms();
    est.error_bound = 1e-9 * static_cast<double>(std::max<std::uint64_t>(est.terms, 1));
    return est;
}

ExactRational tv_exact_by_pmf_difference(const DeckSpec& deck, int n) {
    require_n_within_deck(n, deck);
    if (composition_count(n, deck.suits()) > kExactTermBudget) {
        throw CapacityError("pmf-difference route exceeds the exact term budget");
    }
    mpq_class total = 0;
    CompositionStream s(n, deck.suits());
    while (s.next()) {
        const auto& lambda = s.current();
        mpq_class diff = hypergeom_pmf_exact(lambda, deck, n).get() - multinomial_pmf_exact(lambda, n, deck.suits()).get();
        if (sgn(diff) > 0) total += diff;
    }
    return ExactRational(total);
}

std::vector<double> rescale_to_hyperplane(std::span<const int> lambda, int n) {
    if (n < 1) throw DomainError("rescaling needs n >= 1");
    const double root = std::sqrt(static_cast<double>(n));
    const double suits = static_cast<double>(lambda.size());
    std::vector<double> a;
    a.reserve(lambda.size());
    for (int p : lambda) a.push_back(suits * p / root - root);
    return a;
}

LocalizationReport delta_localization_check(const DeckSpec& deck, int n, double c) {
    if (n < 1) throw DomainError("localization check requires n >= 1");
    require_n_within_deck(n, deck);
    if (std::llround(c * n) != deck.total()) {
        throw DomainError("deck size does not match round(c*n)");
    }
    const LogDensityRatio ratio(deck, n);
    LocalizationReport report;
    report.radius = radius(c, deck.d());
    report.max_log_f = -std::numeric_limits<double>::infinity();
    report.min_log_f = std::numeric_limits<double>::infinity();
    PartitionStream s(n, deck.suits());
    while (s.next()) {
        const auto lambda = s.current().parts();
        const double lf = ratio(lambda);
        if (!(lf >= 0.0)) continue;
        report.delta_size += s.orbit();
        double norm2 = 0.0;
        for (double a : rescale_to_hyperplane(lambda, n)) norm2 += a * a;
        report.max_norm = std::max(report.max_norm, std::sqrt(norm2));
        report.max_log_f = std::max(report.max_log_f, lf);
        report.min_log_f = std::min(report.min_log_f, lf);
    }
    report.slack = report.max_norm - report.radius;
    return report;
}

}  // namespace deckwalk
