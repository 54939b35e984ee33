#pragma once

// Total-variation distance between the suit counts of n cards dealt from a
// shuffled deck (multivariate hypergeometric) and n fair (2d)-sided die rolls
// (multinomial).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deckwalk/combinatorics.hpp"

namespace deckwalk {

/// A deck of N = 2dK cards, K of each of the 2d suits.
class DeckSpec {
public:
    DeckSpec(int d, int per_suit);
    /// Rejects N that is not a positive multiple of 2d.
    static DeckSpec from_total(int d, long long total);

    int d() const noexcept { return d_; }
    int suits() const noexcept { return 2 * d_; }
    int per_suit() const noexcept { return k_; }
    int total() const noexcept { return 2 * d_ * k_; }

private:
    int d_;
    int k_;
};

enum class TvMethod { ExactRational, LogFloat, AsymptoticProfile, MonteCarlo };
enum class TvMode { ExactRational, LogFloat };

std::string to_string(TvMethod m);

struct TVEstimate {
    double value = 0.0;
    TvMethod method = TvMethod::LogFloat;
    std::optional<double> error_bound;  // empty means exact
    std::optional<ExactRational> exact;
    std::uint64_t terms = 0;

    bool is_exact() const noexcept { return !error_bound.has_value(); }
};

/// log f(λ) for a fixed (N, 2d, n), tabulated once so that every
/// evaluation costs O(2d).
///
/// f = (2d)^n C(N-n; K-λ) / C(N; K,...,K). Because N = 2dK the powers of 2d,
/// K and N cancel and
///   log f = Σ_i Σ_{j<λ_i} log1p(-j/K) - Σ_{j<n} log1p(-j/N).
class LogDensityRatio {
public:
    LogDensityRatio(const DeckSpec& deck, int n);

    /// -inf when some part exceeds K.
    double operator()(std::span<const int> lambda) const;

private:
    int k_;
    std::vector<double> per_suit_;  // index t: Σ_{j<t} log1p(-j/K), t <= min(n, K)
    double deck_term_ = 0.0;
};

LogValue hypergeom_log_pmf(const CompositionVec& lambda, const DeckSpec& deck, int n);
LogValue multinomial_log_pmf(const CompositionVec& lambda, int n, int suits);
LogValue radon_nikodym_f(const CompositionVec& lambda, long long total_cards, int n);

ExactRational hypergeom_pmf_exact(const CompositionVec& lambda, const DeckSpec& deck, int n);
ExactRational multinomial_pmf_exact(const CompositionVec& lambda, int n, int suits);

/// Leading-order f at λ_i = (n + a_i√n)/(2d) with N = cn:
/// (c/(c-1))^{d-1/2} exp(-‖A‖²/(4d(c-1))).
double f_asymptotic(std::span<const double> a, double c, int d);

/// Compositions beyond which exact-rational mode is refused.
inline constexpr std::uint64_t kExactTermBudget = 1'000'000;

struct TvOptions {
    unsigned threads = 0;
    bool orbit_reduction = true;
};

TVEstimate tv_exact(const DeckSpec& deck, int n, TvMode mode, const TvOptions& opts = {});

/// Σ_λ [P_H(λ) - P_B(λ)]^+ over the full composition set, in exact
/// arithmetic. An independent route to d_n(N) used for cross-checks.
ExactRational tv_exact_by_pmf_difference(const DeckSpec& deck, int n);

struct LocalizationReport {
    std::uint64_t delta_size = 0;  // |Δ_n| counted over compositions
    double max_norm = 0.0;         // max ‖ψ(λ)‖ over Δ_n
    double radius = 0.0;           // r(c)
    double slack = 0.0;            // max_norm - radius
    double max_log_f = 0.0;
    double min_log_f = 0.0;        // over Δ_n; 0 when every member has f = 1
};

/// Enumerates Δ_n = {λ : f(λ) ≥ 1} and measures how far ψ(λ) reaches.
/// Requires round(c·n) == deck.total().
LocalizationReport delta_localization_check(const DeckSpec& deck, int n, double c);

/// ψ(λ)_i = 2dλ_i/√n - √n.
std::vector<double> rescale_to_hyperplane(std::span<const int> lambda, int n);

}  // namespace deckwalk
