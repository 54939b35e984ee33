#pragma once

// Exact and log-scale multinomial machinery shared by the rest of the
// library: factorials, multinomial coefficients, composition and partition
// streams, Stirling-type estimates.

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace deckwalk {

/// Ordered list of non-negative integer parts with a cached total.
class CompositionVec {
public:
    CompositionVec() = default;
    explicit CompositionVec(std::vector<int> parts);
    CompositionVec(std::initializer_list<int> parts);

    std::span<const int> parts() const noexcept { return parts_; }
    int operator[](std::size_t i) const { return parts_[i]; }
    std::size_t size() const noexcept { return parts_.size(); }
    int total() const noexcept { return total_; }

    std::string str() const;

    friend bool operator==(const CompositionVec&, const CompositionVec&) = default;

private:
    friend class CompositionStream;
    friend class PartitionStream;
    std::vector<int> parts_;
    int total_ = 0;
};

/// A positive quantity stored as its natural log; zero is log = -inf.
struct LogValue {
    double log = -std::numeric_limits<double>::infinity();

    static LogValue zero() noexcept { return {}; }
    static LogValue from_log(double l) noexcept { return {l}; }
    bool is_zero() const noexcept { return log == -std::numeric_limits<double>::infinity(); }
    double value() const;
};

/// Rational number in lowest terms with positive denominator.
class ExactRational {
public:
    ExactRational() = default;
    ExactRational(mpz_class num, mpz_class den);
    explicit ExactRational(mpq_class q);

    const mpq_class& get() const noexcept { return q_; }
    mpz_class numerator() const { return q_.get_num(); }
    mpz_class denominator() const { return q_.get_den(); }
    double to_double() const;
    std::string str() const { return q_.get_str(); }

    friend bool operator==(const ExactRational& a, const ExactRational& b) { return a.q_ == b.q_; }
    friend auto operator<=>(const ExactRational& a, const ExactRational& b) {
        return cmp(a.q_, b.q_) <=> 0;
    }

private:
    mpq_class q_{0};
};

double log_factorial(long long m);

mpz_class multinomial_exact(int m, const CompositionVec& lambda);
LogValue log_multinomial(int m, const CompositionVec& lambda);

/// C(n, k) in 64 bits; throws CapacityError on overflow.
std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k);

/// Number of compositions of n into `parts` non-negative parts.
std::uint64_t composition_count(int n, int parts);

/// Lexicographic stream over all λ with `parts` entries summing to n.
///
/// Odometer-style and restartable at any rank, so a range of indices can be
/// handed to each worker.
class CompositionStream {
public:
    CompositionStream(int n, int parts);

    /// Repositions so that the next call to next() yields the item at `index`.
    void seek(std::uint64_t index);

    /// Advances; false once the stream is exhausted.
    bool next();
    const CompositionVec& current() const noexcept { return cur_; }
    std::uint64_t count() const noexcept { return count_; }

private:
    int n_;
    int parts_;
    std::uint64_t count_;
    bool started_ = false;
    bool done_ = false;
    CompositionVec cur_;
};

/// Stream of multisets {λ_i}: λ sorted descending (zero padded to `parts`)
/// together with the number of distinct orderings of that multiset.
///
/// Items come in reverse-lexicographic order. Constructing with a fixed
/// leading part restricts the stream to partitions whose largest part equals
/// it, which is how the orbit-reduced sums are split across workers.
class PartitionStream {
public:
    PartitionStream(int n, int parts);
    PartitionStream(int n, int parts, int leading);

    bool next();
    const CompositionVec& current() const noexcept { return cur_; }
    std::uint64_t orbit() const noexcept { return orbit_; }

    /// Range of admissible leading parts: [ceil(n/parts), n].
    static int min_leading(int n, int parts);

private:
    bool advance();
    void fill_from(std::size_t i, int cap, int remaining);
    std::uint64_t orbit_of_current() const;

    int n_;
    int parts_;
    int fixed_leading_ = -1;
    bool started_ = false;
    bool done_ = false;
    CompositionVec cur_;
    std::uint64_t orbit_ = 0;
};

/// Convenience collectors.
std::vector<CompositionVec> enumerate_compositions(int n, int parts);
struct PartitionOrbit {
    CompositionVec lambda;
    std::uint64_t orbit;
};
std::vector<PartitionOrbit> enumerate_partitions_with_orbit(int n, int parts);

/// √(2πm)(m/e)^m.
double stirling_approx(int m);
LogValue log_stirling_approx(int m);

/// Leading-order log multinomial at λ_i = (m + a_i√m)/(2d), where 2d = A.size():
/// log[√2 d^d (2d)^m / (π^{d-1/2} m^{d-1/2})] − ‖A‖²/(4d).
LogValue multinomial_asymptotic(int m, std::span<const double> a);

/// Throws DomainError unless |Σ a_i| ≤ 1e-9.
void require_zero_sum(std::span<const double> a, const char* what);

/// Compensated summation of non-negative terms given on the log scale.
///
/// Keeps a running shift equal to the largest log seen so far; the stored sum
/// is rescaled whenever the shift grows.
class LogKahanSum {
public:
    void add_log(double log_term);
    void merge(const LogKahanSum& other);
    double value() const;
    std::size_t terms() const noexcept { return terms_; }

private:
    double shift_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
    double comp_ = 0.0;
    std::size_t terms_ = 0;
};

}  // namespace deckwalk
