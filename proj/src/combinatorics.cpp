#include "deckwalk/combinatorics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "deckwalk/errors.hpp"

namespace deckwalk {

namespace {

constexpr int kExactTableMax = 128;

const std::array<double, kExactTableMax + 1>& log_factorial_table() {
    static const auto table = [] {
        std::array<double, kExactTableMax + 1> t{};
        long double acc = 0.0L;
        t[0] = 0.0;
        for (int j = 1; j <= kExactTableMax; ++j) {
            acc += std::log(static_cast<long double>(j));
            t[j] = static_cast<double>(acc);
        }
        return t;
    }();
    return table;
}

void require_total(int m, const CompositionVec& lambda) {
    if (lambda.total() != m) {
        throw DomainError("multinomial: parts sum to " + std::to_string(lambda.total()) +
                          " but m = " + std::to_string(m));
    }
}

}  // namespace

CompositionVec::CompositionVec(std::vector<int> parts) : parts_(std::move(parts)) {
    long long total = 0;
    for (int p : parts_) {
        if (p < 0) throw DomainError("composition parts must be non-negative");
        total += p;
    }
    if (total > std::numeric_limits<int>::max()) throw DomainError("composition total overflows");
    total_ = static_cast<int>(total);
}

CompositionVec::CompositionVec(std::initializer_list<int> parts)
    : CompositionVec(std::vector<int>(parts)) {}

std::string CompositionVec::str() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (i) os << ',';
        os << parts_[i];
    }
    os << ')';
    return os.str();
}

double LogValue::value() const { return is_zero() ? 0.0 : std::exp(log); }

ExactRational::ExactRational(mpz_class num, mpz_class den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
}

ExactRational::ExactRational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

double ExactRational::to_double() const { return q_.get_d(); }

double log_factorial(long long m) {
    if (m < 0) throw DomainError("log_factorial of negative argument");
    if (m <= kExactTableMax) return log_factorial_table()[static_cast<std::size_t>(m)];
    return std::lgamma(static_cast<double>(m) + 1.0);
}

mpz_class multinomial_exact(int m, const CompositionVec& lambda) {
    require_total(m, lambda);
    mpz_class result = 1;
    mpz_class b;
    unsigned long partial = 0;
    for (int p : lambda.parts()) {
        partial += static_cast<unsigned long>(p);
        mpz_bin_uiui(b.get_mpz_t(), partial, static_cast<unsigned long>(p));
        result *= b;
    }
    return result;
}

LogValue log_multinomial(int m, const CompositionVec& lambda) {
    require_total(m, lambda);
    double l = log_factorial(m);
    for (int p : lambda.parts()) l -= log_factorial(p);
    return LogValue::from_log(l);
}

std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > std::numeric_limits<std::uint64_t>::max()) {
            throw CapacityError("binomial coefficient exceeds 64 bits");
        }
    }
    return static_cast<std::uint64_t>(r);
}

std::uint64_t composition_count(int n, int parts) {
    if (n < 0 || parts < 1) return 0;
    return binomial_u64(static_cast<std::uint64_t>(n) + parts - 1,
                        static_cast<std::uint64_t>(parts) - 1);
}

// ---------------------------------------------------------------------------

CompositionStream::CompositionStream(int n, int parts) : n_(n), parts_(parts) {
    if (n < 0) throw DomainError("composition total must be non-negative");
    if (parts < 1) throw DomainError("composition needs at least one part");
    count_ = composition_count(n, parts);
    cur_.parts_.assign(static_cast<std::size_t>(parts), 0);
    cur_.parts_.back() = n;
    cur_.total_ = n;
}

void CompositionStream::seek(std::uint64_t index) {
    started_ = false;
    if (index >= count_) {
        done_ = true;
        return;
    }
    done_ = false;
    int rem = n_;
    for (int i = 0; i + 1 < parts_; ++i) {
        int v = 0;
        for (;;) {
            std::uint64_t cnt = composition_count(rem - v, parts_ - i - 1);
            if (index < cnt) break;
            index -= cnt;
            ++v;
        }
        cur_.parts_[static_cast<std::size_t>(i)] = v;
        rem -= v;
    }
    cur_.parts_.back() = rem;
}

bool CompositionStream::next() {
    if (done_) return false;
    if (!started_) {
        started_ = true;
        return true;
    }
    auto& p = cur_.parts_;
    const int last = parts_ - 1;
    // Rightmost j <= last-1 with a non-zero suffix after it.
    int j = -1;
    int suffix = p[static_cast<std::size_t>(last)];
    for (int k = last - 1; k >= 0; --k) {
        if (suffix > 0) {
            j = k;
            break;
        }
        suffix += p[static_cast<std::size_t>(k)];
    }
    if (j < 0) {
        done_ = true;
        return false;
    }
    p[static_cast<std::size_t>(j)] += 1;
    for (int k = j + 1; k < last; ++k) p[static_cast<std::size_t>(k)] = 0;
    p[static_cast<std::size_t>(last)] = suffix - 1;
    return true;
}

// ---------------------------------------------------------------------------

int PartitionStream::min_leading(int n, int parts) { return (n + parts - 1) / parts; }

PartitionStream::PartitionStream(int n, int parts) : n_(n), parts_(parts) {
    if (n < 0) throw DomainError("partition total must be non-negative");
    if (parts < 1) throw DomainError("partition needs at least one part");
    cur_.parts_.assign(static_cast<std::size_t>(parts), 0);
    cur_.parts_[0] = n;
    cur_.total_ = n;
}

PartitionStream::PartitionStream(int n, int parts, int leading) : PartitionStream(n, parts) {
    fixed_leading_ = leading;
    if (leading < min_leading(n, parts) || leading > n) {
        done_ = true;
        return;
    }
    cur_.parts_[0] = leading;
    fill_from(1, leading, n - leading);
}

void PartitionStream::fill_from(std::size_t i, int cap, int remaining) {
    for (std::size_t k = i; k < cur_.parts_.size(); ++k) {
        int take = std::min(cap, remaining);
        cur_.parts_[k] = take;
        remaining -= take;
    }
}

bool PartitionStream::advance() {
    auto& p = cur_.parts_;
    const int lowest = fixed_leading_ >= 0 ? 1 : 0;
    std::vector<int> prefix(p.size() + 1, 0);
    for (std::size_t k = 0; k < p.size(); ++k) prefix[k + 1] = prefix[k] + p[k];
    for (int i = parts_ - 2; i >= lowest; --i) {
        const int v = p[static_cast<std::size_t>(i)];
        if (v < 1) continue;
        const int nv = v - 1;
        const long long rest = static_cast<long long>(n_) - prefix[static_cast<std::size_t>(i)] - nv;
        if (rest <= static_cast<long long>(parts_ - 1 - i) * nv) {
            p[static_cast<std::size_t>(i)] = nv;
            fill_from(static_cast<std::size_t>(i) + 1, nv, static_cast<int>(rest));
            return true;
        }
    }
    return false;
}

std::uint64_t PartitionStream::orbit_of_current() const {
    std::uint64_t orbit = 1;
    std::uint64_t remaining = cur_.parts_.size();
    std::size_t k = 0;
    while (k < cur_.parts_.size()) {
        std::size_t run = 1;
        while (k + run < cur_.parts_.size() && cur_.parts_[k + run] == cur_.parts_[k]) ++run;
        orbit *= binomial_u64(remaining, run);
        remaining -= run;
        k += run;
    }
    return orbit;
}

bool PartitionStream::next() {
    if (done_) return false;
    if (!started_) {
        started_ = true;
    } else if (!advance()) {
        done_ = true;
        return false;
    }
    orbit_ = orbit_of_current();
    return true;
}

std::vector<CompositionVec> enumerate_compositions(int n, int parts) {
    CompositionStream s(n, parts);
    std::vector<CompositionVec> out;
    out.reserve(static_cast<std::size_t>(s.count()));
    while (s.next()) out.push_back(s.current());
    return out;
}

std::vector<PartitionOrbit> enumerate_partitions_with_orbit(int n, int parts) {
    PartitionStream s(n, parts);
    std::vector<PartitionOrbit> out;
    while (s.next()) out.push_back({s.current(), s.orbit()});
    return out;
}

// ---------------------------------------------------------------------------

LogValue log_stirling_approx(int m) {
    if (m < 1) throw DomainError("stirling_approx requires m >= 1");
    const double dm = m;
    return LogValue::from_log(0.5 * std::log(2.0 * std::numbers::pi * dm) + dm * (std::log(dm) - 1.0));
}

double stirling_approx(int m) { return log_stirling_approx(m).value(); }

void require_zero_sum(std::span<const double> a, const char* what) {
    const double s = std::accumulate(a.begin(), a.end(), 0.0);
    if (!(std::abs(s) <= 1e-9)) {
        throw DomainError(std::string(what) + ": components must sum to zero");
    }
}

LogValue multinomial_asymptotic(int m, std::span<const double> a) {
    if (a.empty() || a.size() % 2 != 0) {
        throw DomainError("multinomial_asymptotic: vector length must be 2d");
    }
    if (m < 1) throw DomainError("multinomial_asymptotic requires m >= 1");
    require_zero_sum(a, "multinomial_asymptotic");
    const double dm = m;
    const double root = std::sqrt(dm);
    double norm2 = 0.0;
    for (double ai : a) {
        if (dm + ai * root < -1e-9) {
            throw DomainError("multinomial_asymptotic: negative implied part");
        }
        norm2 += ai * ai;
    }
    const double d = static_cast<double>(a.size()) / 2.0;
    const double l = 0.5 * std::log(2.0) + d * std::log(d) + dm * std::log(2.0 * d) -
                     (d - 0.5) * std::log(std::numbers::pi) - (d - 0.5) * std::log(dm) -
                     norm2 / (4.0 * d);
    return LogValue::from_log(l);
}

// ---------------------------------------------------------------------------

void LogKahanSum::add_log(double log_term) {
    ++terms_;
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (log_term > shift_) {
        const double factor =
            shift_ == -std::numeric_limits<double>::infinity() ? 0.0 : std::exp(shift_ - log_term);
        sum_ *= factor;
        comp_ *= factor;
        shift_ = log_term;
    }
    const double y = std::exp(log_term - shift_) - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
}

void LogKahanSum::merge(const LogKahanSum& other) {
    terms_ += other.terms_;
    if (other.sum_ == 0.0) return;
    if (other.shift_ > shift_) {
        const double factor =
            shift_ == -std::numeric_limits<double>::infinity() ? 0.0 : std::exp(shift_ - other.shift_);
        sum_ *= factor;
        comp_ *= factor;
        shift_ = other.shift_;
    }
    const double scale = std::exp(other.shift_ - shift_);
    const double y = (other.sum_ - other.comp_) * scale - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
}

double LogKahanSum::value() const {
    if (shift_ == -std::numeric_limits<double>::infinity()) return 0.0;
    return std::exp(shift_) * sum_;
}

}  // namespace deckwalk
