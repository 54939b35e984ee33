#include "deckwalk/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "deckwalk/errors.hpp"
#include "deckwalk/quadrature.hpp"

namespace deckwalk {

namespace {

// log(c/(c-1)) without cancellation for large c.
double log_ratio(double c) { return -std::log1p(-1.0 / c); }

void require_c_above_one(double c) {
    if (!(c > 1.0) || !std::isfinite(c)) throw DomainError("profile requires finite c > 1");
}

}  // namespace

double erf(double x) {
    const double v = std::erf(std::abs(x));
    return std::signbit(x) ? -v : v;
}

double gamma_half(int k) {
    if (k < 1) throw DomainError("gamma_half requires k >= 1");
    double g = (k % 2 == 0) ? 1.0 : std::sqrt(std::numbers::pi);
    for (int j = (k % 2 == 0) ? 2 : 1; j < k; j += 2) g *= j / 2.0;
    return g;
}

double unit_sphere_area(int m) {
    if (m < 0) throw DomainError("sphere dimension must be non-negative");
    return 2.0 * std::pow(std::numbers::pi, (m + 1) / 2.0) / gamma_half(m + 1);
}

double radius(double c, int d) {
    require_c_above_one(c);
    if (d < 1) throw DomainError("profile requires d >= 1");
    const double dd = d;
    return std::sqrt((4.0 * dd * dd - 2.0 * dd) * (c - 1.0) * log_ratio(c));
}

ProfileParams ProfileParams::make(double c, int d) {
    ProfileParams p;
    p.c = c;
    p.d = d;
    p.r = radius(c, d);
    p.below_theorem_range = c < 2.0 * d;
    return p;
}

double gaussian_profile_density(double rho, const ProfileParams& params) {
    if (!(rho >= 0.0) || rho > params.r * (1.0 + 1e-12)) {
        throw DomainError("profile density is defined on the ball of radius r only");
    }
    const double d = params.d;
    const double c = params.c;
    const double prefactor = std::pow(std::numbers::pi, 0.5 - d) * std::pow(2.0, 1.5 - 2.0 * d) * std::pow(d, 1.0 - d);
    const double rho2 = rho * rho;
    // (c/(c-1))^{d-1/2} e^{-cρ²/(4d(c-1))} − e^{-ρ²/(4d)}
    //   = e^{-ρ²/(4d)} · expm1((d − 1/2)L − ρ²/(4d(c−1)))
    const double bracket =
        std::exp(-rho2 / (4.0 * d)) * std::expm1((d - 0.5) * log_ratio(c) - rho2 / (4.0 * d * (c - 1.0)));
    return std::max(0.0, prefactor * bracket);
}

ProfileValue profile_integral(const ProfileParams& params, double abs_tol) {
    const int power = 2 * params.d - 2;
    const double r = params.r;
    auto integrand = [&](double rho) {
        rho = std::min(rho, r);
        return std::pow(rho, power) * gaussian_profile_density(rho, params);
    };
    const double constant = unit_sphere_area(power) / std::sqrt(2.0 * params.d);
    // Tolerance on the radial integral, scaled so the profile meets abs_tol.
    const QuadratureResult q = integrate_adaptive(integrand, 0.0, r, abs_tol / constant);
    if (!q.converged) {
        throw NumericError("profile quadrature did not converge", q.error * constant);
    }
    ProfileValue out;
    out.value = std::clamp(constant * q.value, 0.0, 1.0);
    out.quadrature_error = constant * q.error;
    out.below_theorem_range = params.below_theorem_range;
    return out;
}

double profile_d1_closed(double c) {
    if (!(c >= 2.0) || !std::isfinite(c)) throw DomainError("d = 1 closed form requires c >= 2");
    const double l = log_ratio(c);
    return deckwalk::erf(std::sqrt(c * l / 2.0)) - deckwalk::erf(std::sqrt((c - 1.0) * l / 2.0));
}

double profile_d2_closed(double c) {
    if (!(c >= 4.0) || !std::isfinite(c)) throw DomainError("d = 2 closed form requires c >= 4");
    const double l = log_ratio(c);
    const double r2 = 12.0 * (c - 1.0) * l;
    const double boundary = std::sqrt(r2) * std::exp(-r2 / 8.0) / (c * std::sqrt(2.0 * std::numbers::pi));
    return deckwalk::erf(std::sqrt(3.0 * c * l / 2.0)) - deckwalk::erf(std::sqrt(3.0 * (c - 1.0) * l / 2.0)) +
           boundary;
}

double profile_value(int d, double c) {
    if (d < 1) throw DomainError("profile requires d >= 1");
    if (!(c >= 2.0 * d)) throw DomainError("profile requires c >= 2d");
    if (d == 1) return profile_d1_closed(c);
    if (d == 2) return profile_d2_closed(c);
    return profile_integral(ProfileParams::make(c, d)).value;
}

}  // namespace deckwalk
