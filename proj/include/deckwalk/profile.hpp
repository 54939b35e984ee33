#pragma once

// Limit profile of d_n(cn) as n → ∞: the integral of a radial Gaussian
// difference over the ball of radius r(c) in the zero-sum hyperplane of R^{2d}.
//
// Measure convention: the hyperplane is charted by its first 2d-1
// coordinates with Lebesgue measure on the chart. Radially this gives
//   value = (2d)^{-1/2} · |S^{2d-2}| · ∫_0^r ρ^{2d-2} G(ρ) dρ,
// since the chart's Gram determinant is det(I + J) = 2d.

namespace deckwalk {

/// r(c) = √((4d² − 2d)(c − 1) log(c/(c − 1))).
double radius(double c, int d);

struct ProfileParams {
    double c = 0.0;
    int d = 1;
    double r = 0.0;
    /// c < 2d: formulas are defined but outside the limit theorem's range.
    bool below_theorem_range = false;

    /// Requires c > 1 and d >= 1.
    static ProfileParams make(double c, int d);
};

struct ProfileValue {
    double value = 0.0;
    double quadrature_error = 0.0;  // 0 for closed forms
    bool below_theorem_range = false;
};

/// G at ‖X‖ = rho; rho must lie in [0, r].
double gaussian_profile_density(double rho, const ProfileParams& params);

ProfileValue profile_integral(const ProfileParams& params, double abs_tol = 1e-10);

/// d = 1: erf(√(cL/2)) − erf(√((c−1)L/2)), L = log(c/(c−1)); requires c >= 2.
double profile_d1_closed(double c);

/// d = 2, requires c >= 4:
///   erf(√(3cL/2)) − erf(√(3(c−1)L/2)) + r e^{−r²/8} / (c√(2π)),  r² = 12(c−1)L.
double profile_d2_closed(double c);

/// Closed form where one exists (d = 1, 2), radial quadrature otherwise.
/// Requires c >= 2d.
double profile_value(int d, double c);

/// Odd-symmetric error function.
double erf(double x);

/// Γ(k/2) for integer k >= 1, by the half-integer recursion.
double gamma_half(int k);

/// Surface area of the unit m-sphere in R^{m+1}.
double unit_sphere_area(int m);

}  // namespace deckwalk
