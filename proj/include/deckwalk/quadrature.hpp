#pragma once

#include <cstddef>
#include <functional>

namespace deckwalk {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
    std::size_t intervals = 0;
    bool converged = false;
};

/// Globally adaptive 7/15-point Gauss–Kronrod integration on [a, b].
///
/// The interval with the largest |K15 - G7| is bisected until the summed
/// estimate drops below abs_tol or max_intervals is reached.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol = 1e-10, std::size_t max_intervals = 100000);

}  // namespace deckwalk
