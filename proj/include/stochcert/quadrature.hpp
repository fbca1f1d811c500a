#pragma once

#include <functional>

namespace stochcert {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Adaptive 7/15-point Gauss-Kronrod on [a, b], bisecting the interval with the
/// largest error estimate until the total estimate is below rel_tol * |value|.
/// b may be +inf; the tail is mapped through x = a + t/(1-t).
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol = 1e-10, int max_intervals = 2000);

} // namespace stochcert
