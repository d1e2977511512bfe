#pragma once

#include <functional>

namespace hyperres {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
};

// Adaptive Gauss-Kronrod (7/15) on a finite interval. Succeeds when the
// estimated error is below max(abs_tol, rel_tol * |value|); otherwise throws
// ConvergenceError.
QuadResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-11,
                     double rel_tol = 1e-13, unsigned max_depth = 40);

}  // namespace hyperres
