#include "hyperres/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

#include "hyperres/error.hpp"

namespace hyperres {

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol, double rel_tol,
                     unsigned max_depth) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    if (a == b) return {};
    // A coarse pass fixes the L1 scale so that the absolute target can be
    // expressed as the relative tolerance Boost expects.
    double l1 = 0.0, err = 0.0;
    GK::integrate(f, a, b, 3, 1e-3, &err, &l1);
    const double tol = std::max(rel_tol, abs_tol / std::max(l1, 1e-300));
    double value = GK::integrate(f, a, b, max_depth, tol, &err, &l1);
    if (!std::isfinite(value) || err > std::max(abs_tol, rel_tol * std::abs(value)) * 10.0) {
        std::ostringstream os;
        os << "quadrature on [" << a << ", " << b << "] did not converge (error estimate " << err << ")";
        throw ConvergenceError(os.str());
    }
    return {value, err};
}

}  // namespace hyperres
