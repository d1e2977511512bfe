#include "hyperres/kernels.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hyperres/error.hpp"

namespace hyperres {

namespace {

constexpr double kPi = std::numbers::pi;

bool near_nonpositive_integer(cplx s, double tol, int* k) {
    const double re = std::round(s.real());
    if (re > 0.0 || std::abs(s - cplx(re, 0.0)) > tol) return false;
    *k = int(-re);
    return true;
}

cplx resolvent_legendre(const HyperbolicDim& dim, cplx s, double r) {
    const int n = dim.n();
    const double mu = 0.5 * (n - 1);
    const cplx nu = s - 0.5 * (n + 1);
    const cplx Q = legendre_Q_norm_r(nu, mu, r).value;
    return std::pow(2.0 * kPi, -0.5 * (n + 1)) * gamma(s) * std::pow(std::sinh(r), -mu) * Q;
}

void check_r(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("free resolvent needs r > 0 (the diagonal is singular)");
}

}  // namespace

cplx free_resolvent(const KernelQuery& q) {
    check_r(q.r);
    int k = 0;
    if (near_nonpositive_integer(q.s, 1e-12, &k)) {
        if (q.dim.n() % 2 == 1) {
            // Residue direction: Res Gamma(-k) = (-1)^k / k! times the entire factor.
            const cplx nu = q.s - 0.5 * (q.dim.n() + 1);
            const cplx rest = std::pow(2.0 * kPi, -0.5 * (q.dim.n() + 1)) *
                              std::pow(std::sinh(q.r), -0.5 * (q.dim.n() - 1)) *
                              legendre_Q_norm_r(nu, 0.5 * (q.dim.n() - 1), q.r).value;
            const double res = ((k % 2) ? -1.0 : 1.0) / std::tgamma(k + 1.0);
            std::ostringstream os;
            os << "free resolvent has a pole at s = " << -k << " (residue " << res * rest << ")";
            throw DomainError(os.str());
        }
        // Removable: Qnorm vanishes where Gamma(s) blows up.
        return mean_on_circle([&](cplx z) { return resolvent_legendre(q.dim, z, q.r); }, q.s, 1e-2, 32);
    }
    return resolvent_legendre(q.dim, q.s, q.r);
}

cplx free_resolvent_series(const KernelQuery& q, int max_terms) {
    check_r(q.r);
    const double x = std::cosh(q.r);
    if (x < 3.0) throw DomainError("descending series needs cosh r >= 3");
    const int n = q.dim.n();
    const cplx s = q.s;
    int k0 = 0;
    if (near_nonpositive_integer(s, 1e-12, &k0)) throw DomainError("descending series is not used at Gamma poles");
    const double z = 1.0 / (x * x);
    // a_k(s) = (s/2)_k ((s+1)/2)_k / ((s - n/2 + 1)_k k!)
    const cplx c = s - 0.5 * n + 1.0;
    cplx term = 1.0, sum = 1.0;
    for (int k = 0; k < max_terms; ++k) {
        term *= (0.5 * s + double(k)) * (0.5 * s + 0.5 + double(k)) / ((c + double(k)) * double(k + 1)) * z;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) {
            return std::pow(kPi, -0.5 * n) * std::pow(2.0, -s - 1.0) * gamma(s) * rgamma(c) * std::pow(x, -s) * sum;
        }
    }
    throw ConvergenceError("descending resolvent series did not converge");
}

double free_spectral_kernel(const HyperbolicDim& dim, double xi, double r) {
    if (!(r >= 0.0) || !std::isfinite(r) || !std::isfinite(xi)) throw DomainError("spectral kernel needs r >= 0");
    const int n = dim.n();
    const double mu = 0.5 * (n - 1);
    // xi sinh(pi xi) |Gamma(n/2 + i xi)|^2, written to stay finite for large xi.
    const double lg = 2.0 * std::real(log_gamma(cplx(0.5 * n, xi)));
    const double weight = (xi == 0.0) ? 0.0
                                      : xi * std::exp(lg + kPi * std::abs(xi)) * 0.5 *
                                            (1.0 - std::exp(-2.0 * kPi * std::abs(xi))) * (xi < 0 ? -1.0 : 1.0);
    const double cn = std::pow(2.0 * kPi, -0.5 * (n + 3)) * weight;
    const cplx nu(-0.5, xi);
    cplx shape;
    if (r < 1e-6) {
        // sinh^{-mu} r P^{-mu}_nu(cosh r) = (2 cosh^2(r/2))^{-mu} F(-nu, nu+1; 1+mu; -sinh^2(r/2)) / Gamma(1+mu)
        const double sh = std::sinh(0.5 * r);
        const double ch2 = 2.0 * std::cosh(0.5 * r) * std::cosh(0.5 * r);
        shape = std::pow(ch2, -mu) * hyp2f1_regularized_series(-nu, nu + 1.0, cplx(1.0 + mu), -sh * sh).value;
    } else {
        shape = std::pow(std::sinh(r), -mu) * legendre_P_negmu_r(nu, mu, r).value;
    }
    return cn * shape.real();
}

std::vector<KernelRow> kernel_table(KernelKind kind, const HyperbolicDim& dim, cplx s_or_xi,
                                    const std::vector<double>& radii) {
    std::vector<KernelRow> rows;
    rows.reserve(radii.size());
    for (double r : radii) {
        if (kind == KernelKind::resolvent)
            rows.push_back({r, free_resolvent({dim, s_or_xi, r})});
        else
            rows.push_back({r, cplx(free_spectral_kernel(dim, s_or_xi.real(), r), 0.0)});
    }
    return rows;
}

}  // namespace hyperres
