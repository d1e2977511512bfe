#pragma once

#include <vector>

#include "hyperres/potentials.hpp"
#include "hyperres/specfun.hpp"

namespace hyperres {

// Point query for the free kernels; r is the geodesic distance d(z, w).
struct KernelQuery {
    HyperbolicDim dim{1};
    cplx s{1.0, 0.0};  // resolvent parameter; for the spectral kernel xi = s.real()
    double r = 1.0;
};

// R_0(s; r) = (2pi)^{-(n+1)/2} Gamma(s) sinh^{-mu} r  Qnorm_nu^mu(cosh r),
// mu = (n-1)/2, nu = s - (n+1)/2. For even n the Gamma poles cancel and the
// value at s = 0, -1, ... is the analytic limit; for odd n they are poles.
cplx free_resolvent(const KernelQuery& q);

// Same kernel from its descending series in 1/cosh^2 r (needs cosh r >= 3).
cplx free_resolvent_series(const KernelQuery& q, int max_terms = 100000);

// K_0(xi; r) = c_n(xi) sinh^{-mu} r P^{-mu}_{-1/2+i xi}(cosh r) with
// c_n(xi) = (2pi)^{-(n+3)/2} xi sinh(pi xi) Gamma(n/2 + i xi) Gamma(n/2 - i xi).
// Smooth at r = 0; below r = 1e-6 the near-diagonal hypergeometric form is used.
double free_spectral_kernel(const HyperbolicDim& dim, double xi, double r);

struct KernelRow {
    double r;
    cplx value;
};

enum class KernelKind { resolvent, spectral };

// Tabulates either kernel on the given radii (for CSV export).
std::vector<KernelRow> kernel_table(KernelKind kind, const HyperbolicDim& dim, cplx s_or_xi,
                                    const std::vector<double>& radii);

}  // namespace hyperres
