#pragma once

#include <vector>

#include "hyperres/potentials.hpp"
#include "hyperres/specfun.hpp"

namespace hyperres {

// Dimension of the degree-l spherical harmonics on S^n. Partial sums over
// l <= k give (2k+n)(k+1)...(k+n-1)/n!.
long long harmonic_multiplicity(int n, int l);

struct Sector {
    Sector(HyperbolicDim dim, int l);

    HyperbolicDim dim;
    int l;
    double mu;               // l + (n-1)/2
    long long multiplicity;  // m_l
};

struct RadialOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    // Launch radius is r0_scale * min(1, 1/(l+1)).
    double r0_scale = 1e-3;
    // Matching radius; <= 0 selects max(R, 1).
    double r_match = 0.0;
    // Offset of the second point used for the reconstruction residual.
    double delta = 0.25;
    int max_steps = 1000000;
    SpecfunOptions special;
};

// Regular channel solution u ~ r^l near 0. Values are stored as mantissas
// with a per-sample log scale so that r^l for large l does not underflow:
// u(grid[i]) = u[i] * exp(log_scale[i]).
struct RadialSolution {
    Sector sector;
    cplx s;
    std::vector<double> grid;
    std::vector<cplx> u, du;
    std::vector<double> log_scale;

    cplx value(std::size_t i) const;
    cplx derivative(std::size_t i) const;
};

// Solves u'' + n coth r u' + (s(n-s) - V - l(l+n-1)/sinh^2 r) u = 0 from the
// Frobenius data at r0 out to r_match + opt.delta. The grid holds the
// requested sample radii (clipped to that interval) together with r_match and
// r_match + delta.
RadialSolution integrate_regular(const Sector& sector, cplx s, const RadialPotential& V, double r_match,
                                 const RadialOptions& opt = {}, std::vector<double> samples = {});

struct JostValue {
    cplx value;
    cplx derivative;  // d/dr
};

// psi(s; r) = sinh^{-(n-1)/2}(r) Q_{s-(n+1)/2}^{mu}(cosh r) (normalized Q).
JostValue jost_solution(const Sector& sector, cplx s, double r, const SpecfunOptions& opt = {});

struct ChannelDecomposition {
    cplx s;
    cplx A_grow;   // coefficient of psi(n-s; r)
    cplx B_decay;  // coefficient of psi(s; r)
    double r_match;
    double residual;  // relative reconstruction mismatch at r_match + delta
};

// Matches (u, u') at r_match to A psi(n-s) + B psi(s). The solution must
// contain r_match and r_match + delta on its grid.
ChannelDecomposition decompose_at_match(const RadialSolution& u, const Sector& sector, cplx s, double r_match,
                                        const RadialOptions& opt = {});

// Channel Jost function D_l(s). In odd dimension (n even) it is the ratio of
// the growing coefficients of u_V and u_0 and equals 1 for V = 0; in even
// dimension (n odd) it is normalized to 1/Gamma(s+l) for V = 0, which
// carries the zeros of the free resolvent. Entire in s in both cases.
cplx jost_function(const Sector& sector, cplx s, const RadialPotential& V, const RadialOptions& opt = {});

struct JostFunctionValue {
    cplx value;
    cplx ds;  // d/ds, from the variational equation of the channel ODE
};
JostFunctionValue jost_function_with_derivative(const Sector& sector, cplx s, const RadialPotential& V,
                                                 const RadialOptions& opt = {});

// Eigenvalue of S_V(s) S_0(s)^{-1} on the degree-l harmonics.
cplx channel_smatrix_ratio(const Sector& sector, cplx s, const RadialPotential& V, const RadialOptions& opt = {});

// Log of the channel function J(s) = Gamma(s+l) W[u_V, psi_s] / W-free
// normalization (J = 1 for V = 0 in every dimension), at s and at n - s
// from a single ODE solve, optionally with d/ds log J at s. The channel
// S-ratio is J(n-s)/J(s) and the channel phase on the critical line is
// arg J(n/2 + i xi).
struct ChannelLogJost {
    cplx log_J;
    cplx log_J_reflected;  // at n - s
    cplx dlog_J;           // d/ds log J(s), when requested
};
ChannelLogJost channel_log_jost(const Sector& sector, cplx s, const RadialPotential& V, const RadialOptions& opt,
                                bool with_derivative);

}  // namespace hyperres
