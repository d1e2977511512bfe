#pragma once

#include <vector>

#include "hyperres/radial.hpp"

namespace hyperres {

struct ScatteringOptions {
    RadialOptions radial;
    int threads = 1;
    // Channels stop once l(l+n-1)/sinh^2 R exceeds this factor times
    // |s(n-s)| + max|V|.
    double barrier_factor = 4.0;
    // relative_determinant refuses results whose tail bound exceeds this.
    double tail_tolerance = 1e-6;
};

// Smallest l meeting the centrifugal criterion at spectral parameter s.
int channel_cutoff(const RadialPotential& V, const HyperbolicDim& dim, cplx s, double barrier_factor = 4.0);

struct DeterminantValue {
    cplx value;
    // Bound on |log tau - log tau_truncated|: twice the first omitted
    // channel's contribution.
    double tail_bound = 0.0;
    int L_max = 0;
};

// tau(s) = prod_{l <= L_max} (channel S-ratio)^{m_l}. L_max < 0 starts from
// the centrifugal cutoff at s and adds channels until the tail bound is below
// opt.tail_tolerance (at most 200 more).
DeterminantValue relative_determinant(cplx s, const RadialPotential& V, const HyperbolicDim& dim, int L_max = -1,
                                      const ScatteringOptions& opt = {});

// tau(n/2) as the limit along the critical line (Richardson extrapolation);
// equals (-1)^{m_V(n/2)}.
cplx relative_determinant_at_center(const RadialPotential& V, const HyperbolicDim& dim, int L_max = -1,
                                    const ScatteringOptions& opt = {});

struct PhaseGrid {
    int n = 0;
    std::vector<double> xi;
    std::vector<double> sigma;
    std::vector<double> dsigma;
    // Number of 2 pi turns added to the principal arg tau at each sample.
    std::vector<long long> branch_offsets;
    std::vector<double> tail_estimate;
    int L_max = 0;
};

// Dense steps near 0, coarser afterwards; always starts at 0 and ends at xi_max.
std::vector<double> default_xi_grid(double xi_max, double dense_step = 0.01, double dense_until = 1.0,
                                    double step = 0.1);

// Scattering phase sigma(xi) = (i/2pi) log tau(n/2+i xi)/tau(n/2) and its
// derivative, from channel phases that are unwrapped independently. L_max < 0
// applies the centrifugal cutoff at the largest xi.
PhaseGrid scattering_phase(const RadialPotential& V, const HyperbolicDim& dim, const std::vector<double>& xi_grid,
                           int L_max = -1, const ScatteringOptions& opt = {});

struct AsymptoticFit {
    std::vector<int> powers;  // xi exponents of the basis, in coefficient order
    std::vector<double> coef;
    std::vector<double> stderr_;
    std::vector<bool> resolvable;  // |coef| > 2 stderr
    double window_lo = 0.0, window_hi = 0.0;
    double condition = 0.0;
    // Only when the xi^{n-1} term is included in the basis.
    bool has_leading = false;
    double leading = 0.0, leading_stderr = 0.0;
};

// Least squares of sigma' against xi^{n-2k}, k = 1..K, on [xi_max/2, xi_max].
// With include_leading the basis also carries xi^{n-1}.
AsymptoticFit phase_asymptotics_fit(const PhaseGrid& grid, const HyperbolicDim& dim, int K,
                                    bool include_leading = false);

// c_k = 2^{-n+2k} a_k / (sqrt(pi) Gamma((n+1)/2 - k)), zero where the Gamma has a pole.
double phase_coefficient_target(int k, double a_k, const HyperbolicDim& dim);

struct LevinsonEstimate {
    double value = 0.0;
    double drift = 0.0;  // difference between the means of the two window halves
};

// Window limit of sigma(xi) - sum_k c_k xi^{n-2k+1}/(n-2k+1) over
// [xi_max/2, xi_max]; c[k-1] holds c_k. Entries beyond k = [n/2] are decaying
// terms and only speed up convergence of the window mean (a k with
// n - 2k + 1 = 0 is skipped). Throws ConvergenceError if the drift exceeds
// max_drift.
//
// Through the heat-trace form of the Birman-Krein formula the limit is
// -(d + m_V(n/2)/2), d the number of eigenvalues.
LevinsonEstimate levinson_constant(const PhaseGrid& grid, const HyperbolicDim& dim, const std::vector<double>& c,
                                   double max_drift = 0.05);

}  // namespace hyperres
