#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hyperres/potentials.hpp"
#include "hyperres/resonances.hpp"
#include "hyperres/scattering.hpp"

namespace hyperres {

struct WaveInvariants {
    double a1 = 0.0;
    double a2 = 0.0;
    double intV = 0.0;   // int V dg
    double intV2 = 0.0;  // int V^2 dg
    double a(int k) const;
};

// Closed forms built on volume_integral:
//   a1 = -1/4 pi^{-n/2} intV,  a2 = 1/32 pi^{-n/2} [ (2n - n^2)/6 intV + intV2 ].
WaveInvariants wave_invariants(const RadialPotential& V, const HyperbolicDim& dim);

// Even test function on the line with its cosine transform
// psi_hat(xi) = int e^{-i xi t} psi(t) dt in closed form.
struct TestFunction {
    std::string name;
    std::function<double(double)> psi;
    std::function<double(double)> psi_hat;
    // int cosh(a t) psi(t) dt for real a (the pairing against an eigenvalue term).
    std::function<double(double)> cosh_pairing;
    // int e^{w |t|} psi(t) dt for complex w; empty when psi has no compact support.
    std::function<cplx(cplx)> laplace;
    // Bound on |laplace(w)| valid for every w with Re w <= -beta <= 0 and |w| >= r.
    std::function<double(double beta, double r)> laplace_envelope;
    double t0 = 0.0;  // psi vanishes for |t| < t0
    double t1 = 0.0;  // and for |t| > t1 (infinity when not compact)
    double l1_norm = 0.0;
    bool compact = false;
    // Integration breakpoints on [t0, t1] where psi is not analytic.
    std::vector<double> knots;

    // psi(t) = B(|t| - center), B the centered cardinal B-spline of the given
    // order supported on [-halfwidth, halfwidth] with unit mass. Its transform
    // is 2 cos(center xi) sinc(xi delta / 2)^order with delta = 2 halfwidth / order.
    static TestFunction bspline_pair(double center, double halfwidth, int order);
    // psi(s) = exp(-s^2 / 4t). Not compactly supported; admitted for the
    // heat-trace consistency check only.
    static TestFunction gaussian(double t);

    // max |psi_hat(xi) - quadrature of int cos(xi t) psi(t) dt| over the samples.
    double transform_residual(const std::vector<double>& xi) const;
};

struct HeatOptions {
    // Extend sigma' beyond xi_max with the fitted asymptotic polynomial
    // (true) or pad with zero (false). Both variants are always reported.
    bool polynomial_extension = true;
    int fit_terms = 3;
    double tail_tolerance = 1e-6;
};

struct HeatCurve {
    int n = 0;
    std::vector<double> t;
    std::vector<double> value;           // phase_integral + eigencontrib + m/2
    std::vector<double> eigencontrib;    // sum_j exp(t (n^2/4 - lambda_j))
    std::vector<double> phase_integral;  // int_0^inf sigma' exp(-xi^2 t), chosen variant
    std::vector<double> value_zero_pad;  // same assembly with sigma' = 0 past xi_max
    std::vector<double> value_extended;  // same assembly with the polynomial extension
    std::vector<double> tail_bound;      // error bound of the chosen variant's tail
    double half_multiplicity = 0.0;      // m_V(n/2) / 2
};

// Relative heat trace via the Birman-Krein identity. Throws ConvergenceError
// naming the smallest admissible t when the tail bound exceeds the tolerance.
HeatCurve heat_trace(const PhaseGrid& grid, const HyperbolicDim& dim, const std::vector<double>& eigenvalues,
                     int m_half, const std::vector<double>& t_values, const HeatOptions& opt = {});

// Smallest t in [t_lo, t_hi] (log search) whose tail bound meets the tolerance.
double smallest_admissible_t(const PhaseGrid& grid, const HyperbolicDim& dim, const HeatOptions& opt = {},
                             double t_lo = 1e-6, double t_hi = 10.0);

std::vector<double> log_grid(double lo, double hi, int count);

struct HeatFit {
    std::vector<double> exponents;  // powers of 4t, -(n+1)/2 + k
    std::vector<double> coef;
    std::vector<double> stderr_;
    std::vector<double> target;  // pi^{-1/2} a_k for k <= 2, NaN beyond
    double condition = 0.0;
    double relative_error(int k) const;  // |coef - target| / |target| (k is 1-based)
};

// Least squares of the curve against (4t)^{-(n+1)/2+k}, k = 1..K. The curve
// must span at least 1.5 decades in t.
HeatFit heat_smallt_fit(const HeatCurve& curve, const HyperbolicDim& dim, int K,
                        const WaveInvariants* targets = nullptr);

struct HeatDecay {
    double exponent = 0.0;  // slope of log|value| against log t
    double constant = 0.0;  // C in |value| ~ C t^exponent
    double max_ratio = 0.0; // max |value| t^{1/2} over the fitted range
};

// Power-law fit of the curve restricted to t >= t_min.
HeatDecay heat_decay_fit(const HeatCurve& curve, double t_min);

struct EigenOracleOptions {
    double margin = 1e-6;      // reject eigenvalues within this of n^2/4
    double cap_shift = 5.0;
    double cap_tolerance = 1e-6;
};

// Finite-difference eigenvalues of the channel operator below n^2/4, in
// ascending order. Uses the Liouville form -w'' + [n^2/4 + (mu^2 - 1/4)/sinh^2 r
// + V] w with w = sinh^{n/2} r u and mu = l + (n-1)/2, Dirichlet at 0 and
// r_cap, extrapolated from mesh and 2 mesh intervals.
std::vector<double> eigenvalue_oracle(const RadialPotential& V, const HyperbolicDim& dim, int l, double r_cap,
                                      int mesh, const EigenOracleOptions& opt = {});

// All eigenvalues below n^2/4, each repeated m_l times. Channels are scanned
// upward from l = 0 and the scan stops at the first channel without any
// (the centrifugal term only grows with l).
std::vector<double> bound_state_eigenvalues(const RadialPotential& V, const HyperbolicDim& dim, double r_cap,
                                            int mesh, const EigenOracleOptions& opt = {});

// int_0^inf sigma'(xi) w(xi) dxi over the grid (nonuniform Simpson) plus
// the polynomial extension of sigma' beyond xi_max, integrated up to xi_end.
double phase_pairing(const PhaseGrid& grid, const AsymptoticFit* fit, const std::function<double(double)>& w,
                     double xi_end);

// (Theta_V, psi) = 1/2 int sigma' psi_hat + sum_j f(lambda_j) + 1/2 m psi_hat(0).
double theta_reconstruction(const PhaseGrid& grid, const HyperbolicDim& dim, const std::vector<double>& eigenvalues,
                            int m_half, const TestFunction& psi, int fit_terms = 3);

struct PoissonResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double tail_bound = 0.0;
    double u0_pairing = 0.0;  // int u0 psi, subtracted from rhs (nonzero for n odd)
    double r_max = 0.0;
    long long resonances_used = 0;  // with multiplicity
    double growth_constant = 0.0;
    double depth = 0.0;  // Re(n/2 - zeta) lower bound assumed beyond r_max
};

struct PoissonOptions {
    int fit_terms = 3;
    // Throw ConvergenceError when tail_bound exceeds this (infinity disables).
    double max_tail = 1e300;
};

PoissonResult poisson_pairing(const PhaseGrid& grid, const HyperbolicDim& dim, const std::vector<double>& eigenvalues,
                              int m_half, const ResonanceList& resonances, const TestFunction& psi, double r_max,
                              const PoissonOptions& opt = {});

// int_R u0(t) psi(t) dt with u0 = cosh(t/2) / (2 sinh(t/2))^{n+1} for n odd, 0 for n even.
double u0_pairing(const HyperbolicDim& dim, const TestFunction& psi);

}  // namespace hyperres
