#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hyperres/error.hpp"
#include "hyperres/scattering.hpp"

using namespace hyperres;
using std::abs;

namespace {
const HyperbolicDim kH3(2);
const RadialPotential kRepulsive = RadialPotential::bump(1.0, 1.0);
// One l = 0 bound state near s = 1.245.
const RadialPotential kWell = RadialPotential::smoothed_well(-3.0, 1.5, 0.5);

double a1_of(const RadialPotential& V, const HyperbolicDim& dim) {
    return -0.25 * std::pow(std::numbers::pi, -0.5 * dim.n()) * volume_integral(V, dim, 1);
}
}  // namespace

TEST_CASE("free potential gives trivial scattering data") {
    const RadialPotential V0;
    for (int n : {1, 2, 3}) {
        const HyperbolicDim dim(n);
        CHECK(relative_determinant(cplx(0.3, 2.0), V0, dim).value == cplx(1.0));
        const PhaseGrid g = scattering_phase(V0, dim, default_xi_grid(5.0));
        for (std::size_t j = 0; j < g.xi.size(); ++j) {
            CHECK(g.sigma[j] == 0.0);
            CHECK(g.dsigma[j] == 0.0);
        }
        const AsymptoticFit f = phase_asymptotics_fit(g, dim, 2);
        for (double c : f.coef) CHECK(c == 0.0);
        CHECK(levinson_constant(g, dim, f.coef).value == 0.0);
    }
}

TEST_CASE("default xi grid") {
    const auto g = default_xi_grid(3.0);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 3.0);
    CHECK(g[1] == doctest::Approx(0.01));
    for (std::size_t j = 1; j < g.size(); ++j) {
        CHECK(g[j] > g[j - 1]);
        CHECK(g[j] - g[j - 1] <= 0.1 + 1e-12);
    }
    CHECK_THROWS_AS(default_xi_grid(-1.0), DomainError);
}

TEST_CASE("channel cutoff meets the barrier criterion") {
    const cplx s(1.0, 20.0);
    const int L = channel_cutoff(kRepulsive, kH3, s);
    const double sh2 = std::pow(std::sinh(1.0), 2);
    const double target = 4.0 * (abs(s * (2.0 - s)) + kRepulsive.max_abs());
    CHECK(L * (L + 1) / sh2 >= target);
    CHECK((L - 1) * L / sh2 < target);
}

TEST_CASE("unitarity on the critical line and reflection off it") {
    for (int n : {1, 2, 3}) {
        const HyperbolicDim dim(n);
        for (double xi : {0.1, 1.0, 4.0, 12.0}) {
            const auto t = relative_determinant(cplx(0.5 * n, xi), kWell, dim);
            CHECK(abs(abs(t.value) - 1.0) < 1e-8);
        }
        for (cplx s : {cplx(0.5 * n + 0.7, 1.3), cplx(0.5 * n - 0.4, 3.0), cplx(0.5 * n + 0.25, -2.0)}) {
            const auto a = relative_determinant(s, kWell, dim);
            const auto b = relative_determinant(double(n) - s, kWell, dim);
            CHECK(abs(a.value * b.value - 1.0) < 1e-8);
        }
    }
}

TEST_CASE("tau at the center is +1 for generic potentials") {
    CHECK(abs(relative_determinant_at_center(kRepulsive, kH3) - 1.0) < 1e-6);
    CHECK(abs(relative_determinant_at_center(kWell, kH3) - 1.0) < 1e-6);
    CHECK(abs(relative_determinant_at_center(kWell, HyperbolicDim(1)) - 1.0) < 1e-6);
}

TEST_CASE("truncation tail is enforced") {
    ScatteringOptions opt;
    opt.tail_tolerance = 1e-12;
    CHECK_THROWS_AS(relative_determinant(cplx(1.0, 10.0), kWell, kH3, 2, opt), ConvergenceError);
}

TEST_CASE("phase grid invariants") {
    const auto xi = default_xi_grid(6.0);
    const PhaseGrid g = scattering_phase(kWell, kH3, xi);
    CHECK(g.sigma.front() == 0.0);
    CHECK(g.L_max > 0);

    // Truncation self-consistency.
    const PhaseGrid g5 = scattering_phase(kWell, kH3, xi, g.L_max + 5);
    for (std::size_t j = 0; j < xi.size(); ++j) CHECK(abs(g.sigma[j] - g5.sigma[j]) <= g.tail_estimate[j] + 1e-9);

    // Channel-summed derivative versus centered differences of sigma: the
    // O(h^2) error is bounded by h^2 max|sigma'''| / 6, with sigma''' taken
    // from second differences of sigma'.
    double worst = 0.0, third = 0.0;
    for (std::size_t j = 1; j + 1 < xi.size(); ++j) {
        const double h1 = xi[j] - xi[j - 1], h2 = xi[j + 1] - xi[j];
        if (std::abs(h1 - h2) > 1e-9) continue;
        const double fd = (g.sigma[j + 1] - g.sigma[j - 1]) / (h1 + h2);
        worst = std::max(worst, abs(fd - g.dsigma[j]) / (h1 * h1));
        third = std::max(third, abs(g.dsigma[j + 1] - 2.0 * g.dsigma[j] + g.dsigma[j - 1]) / (h1 * h1));
    }
    CHECK(third > 0.0);
    CHECK(worst <= 1.5 * third / 6.0);

    // Principal arg tau plus the recorded turns reproduces -2 pi sigma.
    for (std::size_t j = 0; j < xi.size(); ++j) {
        const double phi = -2.0 * std::numbers::pi * g.sigma[j];
        CHECK(abs(std::remainder(phi, 2.0 * std::numbers::pi) + 2.0 * std::numbers::pi * g.branch_offsets[j] - phi) <
              1e-9);
    }
}

TEST_CASE("unwrap reports a too coarse grid") {
    const RadialPotential deep = RadialPotential::smoothed_well(-40.0, 1.5, 0.5);
    CHECK_THROWS_AS(scattering_phase(deep, kH3, {0.0, 5.0, 10.0}), ConvergenceError);
}

TEST_CASE("leading asymptotics match the wave invariant") {
    const PhaseGrid g = scattering_phase(kRepulsive, kH3, default_xi_grid(10.0));
    const double target = phase_coefficient_target(1, a1_of(kRepulsive, kH3), kH3);
    CHECK(target == doctest::Approx(a1_of(kRepulsive, kH3) / std::numbers::pi));
    const AsymptoticFit f = phase_asymptotics_fit(g, kH3, 2);
    CHECK(abs(f.coef[0] - target) < 0.002 * abs(target));
    CHECK(f.resolvable[0]);
    // No xi^{n-1} term.
    const AsymptoticFit fl = phase_asymptotics_fit(g, kH3, 2, true);
    CHECK(fl.has_leading);
    CHECK(abs(fl.leading) < 1e-4 * abs(target));
    // Sign of -int V, and flipping V flips it.
    CHECK(f.coef[0] < 0.0);
    const PhaseGrid gm = scattering_phase(kRepulsive.scaled(-1.0), kH3, default_xi_grid(10.0));
    CHECK(phase_asymptotics_fit(gm, kH3, 2).coef[0] > 0.0);
    // Growth bound |sigma'| <= C (1 + xi)^{n-1} with a modest constant.
    double C = 0.0;
    for (std::size_t j = 0; j < g.xi.size(); ++j) C = std::max(C, abs(g.dsigma[j]) / (1.0 + g.xi[j]));
    CHECK(std::isfinite(C));
    CHECK(C < 1.0);
}

TEST_CASE("coefficient targets") {
    // Gamma((n+1)/2 - k) has a pole: n = 1, k = 1.
    CHECK(phase_coefficient_target(1, 2.0, HyperbolicDim(1)) == 0.0);
    // n = 3, k = 1: 2^{-1} a / (sqrt(pi) Gamma(1)).
    CHECK(phase_coefficient_target(1, 2.0, HyperbolicDim(3)) == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)));
    CHECK_THROWS_AS(phase_asymptotics_fit(PhaseGrid{2, {0.0, 1.0}, {0, 0}, {0, 0}, {0, 0}, {0, 0}, 0}, kH3, 2),
                    ConvergenceError);
}

TEST_CASE("Levinson-type limit") {
    const auto xi = default_xi_grid(16.0);
    const PhaseGrid g0 = scattering_phase(kRepulsive, kH3, xi);
    const auto f0 = phase_asymptotics_fit(g0, kH3, 3);
    CHECK(abs(levinson_constant(g0, kH3, f0.coef).value) < 0.05);

    // One bound state: the limit is -(d + m/2) = -1.
    const PhaseGrid g1 = scattering_phase(kWell, kH3, xi);
    const auto f1 = phase_asymptotics_fit(g1, kH3, 3);
    const LevinsonEstimate L1 = levinson_constant(g1, kH3, f1.coef);
    CHECK(abs(L1.value + 1.0) < 0.05);
    CHECK(L1.drift < 0.01);
}
