#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hyperres/error.hpp"
#include "hyperres/radial.hpp"

using namespace hyperres;
using std::abs;

namespace {
double rel(cplx a, cplx b) { return abs(a - b) / std::max(abs(b), 1e-300); }
const RadialPotential kBump = RadialPotential::bump(-2.0, 1.0);
}  // namespace

TEST_CASE("harmonic multiplicities") {
    CHECK(harmonic_multiplicity(1, 0) == 1);
    for (int l = 1; l < 10; ++l) CHECK(harmonic_multiplicity(1, l) == 2);
    for (int l = 0; l < 10; ++l) CHECK(harmonic_multiplicity(2, l) == 2 * l + 1);
    for (int l = 0; l < 10; ++l) CHECK(harmonic_multiplicity(3, l) == (l + 1) * (l + 1));
    // n = 1 partial sums: 2k+1 harmonics of degree <= k on the circle
    long long acc = 0;
    for (int k = 0; k < 8; ++k) {
        acc += harmonic_multiplicity(1, k);
        CHECK(acc == 2 * k + 1);
    }
    for (int n : {1, 2, 3, 4})
        for (int k = 0; k < 6; ++k) {
            long long sum = 0, closed = 2 * k + n;
            for (int l = 0; l <= k; ++l) sum += harmonic_multiplicity(n, l);
            for (int j = 1; j <= n - 1; ++j) closed *= (k + j);
            for (int j = 2; j <= n; ++j) closed /= j;
            CHECK(sum == closed);
        }
    Sector s(HyperbolicDim(2), 3);
    CHECK(s.mu == 3.5);
    CHECK(s.multiplicity == 7);
}

TEST_CASE("free regular solution is proportional to sinh^{-mu0} P^{-mu}") {
    for (auto [n, l, s] : {std::tuple{2, 1, cplx(1.3, 2.0)}, std::tuple{1, 2, cplx(0.2, -1.5)},
                           std::tuple{3, 0, cplx(2.2, 0.7)}}) {
        Sector sec(HyperbolicDim(n), l);
        std::vector<double> rs;
        for (double r = 0.2; r <= 3.0; r += 0.2) rs.push_back(r);
        auto sol = integrate_regular(sec, s, RadialPotential::zero(), 3.0, {}, rs);
        cplx ref;
        for (std::size_t i = 0; i < sol.grid.size(); ++i) {
            const double r = sol.grid[i];
            cplx p = std::pow(std::sinh(r), -sec.dim.mu0()) *
                     legendre_P_negmu_r(s - 0.5 * (n + 1), sec.mu, r).value;
            cplx ratio = sol.value(i) / p;
            if (i == 0) ref = ratio;
            CHECK(rel(ratio, ref) < 1e-8);
        }
    }
}

TEST_CASE("Abel identity: Wronskian with the Jost solution is constant") {
    Sector sec(HyperbolicDim(2), 0);
    const cplx s(1.0, 3.0);
    std::vector<double> rs{0.5, 1.0, 2.0, 3.0, 4.0};
    auto sol = integrate_regular(sec, s, RadialPotential::zero(), 4.0, {}, rs);
    cplx ref;
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
        const double r = sol.grid[i];
        auto j = jost_solution(sec, s, r);
        cplx w = std::pow(std::sinh(r), 2) * (sol.value(i) * j.derivative - sol.derivative(i) * j.value);
        if (i == 0) ref = w;
        CHECK(rel(w, ref) < 1e-8);
    }
}

TEST_CASE("conjugation symmetry of the regular solution") {
    Sector sec(HyperbolicDim(2), 2);
    const cplx s(0.4, 2.3);
    auto a = integrate_regular(sec, s, kBump, 1.0);
    auto b = integrate_regular(sec, std::conj(s), kBump, 1.0);
    for (std::size_t i = 0; i < a.grid.size(); ++i) CHECK(rel(b.value(i), std::conj(a.value(i))) < 1e-12);
}

TEST_CASE("jost_solution: decay and closed form") {
    Sector sec(HyperbolicDim(2), 0);
    const cplx s(1.7, 0.9);
    for (double r : {8.0, 12.0}) {
        double rate = std::log(abs(jost_solution(sec, s, r + 1).value / jost_solution(sec, s, r).value));
        CHECK(abs(rate + s.real()) < 1e-3);
    }
    cplx ref;
    for (double r = 1.0; r <= 6.0; r += 0.5) {
        cplx ratio = jost_solution(sec, s, r).value / (std::exp(-(s - 1.0) * r) / std::sinh(r));
        if (r == 1.0) ref = ratio;
        CHECK(rel(ratio, ref) < 1e-10);
    }
    // linear independence of psi(s) and psi(n-s) off the exceptional set
    for (cplx z : {cplx(0.3, 0.5), cplx(1.6, -2.0), cplx(-1.2, 0.3)}) {
        auto a = jost_solution(sec, z, 2.0), b = jost_solution(sec, 2.0 - z, 2.0);
        cplx w = std::pow(std::sinh(2.0), 2) * (b.value * a.derivative - b.derivative * a.value);
        CHECK(abs(w) > 1e-3);
        CHECK(rel(w, -std::sin(std::numbers::pi * (z - 1.0))) < 1e-10);
    }
}

TEST_CASE("decompose_at_match") {
    Sector sec(HyperbolicDim(2), 1);
    const cplx s(0.7, 1.4);
    auto u0 = integrate_regular(sec, s, RadialPotential::zero(), 1.0);
    auto d0 = decompose_at_match(u0, sec, s, 1.0);
    cplx expected = -std::exp(log_gamma(s + 1.0) - log_gamma(2.0 - s + 1.0));
    CHECK(rel(d0.B_decay / d0.A_grow, expected) < 1e-9);
    CHECK(d0.residual < 1e-8);

    auto ua = integrate_regular(sec, s, kBump, 1.0);
    auto ub = integrate_regular(sec, s, kBump, 2.0);
    auto da = decompose_at_match(ua, sec, s, 1.0), db = decompose_at_match(ub, sec, s, 2.0);
    CHECK(rel(da.A_grow, db.A_grow) < 1e-8);
    CHECK(rel(da.B_decay, db.B_decay) < 1e-8);
    CHECK(da.residual < 1e-8);

    CHECK_THROWS_AS(decompose_at_match(u0, sec, cplx(3.0, 0.0), 1.0), DomainError);
}

TEST_CASE("jost_function properties") {
    // free odd-dimensional channel is identically 1
    for (int l : {0, 2, 5}) CHECK(abs(jost_function(Sector(HyperbolicDim(2), l), cplx(-1.5, 2.0), RadialPotential::zero()) - 1.0) < 1e-8);
    // free even-dimensional channel is 1/Gamma(s+l)
    Sector h2(HyperbolicDim(1), 1);
    CHECK(rel(jost_function(h2, cplx(-0.4, 0.8), RadialPotential::zero()), rgamma(cplx(0.6, 0.8))) < 1e-8);
    CHECK(abs(jost_function(h2, -1.0, RadialPotential::zero())) < 1e-9);
    // removable singularity at the Gamma poles in odd dimension
    Sector h3(HyperbolicDim(2), 0);
    CHECK(std::isfinite(abs(jost_function(h3, -2.0, kBump))));
    CHECK(rel(jost_function(h3, -2.0, kBump), jost_function(h3, cplx(-2.0, 0.05), kBump)) < 0.5);
    // real on the real axis, conjugate symmetric
    for (double s : {-2.7, -0.3, 0.6, 1.4}) {
        cplx d = jost_function(Sector(HyperbolicDim(2), 1), s, kBump);
        CHECK(abs(d.imag()) < 1e-12 * abs(d));
    }
    const cplx z(0.3, 2.2);
    Sector sec(HyperbolicDim(2), 2);
    CHECK(rel(jost_function(sec, std::conj(z), kBump), std::conj(jost_function(sec, z, kBump))) < 1e-12);
    // matching radius independence
    RadialOptions far;
    far.r_match = 2.0;
    CHECK(rel(jost_function(sec, z, kBump, far), jost_function(sec, z, kBump)) < 1e-8);
}

TEST_CASE("channel S-ratio: free identity, unitarity, inversion") {
    Sector sec(HyperbolicDim(2), 1);
    CHECK(channel_smatrix_ratio(sec, cplx(0.2, 0.3), RadialPotential::zero()) == cplx(1.0));
    for (double xi : {0.3, 2.0, 9.0}) CHECK(abs(abs(channel_smatrix_ratio(sec, cplx(1.0, xi), kBump)) - 1.0) < 1e-8);
    Sector h2(HyperbolicDim(1), 2);
    for (double xi : {0.5, 4.0}) CHECK(abs(abs(channel_smatrix_ratio(h2, cplx(0.5, xi), kBump)) - 1.0) < 1e-8);
    for (cplx s : {cplx(0.4, 1.1), cplx(1.8, -0.6), cplx(-0.7, 2.5)}) {
        CHECK(abs(channel_smatrix_ratio(sec, s, kBump) * channel_smatrix_ratio(sec, 2.0 - s, kBump) - 1.0) < 1e-8);
        CHECK(abs(channel_smatrix_ratio(h2, s, kBump) * channel_smatrix_ratio(h2, 1.0 - s, kBump) - 1.0) < 1e-8);
    }
}

TEST_CASE("log-derivative of J agrees with a difference quotient") {
    Sector sec(HyperbolicDim(2), 3);
    const cplx s(1.0, 4.0);
    const double h = 1e-5;
    auto lj = channel_log_jost(sec, s, kBump, {}, true);
    cplx jp = std::exp(channel_log_jost(sec, s + h, kBump, {}, false).log_J);
    cplx jm = std::exp(channel_log_jost(sec, s - h, kBump, {}, false).log_J);
    cplx fd = (jp - jm) / (2 * h) / std::exp(lj.log_J);
    CHECK(abs(lj.dlog_J - fd) < 1e-6 * std::max(1.0, abs(fd)));
}

TEST_CASE("no zeros of D_l on the critical line") {
    Sector sec(HyperbolicDim(2), 0);
    auto deep = RadialPotential::smoothed_well(-8.0, 1.0, 0.5);
    for (double xi = 0.05; xi < 15.0; xi += 0.25) CHECK(abs(jost_function(sec, cplx(1.0, xi), deep)) > 1e-3);
}
