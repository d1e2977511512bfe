#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hyperres/error.hpp"
#include "hyperres/kernels.hpp"

using namespace hyperres;
using std::abs;

namespace {
const double kPi = std::numbers::pi;
}

TEST_CASE("H3 resolvent closed form") {
    const HyperbolicDim d(2);
    for (cplx s : {cplx(1.3, 0.4), cplx(-2.5, 3.0), cplx(0.2, -7.0), cplx(4.0, 0.0)})
        for (double r : {0.01, 0.5, 2.0, 6.0, 20.0}) {
            const cplx exact = std::exp(-(s - 1.0) * r) / (4.0 * kPi * std::sinh(r));
            CHECK(abs(free_resolvent({d, s, r}) / exact - 1.0) < 1e-10);
        }
    // Euclidean singularity 1/(4 pi r) on the diagonal.
    CHECK(abs(free_resolvent({d, cplx(1.5), 1e-6}) * 4.0 * kPi * 1e-6 - 1.0) < 1e-5);
    // Removable Gamma pole in odd spatial dimension.
    CHECK(abs(free_resolvent({d, cplx(-1.0), 1.0}) - std::exp(2.0) / (4.0 * kPi * std::sinh(1.0))) < 1e-10);
}

TEST_CASE("descending series agrees with the Legendre route") {
    for (int n = 1; n <= 4; ++n)
        for (cplx s : {cplx(1.3, 0.4), cplx(-2.5, 3.0), cplx(0.7, 5.0)})
            for (double r : {1.8, 3.0, 8.0}) {
                const KernelQuery q{HyperbolicDim(n), s, r};
                CHECK(abs(free_resolvent_series(q) / free_resolvent(q) - 1.0) < 1e-10);
            }
    CHECK_THROWS_AS(free_resolvent_series({HyperbolicDim(2), cplx(1.0), 0.5}), DomainError);
}

TEST_CASE("poles and domain") {
    CHECK_THROWS_AS(free_resolvent({HyperbolicDim(1), cplx(-1.0), 1.0}), DomainError);
    CHECK_THROWS_AS(free_resolvent({HyperbolicDim(3), cplx(0.0), 1.0}), DomainError);
    CHECK_THROWS_AS(free_resolvent({HyperbolicDim(2), cplx(1.0), 0.0}), DomainError);
    CHECK_THROWS_AS(free_spectral_kernel(HyperbolicDim(2), 1.0, -0.1), DomainError);
}

TEST_CASE("resolvent solves the radial equation") {
    // -u'' - n coth r u' - s(n - s) u = 0 away from the diagonal.
    for (int n : {1, 2, 3}) {
        const HyperbolicDim d(n);
        const cplx s(0.8, 1.7);
        const double h = 1e-3;
        for (double r : {0.7, 1.5, 3.0}) {
            const cplx um = free_resolvent({d, s, r - h}), u0 = free_resolvent({d, s, r}),
                       up = free_resolvent({d, s, r + h});
            const cplx u2 = (up - 2.0 * u0 + um) / (h * h), u1 = (up - um) / (2.0 * h);
            const cplx res = -u2 - double(n) / std::tanh(r) * u1 - s * (double(n) - s) * u0;
            CHECK(abs(res) < 1e-6 * (abs(u2) + abs(u0)));
        }
    }
}

TEST_CASE("spectral kernel") {
    const HyperbolicDim d(2);
    for (double xi : {0.3, 2.0, 7.0})
        for (double r : {0.1, 1.0, 4.0})
            CHECK(free_spectral_kernel(d, xi, r) ==
                  doctest::Approx(xi * std::sin(xi * r) / (4.0 * kPi * kPi * std::sinh(r))).epsilon(1e-10));
    for (int n = 1; n <= 4; ++n) {
        const HyperbolicDim dn(n);
        for (double xi : {0.3, 2.0, 7.0})
            for (double r : {0.1, 0.5, 3.0}) {
                const cplx a = free_resolvent({dn, cplx(0.5 * n, -xi), r});
                const cplx b = free_resolvent({dn, cplx(0.5 * n, xi), r});
                const cplx diff = xi / (2.0 * kPi * cplx(0.0, 1.0)) * (a - b);
                const double k = free_spectral_kernel(dn, xi, r);
                CHECK(abs(diff - k) < 1e-9 * abs(k));
                CHECK(free_spectral_kernel(dn, -xi, r) == doctest::Approx(k).epsilon(1e-13));
            }
        // Finite diagonal limit.
        const double k0 = free_spectral_kernel(dn, 1.5, 0.0);
        CHECK(std::isfinite(k0));
        CHECK(k0 > 0.0);
        CHECK(abs(free_spectral_kernel(dn, 1.5, 1e-3) - k0) < 1e-4 * k0);
        CHECK(abs(free_spectral_kernel(dn, 1.5, 1e-4) - k0) < 1e-4 * k0);
        CHECK(abs(free_spectral_kernel(dn, 1.5, 1e-7) - k0) < 1e-12 * k0);
    }
    // H3 Plancherel density xi^2 / (4 pi^2).
    CHECK(free_spectral_kernel(d, 1.5, 0.0) == doctest::Approx(2.25 / (4.0 * kPi * kPi)).epsilon(1e-12));
}

TEST_CASE("kernel table") {
    const auto rows = kernel_table(KernelKind::resolvent, HyperbolicDim(2), cplx(1.5, 0.5), {0.5, 1.0, 2.0});
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].r == 1.0);
    CHECK(abs(rows[1].value - free_resolvent({HyperbolicDim(2), cplx(1.5, 0.5), 1.0})) == 0.0);
    const auto sp = kernel_table(KernelKind::spectral, HyperbolicDim(2), cplx(2.0), {0.0, 1.0});
    CHECK(sp[0].value.imag() == 0.0);
}
