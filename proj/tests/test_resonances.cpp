#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "hyperres/error.hpp"
#include "hyperres/resonances.hpp"

using namespace hyperres;
using std::abs;

namespace {
const RadialPotential kWell = RadialPotential::smoothed_well(-3.0, 1.5, 0.5);
}

TEST_CASE("search region validation") {
    CHECK_THROWS_AS((SearchRegion{1, 0, -1, 1, {}}).validate(), DomainError);
    CHECK_THROWS_AS((SearchRegion{0, 1, -1, 1, {{cplx(0.5), 0.0}}}).validate(), DomainError);
    const SearchRegion r{-2, 3, -1, 4, {}};
    CHECK(r.inscribed_radius(cplx(1, 0)) == doctest::Approx(1.0));
    CHECK(r.inscribed_radius(cplx(9, 0)) == 0.0);
}

TEST_CASE("free odd-dimensional space has no resonances") {
    const HyperbolicDim dim(2);
    const SearchRegion R{-4, 1, -4, 4, {{cplx(1, 0), 1e-2}}};
    for (int l = 0; l <= 3; ++l) CHECK(count_zeros(Sector(dim, l), R, RadialPotential()) == 0);
    const ResonanceList L = find_resonances(dim, RadialPotential(), R, 3);
    CHECK(L.entries.empty());
    CHECK(L.complete);
    CHECK(counting_function(L, 3.0).count == 0);
}

TEST_CASE("free H2: zeros at -k aggregate to 2k + 1") {
    const HyperbolicDim dim(1);
    CHECK(count_zeros(Sector(dim, 0), SearchRegion{-1.3, -0.7, -0.3, 0.3, {}}, RadialPotential()) == 1);
    const ResonanceList L = find_resonances(dim, RadialPotential(), SearchRegion{-3.5, 0.4, -1, 1.3, {}});
    CHECK(L.complete);
    std::map<int, long long> agg;
    for (const auto& e : L.entries) {
        CHECK(e.zeta.imag() == 0.0);
        CHECK(abs(e.zeta.real() - std::round(e.zeta.real())) < 1e-8);
        CHECK(e.strict);
        agg[int(std::lround(-e.zeta.real()))] += e.multiplicity();
    }
    for (int k = 0; k <= 3; ++k) CHECK(agg[k] == 2 * k + 1);

    // N_0(r) around s = 1/2: the zero at -k lies at distance k + 1/2.
    const ResonanceList big = find_resonances(dim, RadialPotential(), SearchRegion{-6, 7, -6.5, 6.5, {}}, 8);
    long long expect = 0;
    for (int r = 1; r <= 5; ++r) {
        expect += 2 * (r - 1) + 1;
        const CountValue c = counting_function(big, double(r));
        CHECK(c.count == expect);
        CHECK(!c.lower_bound_only);
    }
    CHECK(counting_function(big, 20.0).lower_bound_only);
}

TEST_CASE("conjugate regions give equal counts") {
    const HyperbolicDim dim(2);
    const Sector sec(dim, 2);
    const int up = count_zeros(sec, SearchRegion{-2, 0, 0.5, 3, {}}, kWell);
    const int down = count_zeros(sec, SearchRegion{-2, 0, -3, -0.5, {}}, kWell);
    CHECK(up == down);
    CHECK(up == 1);
}

TEST_CASE("well in H3: eigenvalue, conjugate pairs, stability, counting") {
    const HyperbolicDim dim(2);
    const SearchRegion R{-3, 3, -3, 3, {}};
    const ResonanceList L = find_resonances(dim, kWell, R);
    CHECK(L.complete);
    int eig = 0;
    for (const auto& e : L.entries) {
        CHECK(e.residual < 1e-8);
        CHECK(e.rmatch_shift < 1e-6);
        if (e.eigenvalue) {
            ++eig;
            CHECK(e.l == 0);
            CHECK(e.zeta.real() > 1.0);
            CHECK(e.zeta.real() < 2.0);
            CHECK(e.lambda == doctest::Approx(e.zeta.real() * (2.0 - e.zeta.real())));
        } else {
            CHECK(e.zeta.real() < 1.0);
        }
        if (e.zeta.imag() != 0.0) {
            int partners = 0;
            for (const auto& f : L.entries)
                if (f.l == e.l && abs(f.zeta - std::conj(e.zeta)) < 1e-8) ++partners;
            CHECK(partners == 1);
        }
    }
    CHECK(eig == 1);
    // Leaf-cell totals equal the polished orders per channel.
    for (int l = 0; l <= L.L_max; ++l) {
        int sum = 0;
        for (const auto& e : L.entries)
            if (e.l == l) sum += e.order;
        CHECK(sum == L.channel_counts[l]);
    }
    // Monotone counting function and a finite growth constant.
    long long prev = 0;
    for (double r = 0.0; r <= 2.0; r += 0.1) {
        const long long c = counting_function(L, r).count;
        CHECK(c >= prev);
        prev = c;
    }
    const double C = counting_growth_constant(L, 1.0, 2.0);
    CHECK(std::isfinite(C));
    CHECK(C > 0.0);
    CHECK(critical_point_probe(dim, kWell, 4) == 0);
}

TEST_CASE("budget is enforced") {
    ResonanceOptions opt;
    opt.eval_budget = 10;
    CHECK_THROWS_AS(find_resonances(HyperbolicDim(2), kWell, SearchRegion{-3, 3, -3, 3, {}}, 2, opt),
                    ConvergenceError);
}
