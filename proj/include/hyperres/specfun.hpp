#pragma once

#include <complex>
#include <numbers>

namespace hyperres {

using cplx = std::complex<double>;

struct SpecfunOptions {
    double rel_tol = 1e-12;
    // Legendre functions switch from the near-unit representation to the
    // descending series in 1/x^2 at x = cosh r >= x0.
    double x0 = 3.0;
    int max_terms = 200000;
};

// Principal branch of log Gamma, continuous on C minus (-inf, 0].
// Throws DomainError at the poles z = 0, -1, -2, ...
cplx log_gamma(cplx z);
cplx gamma(cplx z);
// 1/Gamma(z); entire, exactly zero at the nonpositive integers.
cplx rgamma(cplx z);
cplx digamma(cplx z);

struct SeriesValue {
    cplx value;
    cplx derivative;  // d/dz of the series
};

// Regularized Gauss series F(a,b;c;z)/Gamma(c) for real |z| < 1, together
// with its z-derivative. Well defined for every c, including c = 0, -1, ...
SeriesValue hyp2f1_regularized_series(cplx a, cplx b, cplx c, double z,
                                      const SpecfunOptions& opt = {});

// F(a,b;c;x)/Gamma(c) for x in [0,1). Uses the 1-x connection near x = 1.
cplx gauss_2f1_regularized(cplx a, cplx b, cplx c, double x, const SpecfunOptions& opt = {});

// F(a,b;c;x) for x in [0,1). DomainError if c is a nonpositive integer.
cplx gauss_2f1(cplx a, cplx b, cplx c, double x, const SpecfunOptions& opt = {});

struct LegendreArgs {
    cplx nu;
    double mu = 0.0;
    double x = 2.0;
    // Throws DomainError unless x > 1, mu >= 0 and 2*mu is an integer.
    void validate() const;
};

// Representation selector. For Q, `near` is the series in e^{-2r} and `far`
// the descending series in 1/x^2. For P, `near` is the series in
// -sinh^2(r/2) and `far` the Q-connection formula.
enum class LegendreRoute { automatic, near, far };

struct RadialValue {
    cplx value;
    cplx dr;  // derivative with respect to r, where x = cosh r

    RadialValue& operator+=(const RadialValue& o) {
        value += o.value;
        dr += o.dr;
        return *this;
    }
    RadialValue operator/(double d) const { return {value / d, dr / d}; }
};

// P_nu^{-mu}(x) for x > 1.
cplx legendre_P_negmu(const LegendreArgs& args, LegendreRoute route = LegendreRoute::automatic,
                      const SpecfunOptions& opt = {});

// Normalized Q: e^{-i pi mu} Q_nu^mu(x) / Gamma(mu + nu + 1), entire in nu.
cplx legendre_Q_norm(const LegendreArgs& args, LegendreRoute route = LegendreRoute::automatic,
                     const SpecfunOptions& opt = {});

// The same functions parameterized by r > 0 (x = cosh r), with d/dr.
RadialValue legendre_P_negmu_r(cplx nu, double mu, double r,
                               LegendreRoute route = LegendreRoute::automatic,
                               const SpecfunOptions& opt = {});
RadialValue legendre_Q_norm_r(cplx nu, double mu, double r,
                              LegendreRoute route = LegendreRoute::automatic,
                              const SpecfunOptions& opt = {});

// Mean of an analytic function over a circle; equals f(center) when f is
// holomorphic on the closed disk. Used to step over removable singularities.
template <class F>
auto mean_on_circle(F&& f, cplx center, double radius, int points = 16) {
    using R = decltype(f(center));
    R acc{};
    for (int k = 0; k < points; ++k) {
        const double th = 2.0 * std::numbers::pi * (k + 0.5) / points;
        acc += f(center + std::polar(radius, th));
    }
    return acc / static_cast<double>(points);
}

}  // namespace hyperres
