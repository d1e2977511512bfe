#include "hyperres/specfun.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <string>

#include "hyperres/error.hpp"

namespace hyperres {
namespace {

constexpr double kPi = std::numbers::pi;
const double kHalfLog2Pi = 0.5 * std::log(2.0 * kPi);
const double kLogSqrtPi = 0.5 * std::log(kPi);

// B_{2j} for j = 1..10.
constexpr std::array<double, 10> kBernoulli = {
    1.0 / 6.0,       -1.0 / 30.0,  1.0 / 42.0,          -1.0 / 30.0,     5.0 / 66.0,
    -691.0 / 2730.0, 7.0 / 6.0,    -3617.0 / 510.0,     43867.0 / 798.0, -174611.0 / 330.0};

// Below this real part the recurrence shifts the argument before Stirling.
constexpr double kStirlingShift = 15.0;

bool is_nonpositive_integer(cplx z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

std::string fmt(cplx z) {
    std::ostringstream os;
    os.precision(17);
    os << "(" << z.real() << ", " << z.imag() << ")";
    return os.str();
}

// Distance from a complex number to the nearest integer.
double distance_to_integer(cplx z) {
    return std::abs(z - std::round(z.real()));
}

}  // namespace

cplx log_gamma(cplx z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError("log_gamma: non-finite argument");
    if (is_nonpositive_integer(z)) throw DomainError("log_gamma: pole at z = " + fmt(z));

    cplx shift_sum = 0.0;
    cplx w = z;
    if (w.real() < kStirlingShift) {
        const int n = static_cast<int>(std::ceil(kStirlingShift - w.real()));
        for (int k = 0; k < n; ++k) shift_sum += std::log(w + static_cast<double>(k));
        w += static_cast<double>(n);
    }
    const cplx winv = 1.0 / w;
    const cplx winv2 = winv * winv;
    cplx series = 0.0;
    cplx p = winv;
    for (int j = 1; j <= static_cast<int>(kBernoulli.size()); ++j) {
        series += kBernoulli[j - 1] / (2.0 * j * (2.0 * j - 1.0)) * p;
        p *= winv2;
    }
    return (w - 0.5) * std::log(w) - w + kHalfLog2Pi + series - shift_sum;
}

cplx gamma(cplx z) { return std::exp(log_gamma(z)); }

cplx rgamma(cplx z) {
    if (is_nonpositive_integer(z)) return 0.0;
    return std::exp(-log_gamma(z));
}

cplx digamma(cplx z) {
    if (is_nonpositive_integer(z)) throw DomainError("digamma: pole at z = " + fmt(z));
    cplx shift_sum = 0.0;
    cplx w = z;
    if (w.real() < kStirlingShift) {
        const int n = static_cast<int>(std::ceil(kStirlingShift - w.real()));
        for (int k = 0; k < n; ++k) shift_sum += 1.0 / (w + static_cast<double>(k));
        w += static_cast<double>(n);
    }
    const cplx winv2 = 1.0 / (w * w);
    cplx series = 0.0;
    cplx p = winv2;
    for (int j = 1; j <= static_cast<int>(kBernoulli.size()); ++j) {
        series += kBernoulli[j - 1] / (2.0 * j) * p;
        p *= winv2;
    }
    return std::log(w) - 0.5 / w - series - shift_sum;
}

SeriesValue hyp2f1_regularized_series(cplx a, cplx b, cplx c, double z, const SpecfunOptions& opt) {
    if (!(std::abs(z) < 1.0)) throw DomainError("hyp2f1 series: |z| must be < 1");

    // When c = -m the first m+1 terms vanish; the series starts at k = m+1
    // with coefficient (a)_{m+1}(b)_{m+1}/(m+1)!.
    int k = 0;
    cplx term;
    if (is_nonpositive_integer(c)) {
        const int m = static_cast<int>(-c.real());
        term = 1.0;
        for (int j = 0; j <= m; ++j) term *= (a + double(j)) * (b + double(j)) / double(j + 1);
        term *= std::pow(z, m + 1);
        k = m + 1;
    } else {
        term = rgamma(c);
    }

    if (z == 0.0) return {k == 0 ? term : cplx(0.0), a * b * rgamma(c + 1.0)};

    cplx sum = 0.0, dsum = 0.0;
    double max_term = 0.0;
    int quiet = 0;
    for (int iter = 0; iter < opt.max_terms; ++iter, ++k) {
        sum += term;
        dsum += double(k) * term / z;
        const double at = std::abs(term);
        max_term = std::max(max_term, at);

        const cplx ratio_factor = (a + double(k)) * (b + double(k)) / ((c + double(k)) * double(k + 1));
        const cplx next = term * ratio_factor * z;
        const double rho = std::abs(ratio_factor) * std::abs(z);
        const double scale = std::max(std::abs(sum), 1e-300 + 1e-16 * max_term);
        // Past the peak the remaining tail is bounded by a geometric series.
        if (rho < 1.0) {
            const double tail = std::abs(next) / (1.0 - rho) * std::max(1.0, double(k + 1));
            if (tail <= opt.rel_tol * 0.1 * scale || next == 0.0) {
                if (++quiet >= 2 || next == 0.0) return {sum + next, dsum + double(k + 1) * next / z};
            } else {
                quiet = 0;
            }
        }
        term = next;
    }
    throw ConvergenceError("hyp2f1 series: no convergence within " + std::to_string(opt.max_terms) +
                           " terms at z = " + std::to_string(z));
}

namespace {

// Regularized 2F1 near x = 1 through the 1-x connection; requires c-a-b
// away from the integers.
cplx f21_reg_transformed(cplx a, cplx b, cplx c, double x, const SpecfunOptions& opt) {
    const cplx d = c - a - b;
    const double y = 1.0 - x;
    const cplx t1 = hyp2f1_regularized_series(a, b, 1.0 - d, y, opt).value * rgamma(c - a) * rgamma(c - b);
    const cplx t2 = std::exp(d * std::log(y)) * hyp2f1_regularized_series(c - a, c - b, d + 1.0, y, opt).value *
                    rgamma(a) * rgamma(b);
    return kPi / std::sin(kPi * d) * (t1 - t2);
}

}  // namespace

cplx gauss_2f1_regularized(cplx a, cplx b, cplx c, double x, const SpecfunOptions& opt) {
    if (!(x >= 0.0 && x < 1.0)) throw DomainError("gauss_2f1: x must lie in [0,1)");
    constexpr double kDirectLimit = 0.75;
    if (x <= kDirectLimit) return hyp2f1_regularized_series(a, b, c, x, opt).value;

    constexpr double kIntegerGap = 0.05;
    if (distance_to_integer(c - a - b) >= kIntegerGap) return f21_reg_transformed(a, b, c, x, opt);
    // The regularized function is entire in c, so average over a circle in c
    // whose points all keep c-a-b clear of the integers.
    return mean_on_circle([&](cplx cc) { return f21_reg_transformed(a, b, cc, x, opt); }, c, 0.15, 24);
}

cplx gauss_2f1(cplx a, cplx b, cplx c, double x, const SpecfunOptions& opt) {
    if (is_nonpositive_integer(c)) throw DomainError("gauss_2f1: c is a nonpositive integer " + fmt(c));
    return gauss_2f1_regularized(a, b, c, x, opt) * gamma(c);
}

void LegendreArgs::validate() const {
    if (!(x > 1.0) || !std::isfinite(x)) throw DomainError("Legendre: x must be finite and > 1");
    if (!(mu >= 0.0) || std::abs(2.0 * mu - std::round(2.0 * mu)) > 1e-14)
        throw DomainError("Legendre: mu must be a nonnegative multiple of 1/2");
    if (!std::isfinite(nu.real()) || !std::isfinite(nu.imag())) throw DomainError("Legendre: nu not finite");
}

namespace {

bool is_half_odd(double mu) { return std::abs(mu - std::floor(mu) - 0.5) < 1e-14; }

cplx checked_exp(cplx logv, const char* who) {
    if (logv.real() > 700.0) {
        std::ostringstream os;
        os << who << ": value overflows (log-magnitude " << logv.real() << ")";
        throw ConvergenceError(os.str());
    }
    return std::exp(logv);
}

// Q via the convergent series in z = e^{-2r}.
RadialValue q_near(cplx nu, double mu, double r, const SpecfunOptions& opt) {
    const double z = std::exp(-2.0 * r);
    const double one_minus_z = -std::expm1(-2.0 * r);
    SeriesValue s;
    double p;
    if (is_half_odd(mu)) {
        // Euler transform: the series terminates for half-odd mu.
        s = hyp2f1_regularized_series(nu + 1.0 - mu, 0.5 - mu, nu + 1.5, z, opt);
        p = -mu;
    } else {
        s = hyp2f1_regularized_series(mu + 0.5, nu + mu + 1.0, nu + 1.5, z, opt);
        p = mu;
    }
    const cplx logpref = kLogSqrtPi + p * std::log(one_minus_z) - (nu + 1.0) * r;
    const cplx pref = checked_exp(logpref, "legendre_Q_norm");
    const cplx value = pref * s.value;
    const cplx dr = value * (2.0 * p * z / one_minus_z - (nu + 1.0)) + pref * s.derivative * (-2.0 * z);
    return {value, dr};
}

// Q via the descending series in 1/cosh^2 r.
RadialValue q_far(cplx nu, double mu, double r, const SpecfunOptions& opt) {
    const double x = std::cosh(r);
    const double w = 1.0 / (x * x);
    const double th = std::tanh(r);
    const SeriesValue s = hyp2f1_regularized_series((nu + mu + 2.0) / 2.0, (nu + mu + 1.0) / 2.0, nu + 1.5, w, opt);
    const cplx logpref = kLogSqrtPi + mu * std::log(std::sinh(r)) - (nu + 1.0) * std::log(2.0) -
                         (nu + mu + 1.0) * std::log(x);
    const cplx pref = checked_exp(logpref, "legendre_Q_norm");
    const cplx value = pref * s.value;
    const cplx dlog = mu / th - (nu + mu + 1.0) * th;
    const cplx dr = value * dlog + pref * s.derivative * (-2.0 * th * w);
    return {value, dr};
}

// P^{-mu} via the series in -sinh^2(r/2); past sinh^2(r/2) = 1/2 the Pfaff
// image in tanh^2(r/2) is used instead, which converges for every r.
RadialValue p_near(cplx nu, double mu, double r, const SpecfunOptions& opt) {
    const double sh = std::sinh(0.5 * r);
    if (sh * sh > 0.5) {
        const double t = std::tanh(0.5 * r);
        const double ch = std::cosh(0.5 * r);
        const SeriesValue s = hyp2f1_regularized_series(-nu, mu - nu, mu + 1.0, t * t, opt);
        const cplx pref = std::pow(t, mu) * std::exp(2.0 * nu * std::log(ch));
        const cplx value = pref * s.value;
        const cplx dr = value * (mu / std::sinh(r) + nu * t) + pref * s.derivative * (t / (ch * ch));
        return {value, dr};
    }
    const SeriesValue s = hyp2f1_regularized_series(nu + 1.0, -nu, mu + 1.0, -sh * sh, opt);
    const double pref = std::pow(std::tanh(0.5 * r), mu);
    const cplx value = pref * s.value;
    const cplx dr = value * (mu / std::sinh(r)) + pref * s.derivative * (-0.5 * std::sinh(r));
    return {value, dr};
}

RadialValue p_connection_raw(cplx nu, double mu, double r, const SpecfunOptions& opt) {
    const RadialValue qa = legendre_Q_norm_r(-nu - 1.0, mu, r, LegendreRoute::automatic, opt);
    const RadialValue qb = legendre_Q_norm_r(nu, mu, r, LegendreRoute::automatic, opt);
    const cplx ga = rgamma(mu + nu + 1.0);
    const cplx gb = rgamma(mu - nu);
    const cplx den = std::cos(kPi * nu);
    return {(qa.value * ga - qb.value * gb) / den, (qa.dr * ga - qb.dr * gb) / den};
}

RadialValue p_connection(cplx nu, double mu, double r, const SpecfunOptions& opt) {
    // cos(pi nu) vanishes at half-odd nu where P is regular; P is entire in nu.
    const cplx dev = nu - (std::floor(nu.real()) + 0.5);
    if (std::abs(dev) < 0.05)
        return mean_on_circle([&](cplx v) { return p_connection_raw(v, mu, r, opt); }, nu, 0.15, 24);
    return p_connection_raw(nu, mu, r, opt);
}

void check_r(double r, const char* who) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError(std::string(who) + ": r must be finite and > 0");
}

void check_mu(double mu) { LegendreArgs{0.0, mu, 2.0}.validate(); }

}  // namespace

RadialValue legendre_Q_norm_r(cplx nu, double mu, double r, LegendreRoute route, const SpecfunOptions& opt) {
    check_r(r, "legendre_Q_norm");
    check_mu(mu);
    switch (route) {
        case LegendreRoute::near: return q_near(nu, mu, r, opt);
        case LegendreRoute::far: return q_far(nu, mu, r, opt);
        case LegendreRoute::automatic: break;
    }
    const bool near_first = std::cosh(r) < opt.x0;
    std::string first_msg;
    try {
        return near_first ? q_near(nu, mu, r, opt) : q_far(nu, mu, r, opt);
    } catch (const ConvergenceError& e) {
        first_msg = e.what();
    }
    try {
        return near_first ? q_far(nu, mu, r, opt) : q_near(nu, mu, r, opt);
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(std::string("legendre_Q_norm: near-unit and large-argument forms both failed (") +
                               (near_first ? "near: " : "far: ") + first_msg + "; " + e.what() + ")");
    }
}

RadialValue legendre_P_negmu_r(cplx nu, double mu, double r, LegendreRoute route, const SpecfunOptions& opt) {
    check_r(r, "legendre_P_negmu");
    check_mu(mu);
    switch (route) {
        case LegendreRoute::near: return p_near(nu, mu, r, opt);
        case LegendreRoute::far: return p_connection(nu, mu, r, opt);
        case LegendreRoute::automatic: break;
    }
    // The near series suffers cancellation of roughly exp(2|nu+1/2| sinh(r/2)).
    const double growth = 2.0 * std::abs(nu + 0.5) * std::sinh(0.5 * r);
    if (std::cosh(r) < opt.x0 && growth < 6.0) return p_near(nu, mu, r, opt);
    return p_connection(nu, mu, r, opt);
}

cplx legendre_P_negmu(const LegendreArgs& args, LegendreRoute route, const SpecfunOptions& opt) {
    args.validate();
    return legendre_P_negmu_r(args.nu, args.mu, std::acosh(args.x), route, opt).value;
}

cplx legendre_Q_norm(const LegendreArgs& args, LegendreRoute route, const SpecfunOptions& opt) {
    args.validate();
    return legendre_Q_norm_r(args.nu, args.mu, std::acosh(args.x), route, opt).value;
}

}  // namespace hyperres
