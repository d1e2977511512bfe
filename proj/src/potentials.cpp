#include "hyperres/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

// Boost 1.74's pchip calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include "hyperres/error.hpp"
#include "hyperres/quadrature.hpp"

namespace hyperres {

HyperbolicDim::HyperbolicDim(int n) : n_(n) {
    if (n < 1) throw DomainError("HyperbolicDim: n must be >= 1 (space H^{n+1})");
}

double HyperbolicDim::sphere_volume() const {
    const double h = 0.5 * (n_ + 1);
    return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

struct RadialPotential::Term {
    PotentialKind kind;
    double amplitude = 0.0;
    double R = 0.0;
    double inner = 0.0;
    std::shared_ptr<const boost::math::interpolators::pchip<std::vector<double>>> spline;

    double operator()(double r) const {
        if (r >= R) return 0.0;
        switch (kind) {
            case PotentialKind::bump: {
                const double q = r / R;
                return amplitude * std::exp(-1.0 / (1.0 - q * q));
            }
            case PotentialKind::smoothed_well: {
                if (r <= inner) return amplitude;
                const double t = (R - r) / (R - inner);
                const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
                return amplitude * a / (a + b);
            }
            case PotentialKind::ball: return amplitude;
            case PotentialKind::tabulated: return (*spline)(r);
            default: return 0.0;
        }
    }
};

RadialPotential::RadialPotential() = default;

namespace {
void require_radius(double R) {
    if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("potential: support radius must be finite and > 0");
}
void require_finite(double a) {
    if (!std::isfinite(a)) throw DomainError("potential: amplitude must be finite");
}
}  // namespace

RadialPotential RadialPotential::from_term(std::shared_ptr<const Term> t) {
    RadialPotential V;
    V.R_ = t->R;
    V.terms_.push_back(std::move(t));
    V.coef_.push_back(1.0);
    return V;
}

RadialPotential RadialPotential::bump(double amplitude, double R) {
    require_radius(R);
    require_finite(amplitude);
    auto t = std::make_shared<Term>();
    t->kind = PotentialKind::bump;
    t->amplitude = amplitude;
    t->R = R;
    if (amplitude == 0.0) return {};
    return from_term(std::move(t));
}

RadialPotential RadialPotential::smoothed_well(double amplitude, double R, double inner) {
    require_radius(R);
    require_finite(amplitude);
    if (!(inner >= 0.0 && inner < R)) throw DomainError("smoothed_well: need 0 <= inner < R");
    auto t = std::make_shared<Term>();
    t->kind = PotentialKind::smoothed_well;
    t->amplitude = amplitude;
    t->R = R;
    t->inner = inner;
    if (amplitude == 0.0) return {};
    return from_term(std::move(t));
}

RadialPotential RadialPotential::ball(double amplitude, double R) {
    require_radius(R);
    require_finite(amplitude);
    auto t = std::make_shared<Term>();
    t->kind = PotentialKind::ball;
    t->amplitude = amplitude;
    t->R = R;
    if (amplitude == 0.0) return {};
    return from_term(std::move(t));
}

RadialPotential RadialPotential::tabulated(std::vector<double> r, std::vector<double> v, double R) {
    require_radius(R);
    if (r.size() != v.size() || r.size() < 4) throw DomainError("tabulated potential: need >= 4 matching samples");
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!std::isfinite(r[i]) || !std::isfinite(v[i])) throw DomainError("tabulated potential: non-finite sample");
        if (i > 0 && !(r[i] > r[i - 1])) throw DomainError("tabulated potential: radii must increase strictly");
    }
    if (r.front() != 0.0) throw DomainError("tabulated potential: first radius must be 0");
    if (r.back() < R) throw DomainError("tabulated potential: samples must reach the support radius");
    auto t = std::make_shared<Term>();
    t->kind = PotentialKind::tabulated;
    t->R = R;
    t->spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::move(r), std::move(v));
    return from_term(std::move(t));
}

RadialPotential RadialPotential::scaled(double c) const {
    require_finite(c);
    if (c == 0.0) return {};
    RadialPotential V = *this;
    for (double& k : V.coef_) k *= c;
    return V;
}

RadialPotential RadialPotential::operator+(const RadialPotential& other) const {
    RadialPotential V = *this;
    V.terms_.insert(V.terms_.end(), other.terms_.begin(), other.terms_.end());
    V.coef_.insert(V.coef_.end(), other.coef_.begin(), other.coef_.end());
    V.R_ = std::max(R_, other.R_);
    return V;
}

double RadialPotential::operator()(double r) const {
    double v = 0.0;
    for (std::size_t i = 0; i < terms_.size(); ++i) v += coef_[i] * (*terms_[i])(r);
    return v;
}

PotentialKind RadialPotential::kind() const {
    if (terms_.empty()) return PotentialKind::zero;
    if (terms_.size() > 1) return PotentialKind::composite;
    return terms_.front()->kind;
}

double RadialPotential::max_abs() const {
    if (terms_.empty()) return 0.0;
    constexpr int kSamples = 4000;
    double m = 0.0;
    for (int i = 0; i <= kSamples; ++i) m = std::max(m, std::abs((*this)(R_ * i / kSamples)));
    return m;
}

std::vector<double> RadialPotential::breakpoints() const {
    std::vector<double> b;
    for (const auto& t : terms_) {
        b.push_back(t->R);
        if (t->kind == PotentialKind::smoothed_well && t->inner > 0.0) b.push_back(t->inner);
    }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

double volume_integral(const RadialPotential& V, const HyperbolicDim& dim, int power, double abs_tol) {
    if (power < 1) throw DomainError("volume_integral: power must be >= 1");
    if (V.is_zero()) return 0.0;
    const int n = dim.n();
    auto f = [&](double r) { return std::pow(V(r), power) * std::pow(std::sinh(r), n); };
    const double w = dim.sphere_volume();
    double total = 0.0, a = 0.0;
    for (double b : V.breakpoints()) {
        total += integrate(f, a, b, abs_tol / (w * 4.0)).value;
        a = b;
    }
    return w * total;
}

}  // namespace hyperres
