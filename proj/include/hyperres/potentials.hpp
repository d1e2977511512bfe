#pragma once

#include <memory>
#include <string>
#include <vector>

namespace hyperres {

// Hyperbolic space H^{n+1}.
class HyperbolicDim {
public:
    explicit HyperbolicDim(int n);
    int n() const { return n_; }
    double mu0() const { return 0.5 * (n_ - 1); }
    // Vol(S^n) = 2 pi^{(n+1)/2} / Gamma((n+1)/2)
    double sphere_volume() const;

private:
    int n_;
};

enum class PotentialKind { zero, bump, smoothed_well, ball, tabulated, composite };

// Real radial profile V(r) vanishing for r >= R. Presets vanish to all
// orders at R. Immutable once built and cheap to copy.
class RadialPotential {
public:
    RadialPotential();  // V == 0

    static RadialPotential zero() { return {}; }
    // amplitude * exp(-1/(1 - (r/R)^2)) for r < R
    static RadialPotential bump(double amplitude, double R);
    // amplitude on [0, inner], smooth C-infinity descent to 0 on [inner, R]
    static RadialPotential smoothed_well(double amplitude, double R, double inner);
    // amplitude on [0, R); discontinuous, intended for quadrature checks only
    static RadialPotential ball(double amplitude, double R);
    // Monotone piecewise-cubic interpolant through (r, v), clamped to 0 for r >= R.
    static RadialPotential tabulated(std::vector<double> r, std::vector<double> v, double R);

    RadialPotential scaled(double c) const;
    RadialPotential operator+(const RadialPotential& other) const;

    double operator()(double r) const;
    double support_radius() const { return R_; }
    bool is_zero() const { return terms_.empty(); }
    PotentialKind kind() const;
    // sup |V| on a dense sample grid
    double max_abs() const;
    // Radii where the profile is not smooth or changes formula; quadrature
    // splits there.
    std::vector<double> breakpoints() const;

    struct Term;

private:
    static RadialPotential from_term(std::shared_ptr<const Term> t);

    std::vector<std::shared_ptr<const Term>> terms_;
    std::vector<double> coef_;
    double R_ = 0.0;
};

inline double evaluate(const RadialPotential& V, double r) { return V(r); }

// Vol-weighted integral  Vol(S^n) * int_0^R V(r)^power sinh^n r dr.
double volume_integral(const RadialPotential& V, const HyperbolicDim& dim, int power, double abs_tol = 1e-11);

}  // namespace hyperres
