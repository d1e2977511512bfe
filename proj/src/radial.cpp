#include "hyperres/radial.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint/stepper/controlled_runge_kutta.hpp>
#include <boost/numeric/odeint/stepper/generation.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta_fehlberg78.hpp>
#include <cmath>
#include <sstream>

#include "hyperres/error.hpp"

namespace hyperres {

long long harmonic_multiplicity(int n, int l) {
    if (n < 1 || l < 0) throw DomainError("harmonic_multiplicity: need n >= 1, l >= 0");
    // dim H_l(S^n) = C(l+n, n) - C(l+n-2, n)
    auto binom = [](long long a, long long b) -> long long {
        if (a < b || a < 0) return 0;
        long long c = 1;
        for (long long k = 1; k <= b; ++k) c = c * (a - b + k) / k;
        return c;
    };
    return binom(l + n, n) - binom(l + n - 2, n);
}

Sector::Sector(HyperbolicDim d, int l_) : dim(d), l(l_), mu(l_ + d.mu0()), multiplicity(0) {
    if (l_ < 0) throw DomainError("Sector: l must be >= 0");
    multiplicity = harmonic_multiplicity(d.n(), l_);
}

cplx RadialSolution::value(std::size_t i) const { return u.at(i) * std::exp(log_scale.at(i)); }
cplx RadialSolution::derivative(std::size_t i) const { return du.at(i) * std::exp(log_scale.at(i)); }

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 8>;

constexpr double kPi = std::numbers::pi;

// (u, u', du/ds, du'/ds) as mantissas sharing one log scale.
struct ShootState {
    cplx u, du, us, dus;
    double log_scale;
};

double launch_radius(const Sector& sec, const RadialOptions& opt) {
    return opt.r0_scale * std::min(1.0, 1.0 / (sec.l + 1.0));
}

// Integrates the channel equation and its s-variation from the Frobenius
// start to each radius in `radii` (ascending).
std::vector<ShootState> shoot(const Sector& sec, cplx s, const RadialPotential& V, const std::vector<double>& radii,
                              const RadialOptions& opt) {
    const int n = sec.dim.n();
    const int l = sec.l;
    const double L = double(l) * (l + n - 1);
    const cplx E = s * (double(n) - s);
    const cplx dE = double(n) - 2.0 * s;
    const double r0 = launch_radius(sec, opt);
    if (!(r0 > 0.0) || l * std::log(r0) < -1e300) throw ConvergenceError("integrate_regular: r0 underflow");

    // Frobenius data u = r^l (1 + c2 r^2 + c4 r^4); V ~ V0 + V2 r^2 near 0.
    const double V0 = V(0.0);
    const double hv = 1e-3 * std::max(1e-3, std::min(1.0, V.support_radius()));
    const double V2 = V.is_zero() ? 0.0 : (V(hv) - V0) / (hv * hv);
    const double d2 = 2.0 * (2 * l + n + 1), d4 = 4.0 * (2 * l + n + 3);
    const cplx k2 = E - V0 + n * l / 3.0 + L / 3.0;
    const cplx c2 = -k2 / d2;
    const cplx c2s = -dE / d2;
    const cplx k4 = E - V0 + n * (l + 2) / 3.0 + L / 3.0;
    const cplx c4 = -(c2 * k4 - n * l / 45.0 - L / 15.0 - V2) / d4;
    const cplx c4s = -(c2s * k4 + c2 * dE) / d4;
    const double r2 = r0 * r0;

    cplx u = 1.0 + c2 * r2 + c4 * r2 * r2;
    cplx du = double(l) / r0 + (l + 2.0) * c2 * r0 + (l + 4.0) * c4 * r0 * r2;
    cplx us = c2s * r2 + c4s * r2 * r2;
    cplx dus = (l + 2.0) * c2s * r0 + (l + 4.0) * c4s * r0 * r2;
    double log_scale = l * std::log(r0);

    State y = {u.real(), u.imag(), du.real(), du.imag(), us.real(), us.imag(), dus.real(), dus.imag()};
    auto rhs = [&](const State& x, State& dx, double r) {
        const double sh = std::sinh(r);
        const double ct = std::cosh(r) / sh;
        const cplx q = E - V(r) - L / (sh * sh);
        const cplx uu(x[0], x[1]), up(x[2], x[3]), vs(x[4], x[5]), vp(x[6], x[7]);
        const cplx upp = -double(n) * ct * up - q * uu;
        const cplx vpp = -double(n) * ct * vp - q * vs - dE * uu;
        dx = {up.real(), up.imag(), upp.real(), upp.imag(), vp.real(), vp.imag(), vpp.real(), vpp.imag()};
    };

    auto stepper = odeint::make_controlled(opt.atol, opt.rtol, odeint::runge_kutta_fehlberg78<State>());
    double r = r0;
    double dt = 0.1 * r0;
    int steps = 0;
    std::vector<ShootState> out;
    out.reserve(radii.size());
    for (double target : radii) {
        while (r < target) {
            if (++steps > opt.max_steps) {
                std::ostringstream os;
                os << "integrate_regular: step budget exhausted at r = " << r << " (l = " << l << ", s = " << s << ")";
                throw ConvergenceError(os.str());
            }
            double h = std::min(dt, target - r);
            const bool clipped = h < dt;
            const double dt_before = dt;
            if (stepper.try_step(rhs, y, r, h) == odeint::success) {
                dt = clipped ? dt_before : h;
                // Keep mantissas near unit size.
                double m = 0.0;
                for (double c : y) m = std::max(m, std::abs(c));
                if (m > 1e100 || (m < 1e-100 && m > 0.0)) {
                    for (double& c : y) c /= m;
                    log_scale += std::log(m);
                }
            } else {
                dt = h;
                if (dt < 1e-14 * std::max(1.0, r)) throw ConvergenceError("integrate_regular: step size underflow");
            }
        }
        out.push_back({{y[0], y[1]}, {y[2], y[3]}, {y[4], y[5]}, {y[6], y[7]}, log_scale});
    }
    return out;
}

double auto_match_radius(const RadialPotential& V, const RadialOptions& opt) {
    if (opt.r_match > 0.0) {
        if (opt.r_match < V.support_radius())
            throw DomainError("r_match must be at least the support radius of V");
        return opt.r_match;
    }
    return std::max(V.support_radius(), 1.0);
}

struct JostWithS {
    cplx psi, dpsi, psi_s, dpsi_s;
};

// psi and its s-derivative; the latter by a Cauchy integral over a small
// circle in s (psi is entire in s).
JostWithS jost_with_s(const Sector& sec, cplx s, double r, const SpecfunOptions& sp, bool with_s) {
    const JostValue j = jost_solution(sec, s, r, sp);
    JostWithS out{j.value, j.derivative, 0.0, 0.0};
    if (!with_s) return out;
    constexpr int kPts = 12;
    constexpr double kRho = 0.05;
    for (int k = 0; k < kPts; ++k) {
        const cplx w = std::polar(1.0, 2.0 * kPi * (k + 0.5) / kPts);
        const JostValue jk = jost_solution(sec, s + kRho * w, r, sp);
        out.psi_s += jk.value / w;
        out.dpsi_s += jk.derivative / w;
    }
    out.psi_s /= kPts * kRho;
    out.dpsi_s /= kPts * kRho;
    return out;
}

// Mantissa Wronskian sinh^n (u psi' - u' psi); true value is exp(log_scale) times this.
cplx wronskian_mantissa(int n, double r, const ShootState& st, const JostWithS& j) {
    return std::pow(std::sinh(r), n) * (st.u * j.dpsi - st.du * j.psi);
}

cplx wronskian_s_mantissa(int n, double r, const ShootState& st, const JostWithS& j) {
    return std::pow(std::sinh(r), n) * (st.us * j.dpsi + st.u * j.dpsi_s - st.dus * j.psi - st.du * j.psi_s);
}

// -(mu log 2 + log Gamma(1 + mu)): the free Wronskian normalization.
double free_norm_log(const Sector& sec) { return -(sec.mu * std::log(2.0) + std::lgamma(1.0 + sec.mu)); }

// Distance from s + l to the nearest nonpositive integer.
double pole_distance(const Sector& sec, cplx s) {
    const cplx z = s + double(sec.l);
    const double k = std::min(0.0, std::round(z.real()));
    return std::abs(z - k);
}

constexpr double kPoleGuard = 0.02;
constexpr double kPoleCircle = 0.1;

// log J at s and n - s together with d/ds log J at s; no pole handling.
ChannelLogJost log_jost_raw(const Sector& sec, cplx s, const RadialPotential& V, const RadialOptions& opt,
                            bool with_derivative, bool with_reflected = true) {
    const int n = sec.dim.n();
    const double rm = auto_match_radius(V, opt);
    const ShootState st = shoot(sec, s, V, {rm}, opt).front();
    const cplx sr = double(n) - s;
    const JostWithS ja = jost_with_s(sec, s, rm, opt.special, with_derivative);
    const cplx wa = wronskian_mantissa(n, rm, st, ja);
    const double c = st.log_scale + free_norm_log(sec);
    ChannelLogJost out;
    out.log_J = log_gamma(s + double(sec.l)) + std::log(-wa) + c;
    out.log_J_reflected = 0.0;
    if (with_reflected) {
        const JostWithS jb = jost_with_s(sec, sr, rm, opt.special, false);
        out.log_J_reflected = log_gamma(sr + double(sec.l)) + std::log(-wronskian_mantissa(n, rm, st, jb)) + c;
    }
    out.dlog_J = 0.0;
    if (with_derivative) out.dlog_J = digamma(s + double(sec.l)) + wronskian_s_mantissa(n, rm, st, ja) / wa;
    return out;
}

// J(s) by value, routed through a circle mean near the removable poles that
// occur in odd dimension.
cplx jost_J(const Sector& sec, cplx s, const RadialPotential& V, const RadialOptions& opt) {
    if (sec.dim.n() % 2 == 0 && pole_distance(sec, s) < kPoleGuard)
        return mean_on_circle([&](cplx z) { return std::exp(log_jost_raw(sec, z, V, opt, false, false).log_J); },
                              s, kPoleCircle, 16);
    return std::exp(log_jost_raw(sec, s, V, opt, false, false).log_J);
}

}  // namespace

RadialSolution integrate_regular(const Sector& sector, cplx s, const RadialPotential& V, double r_match,
                                 const RadialOptions& opt, std::vector<double> samples) {
    if (!(r_match > 0.0) || r_match < V.support_radius())
        throw DomainError("integrate_regular: r_match must be positive and at least the support radius");
    const double r0 = launch_radius(sector, opt);
    const double r_end = r_match + opt.delta;
    std::vector<double> grid;
    for (double r : samples)
        if (r > r0 && r <= r_end) grid.push_back(r);
    grid.push_back(r_match);
    grid.push_back(r_end);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    const auto states = shoot(sector, s, V, grid, opt);
    RadialSolution sol{sector, s, grid, {}, {}, {}};
    for (const auto& st : states) {
        sol.u.push_back(st.u);
        sol.du.push_back(st.du);
        sol.log_scale.push_back(st.log_scale);
    }
    return sol;
}

JostValue jost_solution(const Sector& sector, cplx s, double r, const SpecfunOptions& opt) {
    if (!(r > 0.0)) throw DomainError("jost_solution: r must be > 0");
    const int n = sector.dim.n();
    const double mu0 = sector.dim.mu0();
    const cplx nu = s - 0.5 * (n + 1);
    const RadialValue q = legendre_Q_norm_r(nu, sector.mu, r, LegendreRoute::automatic, opt);
    const double sh = std::sinh(r);
    const double w = std::pow(sh, -mu0);
    return {w * q.value, w * (q.dr - mu0 * std::cosh(r) / sh * q.value)};
}

ChannelDecomposition decompose_at_match(const RadialSolution& u, const Sector& sector, cplx s, double r_match,
                                        const RadialOptions& opt) {
    const int n = sector.dim.n();
    const cplx kappa = s - 0.5 * n;
    // W[psi(n-s), psi(s)] = -sin(pi kappa): it vanishes on kappa in Z.
    const double dist = std::abs(kappa - std::round(kappa.real()));
    if (std::abs(std::sin(kPi * kappa)) < 1e-10) {
        std::ostringstream os;
        os << "decompose_at_match: free Wronskian is singular at s = " << s << " (distance " << dist
           << " to the set s - n/2 in Z)";
        throw DomainError(os.str());
    }
    auto find = [&](double r) {
        for (std::size_t i = 0; i < u.grid.size(); ++i)
            if (std::abs(u.grid[i] - r) < 1e-12 * std::max(1.0, r)) return i;
        throw DomainError("decompose_at_match: radius not on the solution grid");
    };
    const std::size_t i0 = find(r_match);
    const cplx sr = double(n) - s;
    auto wr = [&](std::size_t i, const JostValue& j) {
        return std::pow(std::sinh(u.grid[i]), n) * (u.value(i) * j.derivative - u.derivative(i) * j.value);
    };
    const JostValue ps = jost_solution(sector, s, r_match, opt.special);
    const JostValue pr = jost_solution(sector, sr, r_match, opt.special);
    const cplx wfree = std::pow(std::sinh(r_match), n) * (pr.value * ps.derivative - pr.derivative * ps.value);
    ChannelDecomposition d{s, wr(i0, ps) / wfree, -wr(i0, pr) / wfree, r_match, 0.0};

    // Reconstruction residual at the second point, if present.
    const double r2 = r_match + opt.delta;
    for (std::size_t i = 0; i < u.grid.size(); ++i) {
        if (std::abs(u.grid[i] - r2) < 1e-12 * std::max(1.0, r2)) {
            const cplx rec = d.A_grow * jost_solution(sector, sr, r2, opt.special).value +
                             d.B_decay * jost_solution(sector, s, r2, opt.special).value;
            d.residual = std::abs(rec - u.value(i)) / std::max(std::abs(u.value(i)), 1e-300);
        }
    }
    return d;
}

ChannelLogJost channel_log_jost(const Sector& sector, cplx s, const RadialPotential& V, const RadialOptions& opt,
                                bool with_derivative) {
    const bool odd_dim = sector.dim.n() % 2 == 0;
    const cplx sr = double(sector.dim.n()) - s;
    if (!odd_dim || (pole_distance(sector, s) >= kPoleGuard && pole_distance(sector, sr) >= kPoleGuard))
        return log_jost_raw(sector, s, V, opt, with_derivative);

    ChannelLogJost out;
    out.log_J = std::log(jost_J(sector, s, V, opt));
    out.log_J_reflected = std::log(jost_J(sector, sr, V, opt));
    out.dlog_J = 0.0;
    if (with_derivative) {
        constexpr int kPts = 16;
        cplx acc = 0.0;
        for (int k = 0; k < kPts; ++k) {
            const cplx w = std::polar(1.0, 2.0 * kPi * (k + 0.5) / kPts);
            acc += jost_J(sector, s + kPoleCircle * w, V, opt) / w;
        }
        out.dlog_J = acc / (kPts * kPoleCircle) / std::exp(out.log_J);
    }
    return out;
}

cplx jost_function(const Sector& sector, cplx s, const RadialPotential& V, const RadialOptions& opt) {
    if (sector.dim.n() % 2 == 0) return jost_J(sector, s, V, opt);
    // Even dimension: D = J / Gamma(s + l) = -W / (2^mu Gamma(1 + mu)).
    const double rm = auto_match_radius(V, opt);
    const ShootState st = shoot(sector, s, V, {rm}, opt).front();
    const JostWithS j = jost_with_s(sector, s, rm, opt.special, false);
    const cplx w = wronskian_mantissa(sector.dim.n(), rm, st, j);
    return -w * std::exp(st.log_scale + free_norm_log(sector));
}

JostFunctionValue jost_function_with_derivative(const Sector& sector, cplx s, const RadialPotential& V,
                                        const RadialOptions& opt) {
    if (sector.dim.n() % 2 == 0) {
        if (pole_distance(sector, s) >= kPoleGuard) {
            const ChannelLogJost lj = log_jost_raw(sector, s, V, opt, true, false);
            const cplx J = std::exp(lj.log_J);
            return {J, J * lj.dlog_J};
        }
        constexpr int kPts = 16;
        cplx acc = 0.0;
        for (int k = 0; k < kPts; ++k) {
            const cplx w = std::polar(1.0, 2.0 * kPi * (k + 0.5) / kPts);
            acc += jost_J(sector, s + kPoleCircle * w, V, opt) / w;
        }
        return {jost_J(sector, s, V, opt), acc / (kPts * kPoleCircle)};
    }
    const double rm = auto_match_radius(V, opt);
    const ShootState st = shoot(sector, s, V, {rm}, opt).front();
    const JostWithS j = jost_with_s(sector, s, rm, opt.special, true);
    const int n = sector.dim.n();
    const double c = std::exp(st.log_scale + free_norm_log(sector));
    return {-wronskian_mantissa(n, rm, st, j) * c, -wronskian_s_mantissa(n, rm, st, j) * c};
}

cplx channel_smatrix_ratio(const Sector& sector, cplx s, const RadialPotential& V, const RadialOptions& opt) {
    if (V.is_zero()) return 1.0;
    const ChannelLogJost lj = channel_log_jost(sector, s, V, opt, false);
    return std::exp(lj.log_J_reflected - lj.log_J);
}

}  // namespace hyperres
