#include "hyperres/traces.hpp"

#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "hyperres/error.hpp"
#include "hyperres/quadrature.hpp"

namespace hyperres {

namespace {

constexpr double kPi = std::numbers::pi;

// sinh(z)/z, stable near 0.
cplx sinhc(cplx z) {
    if (std::abs(z) < 1e-4) return 1.0 + z * z / 6.0;
    return std::sinh(z) / z;
}

double sinc(double x) { return std::abs(x) < 1e-6 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

// Cardinal B-spline of order p on [0, p] with unit integral.
double cardinal_bspline(double x, int p) {
    if (x <= 0.0 || x >= p) return 0.0;
    // Cox-de Boor: M_q(y) = [y M_{q-1}(y) + (q - y) M_{q-1}(y - 1)] / (q - 1),
    // tabulated at y = x - j for the p shifts that can be nonzero.
    const int j0 = int(std::floor(x));
    std::vector<double> m(p + 1, 0.0);  // m[j] = M_q(x - j)
    if (j0 < p) m[j0] = 1.0;
    for (int q = 2; q <= p; ++q)
        for (int j = 0; j <= j0 && j < p; ++j) {
            const double y = x - j;
            const double next = (j + 1 <= p) ? m[j + 1] : 0.0;
            m[j] = (y * m[j] + (q - y) * next) / (q - 1);
        }
    return m[0];
}

// Integral of samples f over the nodes x by nonuniform Simpson on interval
// pairs; an odd interval out is closed with the three-point rule.
double simpson(const std::vector<double>& x, const std::vector<double>& f) {
    const std::size_t m = x.size();
    if (m < 2) return 0.0;
    if (m == 2) return 0.5 * (x[1] - x[0]) * (f[0] + f[1]);
    double s = 0.0;
    std::size_t i = 0;
    for (; i + 2 < m; i += 2) {
        const double h0 = x[i + 1] - x[i], h1 = x[i + 2] - x[i + 1], hs = h0 + h1;
        s += hs / 6.0 * ((2.0 - h1 / h0) * f[i] + hs * hs / (h0 * h1) * f[i + 1] + (2.0 - h0 / h1) * f[i + 2]);
    }
    if (i + 1 < m) {
        const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
        const double alpha = (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1));
        const double beta = (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0);
        const double eta = h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
        s += alpha * f[i + 1] + beta * f[i] - eta * f[i - 1];
    }
    return s;
}

// int_a^b g, split into unit-ish panels so the adaptive rule sees the oscillation.
double integrate_long(const std::function<double(double)>& g, double a, double b, double panel) {
    double total = 0.0;
    for (double lo = a; lo < b; lo += panel) {
        const double hi = std::min(b, lo + panel);
        total += integrate(g, lo, hi, 1e-14, 1e-10, 14).value;
    }
    return total;
}

double poly_eval(const AsymptoticFit& fit, double xi) {
    double v = 0.0;
    for (std::size_t k = 0; k < fit.coef.size(); ++k) v += fit.coef[k] * std::pow(xi, fit.powers[k]);
    return v;
}

bool grid_is_zero(const PhaseGrid& g) {
    for (double d : g.dsigma)
        if (d != 0.0) return false;
    return true;
}

void check_grid(const PhaseGrid& g, const HyperbolicDim& dim) {
    if (g.n != dim.n()) throw DomainError("phase grid dimension does not match");
    if (g.xi.size() < 3 || g.xi.front() != 0.0) throw DomainError("phase grid must start at 0 with >= 3 samples");
}

struct TailModel {
    double temper_C = 0.0;  // |sigma'| <= C (1 + xi)^{n-1}
    double resid = 0.0;     // max |sigma' - fit| on the fit window
    AsymptoticFit fit;
    bool have_fit = false;
};

TailModel tail_model(const PhaseGrid& g, const HyperbolicDim& dim, int K) {
    TailModel m;
    const int n = dim.n();
    for (std::size_t j = 0; j < g.xi.size(); ++j)
        m.temper_C = std::max(m.temper_C, std::abs(g.dsigma[j]) / std::pow(1.0 + g.xi[j], n - 1));
    if (grid_is_zero(g) || K <= 0) return m;
    m.fit = phase_asymptotics_fit(g, dim, K);
    m.have_fit = true;
    for (std::size_t j = 0; j < g.xi.size(); ++j)
        if (g.xi[j] >= m.fit.window_lo)
            m.resid = std::max(m.resid, std::abs(g.dsigma[j] - poly_eval(m.fit, g.xi[j])));
    return m;
}

// Upper end for Gaussian tails: exp(-xi^2 t) < e^{-150} beyond it.
double gauss_end(double X, double t) { return std::max(X + 1.0, std::sqrt(150.0 / t)); }

struct TailPieces {
    double extension = 0.0;    // int_X^inf fit(xi) e^{-xi^2 t}
    double zero_bound = 0.0;   // int_X^inf C (1+xi)^{n-1} e^{-xi^2 t}
    double ext_bound = 0.0;    // fit uncertainty over the tail
};

TailPieces gaussian_tail(const TailModel& m, int n, double X, double t) {
    TailPieces p;
    const double end = gauss_end(X, t);
    if (end <= X) return p;
    const double panel = std::max(1.0, (end - X) / 64.0);
    p.zero_bound = m.temper_C *
                   integrate_long([&](double x) { return std::pow(1.0 + x, n - 1) * std::exp(-x * x * t); }, X, end,
                                  panel);
    if (!m.have_fit) return p;
    p.extension = integrate_long([&](double x) { return poly_eval(m.fit, x) * std::exp(-x * x * t); }, X, end, panel);
    double b = m.resid * integrate_long([&](double x) { return std::exp(-x * x * t); }, X, end, panel);
    for (std::size_t k = 0; k < m.fit.coef.size(); ++k) {
        const int pw = m.fit.powers[k];
        b += m.fit.stderr_[k] *
             integrate_long([&](double x) { return std::pow(x, pw) * std::exp(-x * x * t); }, X, end, panel);
    }
    p.ext_bound = b;
    return p;
}

}  // namespace

// ---------------------------------------------------------------- invariants

double WaveInvariants::a(int k) const {
    if (k == 1) return a1;
    if (k == 2) return a2;
    throw DomainError("wave invariants are available for k = 1, 2 only");
}

WaveInvariants wave_invariants(const RadialPotential& V, const HyperbolicDim& dim) {
    WaveInvariants w;
    if (V.is_zero()) return w;
    const double n = dim.n();
    const double pref = std::pow(kPi, -0.5 * n);
    w.intV = volume_integral(V, dim, 1);
    w.intV2 = volume_integral(V, dim, 2);
    w.a1 = -0.25 * pref * w.intV;
    w.a2 = pref / 32.0 * ((2.0 * n - n * n) / 6.0 * w.intV + w.intV2);
    return w;
}

// ---------------------------------------------------------------- test functions

TestFunction TestFunction::bspline_pair(double center, double halfwidth, int order) {
    if (order < 2 || order > 20) throw DomainError("B-spline order must lie in [2, 20]");
    if (!(halfwidth > 0.0) || !(center > halfwidth)) throw DomainError("need center > halfwidth > 0");
    const int p = order;
    const double delta = 2.0 * halfwidth / p;
    const double c = center;
    TestFunction f;
    std::ostringstream os;
    os << "bspline(c=" << c << ",h=" << halfwidth << ",p=" << p << ")";
    f.name = os.str();
    f.psi = [=](double t) { return cardinal_bspline((std::abs(t) - c) / delta + 0.5 * p, p) / delta; };
    f.psi_hat = [=](double xi) { return 2.0 * std::cos(c * xi) * std::pow(sinc(0.5 * xi * delta), p); };
    f.laplace = [=](cplx w) { return 2.0 * std::exp(w * c) * std::pow(sinhc(0.5 * w * delta), p); };
    f.cosh_pairing = [=](double a) {
        // cosh(a t) against psi: half the sum of the two one-sided transforms.
        return 0.5 * (f.laplace(cplx(a)) + f.laplace(cplx(-a))).real();
    };
    f.t0 = c - halfwidth;
    f.t1 = c + halfwidth;
    // |sinh z| <= cosh(Re z), so for Re w = -b <= -beta:
    // |laplace(w)| <= 2 e^{-b c} cosh(b delta/2)^p (2 / (|w| delta))^p, decreasing in b since c > p delta/2.
    f.laplace_envelope = [=](double beta, double r) {
        return 2.0 * std::exp(-beta * c) * std::pow(std::cosh(0.5 * beta * delta) * 2.0 / (r * delta), p);
    };
    f.l1_norm = 2.0;
    f.compact = true;
    for (int k = 0; k <= p; ++k) f.knots.push_back(f.t0 + k * delta);
    return f;
}

TestFunction TestFunction::gaussian(double t) {
    if (!(t > 0.0)) throw DomainError("gaussian test function needs t > 0");
    TestFunction f;
    f.name = "gaussian";
    f.psi = [=](double s) { return std::exp(-s * s / (4.0 * t)); };
    f.psi_hat = [=](double xi) { return std::sqrt(4.0 * kPi * t) * std::exp(-xi * xi * t); };
    f.cosh_pairing = [=](double a) { return std::sqrt(4.0 * kPi * t) * std::exp(a * a * t); };
    f.t0 = 0.0;
    f.t1 = std::numeric_limits<double>::infinity();
    f.l1_norm = std::sqrt(4.0 * kPi * t);
    f.compact = false;
    const double end = std::sqrt(4.0 * t * 40.0);
    for (int k = 0; k <= 16; ++k) f.knots.push_back(end * k / 16.0);
    return f;
}

double TestFunction::transform_residual(const std::vector<double>& xis) const {
    double worst = 0.0;
    for (double xi : xis) {
        double q = 0.0;
        for (std::size_t k = 0; k + 1 < knots.size(); ++k)
            q += integrate([&](double t) { return std::cos(xi * t) * psi(t); }, knots[k], knots[k + 1], 1e-13, 1e-12, 12)
                     .value;
        worst = std::max(worst, std::abs(2.0 * q - psi_hat(xi)));
    }
    return worst;
}

// ---------------------------------------------------------------- heat trace

std::vector<double> log_grid(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2) throw DomainError("log_grid needs 0 < lo < hi and count >= 2");
    std::vector<double> t(count);
    for (int i = 0; i < count; ++i) t[i] = lo * std::pow(hi / lo, double(i) / (count - 1));
    return t;
}

namespace {

double phase_gauss_integral(const PhaseGrid& g, double t) {
    std::vector<double> f(g.xi.size());
    for (std::size_t j = 0; j < f.size(); ++j) f[j] = g.dsigma[j] * std::exp(-g.xi[j] * g.xi[j] * t);
    return simpson(g.xi, f);
}

double chosen_bound(const TailPieces& p, bool ext) { return ext ? p.ext_bound : p.zero_bound; }

}  // namespace

HeatCurve heat_trace(const PhaseGrid& grid, const HyperbolicDim& dim, const std::vector<double>& eigenvalues,
                     int m_half, const std::vector<double>& t_values, const HeatOptions& opt) {
    check_grid(grid, dim);
    if (m_half < 0) throw DomainError("m_V(n/2) must be nonnegative");
    const int n = dim.n();
    const double quarter = 0.25 * n * n;
    for (double lam : eigenvalues)
        if (!(lam < quarter)) throw DomainError("eigenvalues must lie below n^2/4");
    const TailModel model = tail_model(grid, dim, opt.fit_terms);
    const double X = grid.xi.back();

    HeatCurve c;
    c.n = n;
    c.half_multiplicity = 0.5 * m_half;
    for (double t : t_values) {
        if (!(t > 0.0)) throw DomainError("heat_trace needs t > 0");
        const TailPieces tp = gaussian_tail(model, n, X, t);
        const double bound = chosen_bound(tp, opt.polynomial_extension);
        if (bound > opt.tail_tolerance) {
            std::ostringstream os;
            os << "heat_trace: Gaussian tail bound " << bound << " exceeds " << opt.tail_tolerance << " at t = " << t
               << "; smallest admissible t ~ " << smallest_admissible_t(grid, dim, opt);
            throw ConvergenceError(os.str());
        }
        double eig = 0.0;
        for (double lam : eigenvalues) eig += std::exp(t * (quarter - lam));
        const double core = phase_gauss_integral(grid, t);
        const double zero_pad = core;
        const double extended = core + tp.extension;
        const double phase = opt.polynomial_extension ? extended : zero_pad;
        c.t.push_back(t);
        c.phase_integral.push_back(phase);
        c.eigencontrib.push_back(eig);
        c.value.push_back(phase + eig + c.half_multiplicity);
        c.value_zero_pad.push_back(zero_pad + eig + c.half_multiplicity);
        c.value_extended.push_back(extended + eig + c.half_multiplicity);
        c.tail_bound.push_back(bound);
    }
    return c;
}

double smallest_admissible_t(const PhaseGrid& grid, const HyperbolicDim& dim, const HeatOptions& opt, double t_lo,
                             double t_hi) {
    const TailModel model = tail_model(grid, dim, opt.fit_terms);
    const double X = grid.xi.back();
    auto ok = [&](double t) {
        return chosen_bound(gaussian_tail(model, dim.n(), X, t), opt.polynomial_extension) <= opt.tail_tolerance;
    };
    if (ok(t_lo)) return t_lo;
    if (!ok(t_hi)) return std::numeric_limits<double>::infinity();
    double lo = std::log(t_lo), hi = std::log(t_hi);
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ok(std::exp(mid)) ? hi : lo) = mid;
    }
    return std::exp(hi);
}

double HeatFit::relative_error(int k) const {
    const double tg = target.at(k - 1);
    return std::abs(coef.at(k - 1) - tg) / std::abs(tg);
}

HeatFit heat_smallt_fit(const HeatCurve& curve, const HyperbolicDim& dim, int K, const WaveInvariants* targets) {
    const std::size_t m = curve.t.size();
    if (K < 1) throw DomainError("heat_smallt_fit needs K >= 1");
    if (m < std::size_t(K) + 2) throw DomainError("heat_smallt_fit needs more samples than terms");
    const auto [tmin, tmax] = std::minmax_element(curve.t.begin(), curve.t.end());
    if (std::log10(*tmax / *tmin) < 1.5 - 1e-12) throw DomainError("heat_smallt_fit needs >= 1.5 decades of t");

    const int n = dim.n();
    HeatFit fit;
    for (int k = 1; k <= K; ++k) {
        fit.exponents.push_back(-0.5 * (n + 1) + k);
        fit.target.push_back(targets && k <= 2 ? targets->a(k) / std::sqrt(kPi)
                                               : std::numeric_limits<double>::quiet_NaN());
    }
    Eigen::MatrixXd A(m, K);
    Eigen::VectorXd b(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (int k = 0; k < K; ++k) A(i, k) = std::pow(4.0 * curve.t[i], fit.exponents[k]);
        b(i) = curve.value[i];
    }
    Eigen::VectorXd scale = A.colwise().norm().transpose();
    for (int k = 0; k < K; ++k)
        if (scale(k) == 0.0) scale(k) = 1.0;
    const Eigen::MatrixXd An = A * scale.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(An, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    fit.condition = sv(0) / sv(K - 1);
    if (!(fit.condition < 1e10)) throw ConvergenceError("heat_smallt_fit: ill-conditioned basis");
    const Eigen::VectorXd xn = svd.solve(b);
    const Eigen::VectorXd res = An * xn - b;
    const double dof = std::max<double>(1.0, double(m) - K);
    const double var = res.squaredNorm() / dof;
    const Eigen::MatrixXd Vm = svd.matrixV();
    for (int k = 0; k < K; ++k) {
        fit.coef.push_back(xn(k) / scale(k));
        double cov = 0.0;
        for (int j = 0; j < K; ++j) cov += Vm(k, j) * Vm(k, j) / (sv(j) * sv(j));
        fit.stderr_.push_back(std::sqrt(var * cov) / scale(k));
    }
    return fit;
}

HeatDecay heat_decay_fit(const HeatCurve& curve, double t_min) {
    std::vector<double> x, y;
    HeatDecay d;
    for (std::size_t i = 0; i < curve.t.size(); ++i) {
        if (curve.t[i] < t_min) continue;
        if (curve.value[i] == 0.0) throw DomainError("heat_decay_fit: zero value in range");
        x.push_back(std::log(curve.t[i]));
        y.push_back(std::log(std::abs(curve.value[i])));
        d.max_ratio = std::max(d.max_ratio, std::abs(curve.value[i]) * std::sqrt(curve.t[i]));
    }
    if (x.size() < 3) throw DomainError("heat_decay_fit needs at least 3 samples above t_min");
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    d.exponent = sxy / sxx;
    d.constant = std::exp(my - d.exponent * mx);
    return d;
}

// ---------------------------------------------------------------- eigenvalue oracle

namespace {

// Eigenvalues (ascending) of the Dirichlet finite-difference operator.
// mode 'V': all below vu; mode 'I': the lowest `count`.
std::vector<double> fd_eigenvalues(const RadialPotential& V, const HyperbolicDim& dim, int l, double r_cap, int mesh,
                                   char mode, double vu, int count) {
    const int n = dim.n();
    const double h = r_cap / mesh;
    const lapack_int N = mesh - 1;
    const double mu = l + 0.5 * (n - 1);
    const double cent = mu * mu - 0.25;
    std::vector<double> d(N), e(std::max<lapack_int>(N - 1, 1), -1.0 / (h * h));
    for (lapack_int i = 0; i < N; ++i) {
        const double r = (i + 1) * h;
        const double sh = std::sinh(r);
        d[i] = 2.0 / (h * h) + 0.25 * n * n + cent / (sh * sh) + V(r);
    }
    std::vector<double> w(N);
    std::vector<lapack_int> iblock(N), isplit(N);
    lapack_int m = 0, nsplit = 0;
    const double vl = -std::numeric_limits<double>::max();
    const lapack_int il = 1, iu = std::max(1, count);
    const lapack_int info = LAPACKE_dstebz(mode, 'E', N, vl, vu, il, iu, 0.0, d.data(), e.data(), &m, &nsplit,
                                           w.data(), iblock.data(), isplit.data());
    if (info != 0) throw ConvergenceError("eigenvalue_oracle: dstebz failed");
    w.resize(m);
    std::sort(w.begin(), w.end());
    return w;
}

std::vector<double> richardson_eigen(const RadialPotential& V, const HyperbolicDim& dim, int l, double r_cap,
                                     int mesh, double cutoff) {
    const std::vector<double> fine = fd_eigenvalues(V, dim, l, r_cap, 2 * mesh, 'V', cutoff, 0);
    if (fine.empty()) return {};
    const std::vector<double> coarse = fd_eigenvalues(V, dim, l, r_cap, mesh, 'I', 0.0, int(fine.size()));
    if (coarse.size() != fine.size()) throw ConvergenceError("eigenvalue_oracle: mesh refinement changed the count");
    std::vector<double> out(fine.size());
    for (std::size_t i = 0; i < fine.size(); ++i) out[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
    return out;
}

}  // namespace

std::vector<double> eigenvalue_oracle(const RadialPotential& V, const HyperbolicDim& dim, int l, double r_cap,
                                      int mesh, const EigenOracleOptions& opt) {
    if (l < 0) throw DomainError("eigenvalue_oracle: l must be >= 0");
    if (mesh < 2000) throw DomainError("eigenvalue_oracle: mesh must be >= 2000");
    if (!(r_cap >= V.support_radius() + 10.0)) throw DomainError("eigenvalue_oracle: r_cap must be >= R + 10");
    const double quarter = 0.25 * dim.n() * dim.n();
    const double cutoff = quarter - opt.margin;
    // Keep the mesh width fixed when the cap moves.
    const double h = r_cap / mesh;
    const int mesh2 = int(std::lround((r_cap + opt.cap_shift) / h));
    std::vector<double> a = richardson_eigen(V, dim, l, r_cap, mesh, cutoff);
    const std::vector<double> b = richardson_eigen(V, dim, l, mesh2 * h, mesh2, cutoff);
    const std::size_t k = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < k; ++i)
        if (std::abs(a[i] - b[i]) > opt.cap_tolerance) {
            std::ostringstream os;
            os << "eigenvalue_oracle: eigenvalue " << a[i] << " moves by " << std::abs(a[i] - b[i])
               << " when r_cap grows by " << opt.cap_shift;
            throw ConvergenceError(os.str());
        }
    if (a.size() != b.size()) {
        // One list has an eigenvalue the other lacks: it must sit in the
        // rejected margin band of the other to be a cap artifact.
        const auto& longer = a.size() > b.size() ? a : b;
        for (std::size_t i = k; i < longer.size(); ++i)
            if (longer[i] < cutoff - opt.cap_tolerance)
                throw ConvergenceError("eigenvalue_oracle: eigenvalue count depends on r_cap");
        a.resize(k);
    }
    a.erase(std::remove_if(a.begin(), a.end(), [&](double x) { return !(x < cutoff); }), a.end());
    return a;
}

std::vector<double> bound_state_eigenvalues(const RadialPotential& V, const HyperbolicDim& dim, double r_cap,
                                            int mesh, const EigenOracleOptions& opt) {
    std::vector<double> all;
    for (int l = 0;; ++l) {
        const std::vector<double> ev = eigenvalue_oracle(V, dim, l, r_cap, mesh, opt);
        if (ev.empty()) break;
        const long long m = harmonic_multiplicity(dim.n(), l);
        for (double e : ev) all.insert(all.end(), std::size_t(m), e);
    }
    std::sort(all.begin(), all.end());
    return all;
}

// ---------------------------------------------------------------- pairings

double phase_pairing(const PhaseGrid& grid, const AsymptoticFit* fit, const std::function<double(double)>& w,
                     double xi_end) {
    std::vector<double> f(grid.xi.size());
    for (std::size_t j = 0; j < f.size(); ++j) f[j] = grid.dsigma[j] * w(grid.xi[j]);
    double total = simpson(grid.xi, f);
    const double X = grid.xi.back();
    if (fit && xi_end > X)
        total += integrate_long([&](double x) { return poly_eval(*fit, x) * w(x); }, X, xi_end, 1.0);
    return total;
}

namespace {

// Upper integration end for the polynomial extension against psi_hat.
double psi_hat_end(const TestFunction& psi, double X) {
    if (!psi.compact) return X;
    // Largest of X and the point where |psi_hat| stays below 1e-13 relative
    // to its value at the origin, found on a doubling scan.
    double end = std::max(X, 1.0);
    const double ref = std::abs(psi.psi_hat(0.0));
    auto small_after = [&](double x) {
        for (int k = 0; k < 64; ++k)
            if (std::abs(psi.psi_hat(x * (1.0 + k / 64.0))) > 1e-13 * ref) return false;
        return true;
    };
    while (!small_after(end) && end < 1e5) end *= 1.5;
    return end;
}

}  // namespace

double theta_reconstruction(const PhaseGrid& grid, const HyperbolicDim& dim, const std::vector<double>& eigenvalues,
                            int m_half, const TestFunction& psi, int fit_terms) {
    check_grid(grid, dim);
    const double quarter = 0.25 * dim.n() * dim.n();
    double total = 0.0;
    if (!grid_is_zero(grid)) {
        const TailModel model = tail_model(grid, dim, fit_terms);
        const double X = grid.xi.back();
        double end = psi_hat_end(psi, X);
        if (!psi.compact) end = gauss_end(X, -std::log(std::abs(psi.psi_hat(1.0) / psi.psi_hat(0.0))));
        // sigma' and psi_hat are even: half the line integral is the half-line one.
        total += phase_pairing(grid, model.have_fit ? &model.fit : nullptr, psi.psi_hat, end);
    }
    for (double lam : eigenvalues) {
        if (!(lam < quarter)) throw DomainError("eigenvalues must lie below n^2/4");
        total += psi.cosh_pairing(std::sqrt(quarter - lam));
    }
    total += 0.5 * m_half * psi.psi_hat(0.0);
    return total;
}

double u0_pairing(const HyperbolicDim& dim, const TestFunction& psi) {
    const int n = dim.n();
    if (n % 2 == 0) return 0.0;
    if (!(psi.t0 > 0.0)) throw DomainError("u0 pairing needs psi vanishing near t = 0");
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < psi.knots.size(); ++k)
        total += integrate(
                     [&](double t) {
                         return std::cosh(0.5 * t) / std::pow(2.0 * std::sinh(0.5 * t), n + 1) * psi.psi(t);
                     },
                     psi.knots[k], psi.knots[k + 1], 1e-13, 1e-12, 12)
                     .value;
    return 2.0 * total;
}

PoissonResult poisson_pairing(const PhaseGrid& grid, const HyperbolicDim& dim, const std::vector<double>& eigenvalues,
                              int m_half, const ResonanceList& resonances, const TestFunction& psi, double r_max,
                              const PoissonOptions& opt) {
    if (!psi.compact || !psi.laplace || !(psi.t0 > 0.0))
        throw DomainError("poisson_pairing needs psi compactly supported away from t = 0");
    if (resonances.n != dim.n()) throw DomainError("resonance list dimension does not match");
    const int n = dim.n();
    const cplx center(0.5 * n, 0.0);
    if (!resonances.complete) throw DomainError("poisson_pairing needs a complete resonance list");
    if (!(r_max > 0.0) || r_max > resonances.region.inscribed_radius(center) + 1e-12)
        throw DomainError("poisson_pairing: r_max exceeds the searched disk");

    PoissonResult out;
    out.r_max = r_max;
    out.lhs = theta_reconstruction(grid, dim, eigenvalues, m_half, psi, opt.fit_terms);

    double sum = 0.0;
    double depth = std::numeric_limits<double>::infinity();
    for (const auto& e : resonances.entries) {
        const double r = std::abs(e.zeta - center);
        if (r > r_max) continue;
        sum += double(e.multiplicity()) * psi.laplace(e.zeta - center).real();
        out.resonances_used += e.multiplicity();
        if (r >= 0.5 * r_max && !e.eigenvalue) depth = std::min(depth, 0.5 * n - e.zeta.real());
    }
    out.u0_pairing = u0_pairing(dim, psi);
    out.rhs = 0.5 * sum - out.u0_pairing;

    // Tail: resonances outside the disk all have Re zeta < n/2. Their count
    // obeys N(r) <= C r^{n+1} with C fitted on the searched disk, and their
    // depth Re(n/2 - zeta) is assumed no smaller than the least depth seen on
    // the outer half of the disk. Summation by parts against the envelope of
    // |laplace| gives the bound below.
    if (out.resonances_used > 0 || n % 2 == 1) {
        out.growth_constant = counting_growth_constant(resonances, 0.5 * r_max, r_max);
        out.depth = std::isfinite(depth) ? std::max(depth, 0.0) : 0.0;
        const double beta = out.depth;
        const double C = out.growth_constant;
        const auto env = [&](double r) { return psi.laplace_envelope(beta, r); };
        // 1/2 int_{r_max}^inf C r^{n+1} (-env'(r)) dr on a geometric grid.
        double tail = 0.0;
        double r = r_max;
        for (int it = 0; it < 4000; ++it) {
            const double r2 = r * 1.02;
            const double mid = std::sqrt(r * r2);
            tail += C * std::pow(mid, n + 1) * (env(r) - env(r2));
            r = r2;
            if (C * std::pow(r, n + 1) * env(r) < 1e-16 * std::max(1.0, tail)) break;
        }
        if (C * std::pow(r, n + 1) * env(r) >= 1e-16 * std::max(1.0, tail))
            tail = std::numeric_limits<double>::infinity();  // envelope decays too slowly for the growth
        out.tail_bound = 0.5 * tail * 1.02;  // mid-point slack of the geometric grid
    }
    if (out.tail_bound > opt.max_tail) {
        std::ostringstream os;
        os << "poisson_pairing: tail bound " << out.tail_bound << " exceeds " << opt.max_tail << "; enlarge r_max";
        throw ConvergenceError(os.str());
    }
    return out;
}

}  // namespace hyperres
