#include "hyperres/scattering.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hyperres/error.hpp"
#include "hyperres/parallel.hpp"

namespace hyperres {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Principal representative of x modulo 2 pi in (-pi, pi].
double wrap(double x) { return std::remainder(x, kTwoPi); }

cplx critical_point(const HyperbolicDim& dim, double xi) { return cplx(0.5 * dim.n(), xi); }

}  // namespace

int channel_cutoff(const RadialPotential& V, const HyperbolicDim& dim, cplx s, double barrier_factor) {
    if (V.is_zero()) return 0;
    const int n = dim.n();
    const double sh = std::sinh(V.support_radius());
    const double target = barrier_factor * (std::abs(s * (double(n) - s)) + V.max_abs()) * sh * sh;
    // Solve l(l + n - 1) >= target for the smallest integer l.
    const double b = n - 1.0;
    int l = static_cast<int>(std::ceil(0.5 * (-b + std::sqrt(b * b + 4.0 * target))));
    l = std::max(l, 0);
    while (l > 0 && double(l - 1) * (l - 1 + n - 1) >= target) --l;
    while (double(l) * (l + n - 1) < target) ++l;
    return l;
}

DeterminantValue relative_determinant(cplx s, const RadialPotential& V, const HyperbolicDim& dim, int L_max,
                                      const ScatteringOptions& opt) {
    DeterminantValue out{1.0, 0.0, 0};
    if (V.is_zero()) return out;
    const bool automatic = L_max < 0;
    int L = automatic ? channel_cutoff(V, dim, s, opt.barrier_factor) : L_max;
    std::vector<cplx> logs;
    auto extend = [&](int upto) {
        const std::size_t first = logs.size();
        logs.resize(upto + 2);
        parallel_for(logs.size() - first, opt.threads, [&](std::size_t i) {
            const Sector sec(dim, int(first + i));
            const ChannelLogJost lj = channel_log_jost(sec, s, V, opt.radial, false);
            logs[first + i] = double(sec.multiplicity) * (lj.log_J_reflected - lj.log_J);
        });
    };
    // Only the class modulo 2 pi i matters for the tail; take the smallest
    // representative of the first omitted factor.
    auto tail_of = [&](int l) { return 2.0 * std::hypot(logs[l + 1].real(), wrap(logs[l + 1].imag())); };
    extend(L);
    // The barrier rule is a starting point; in automatic mode channels are
    // added until the tail is below tolerance.
    const int L_cap = L + 200;
    while (automatic && tail_of(L) > opt.tail_tolerance && L < L_cap) {
        const int next = std::min(L_cap, L + std::max(4, L / 4));
        extend(next);
        while (L < next && tail_of(L) > opt.tail_tolerance) ++L;
    }
    cplx total = 0.0;
    for (int l = 0; l <= L; ++l) total += logs[l];
    out.tail_bound = tail_of(L);
    out.L_max = L;
    out.value = std::exp(total);
    if (out.tail_bound > opt.tail_tolerance) {
        std::ostringstream os;
        os << "relative_determinant: truncation tail " << out.tail_bound << " exceeds " << opt.tail_tolerance
           << " at s = " << s << " with L_max = " << L;
        throw ConvergenceError(os.str());
    }
    return out;
}

cplx relative_determinant_at_center(const RadialPotential& V, const HyperbolicDim& dim, int L_max,
                                    const ScatteringOptions& opt) {
    if (V.is_zero()) return 1.0;
    // On the line tau(n/2 + i xi) = tau(n/2) exp(-2 pi i sigma(xi)) with sigma
    // odd, so Re tau is even in xi: extrapolate it in xi^2 (Neville, three
    // samples). The imaginary part tends to 0.
    constexpr double h = 0.01;
    const double x[3] = {h * h, h * h / 4, h * h / 16};
    double y[3];
    for (int i = 0; i < 3; ++i)
        y[i] = relative_determinant(critical_point(dim, std::sqrt(x[i])), V, dim, L_max, opt).value.real();
    for (int m = 1; m < 3; ++m)
        for (int i = 0; i + m < 3; ++i) y[i] = (x[i + m] * y[i] - x[i] * y[i + 1]) / (x[i + m] - x[i]);
    return y[0];
}

std::vector<double> default_xi_grid(double xi_max, double dense_step, double dense_until, double step) {
    if (!(xi_max > 0.0) || !(dense_step > 0.0) || !(step > 0.0))
        throw DomainError("default_xi_grid: xi_max and steps must be positive");
    std::vector<double> g;
    const double knee = std::min(dense_until, xi_max);
    const int nd = std::max(1, int(std::lround(knee / dense_step)));
    for (int i = 0; i < nd; ++i) g.push_back(knee * i / nd);
    const int nc = std::max(1, int(std::ceil((xi_max - knee) / step - 1e-9)));
    if (xi_max > knee)
        for (int i = 0; i < nc; ++i) g.push_back(knee + (xi_max - knee) * i / nc);
    g.push_back(xi_max);
    return g;
}

PhaseGrid scattering_phase(const RadialPotential& V, const HyperbolicDim& dim, const std::vector<double>& xi_grid,
                           int L_max, const ScatteringOptions& opt) {
    const std::size_t N = xi_grid.size();
    if (N == 0) throw DomainError("scattering_phase: empty grid");
    for (std::size_t j = 0; j < N; ++j) {
        if (!std::isfinite(xi_grid[j]) || xi_grid[j] < 0.0) throw DomainError("scattering_phase: xi must be >= 0");
        if (j > 0 && !(xi_grid[j] > xi_grid[j - 1])) throw DomainError("scattering_phase: grid must increase");
    }
    PhaseGrid g;
    g.n = dim.n();
    g.xi = xi_grid;
    g.sigma.assign(N, 0.0);
    g.dsigma.assign(N, 0.0);
    g.branch_offsets.assign(N, 0);
    g.tail_estimate.assign(N, 0.0);
    if (V.is_zero()) return g;

    // Channels active at each sample. With an automatic cutoff, channels
    // beyond the local barrier cutoff are skipped; their contribution is what
    // the tail estimate measures.
    const bool automatic = L_max < 0;
    std::vector<int> active(N);
    for (std::size_t j = 0; j < N; ++j)
        active[j] = automatic ? channel_cutoff(V, dim, critical_point(dim, xi_grid[j]), opt.barrier_factor) : L_max;
    for (std::size_t j = 1; j < N; ++j) active[j] = std::max(active[j], active[j - 1]);
    const int L = active.back();
    g.L_max = L;

    // Work items: (l, j) for l <= active[j] with derivative, plus the first
    // omitted channel at each j and every channel at xi = 0 for the anchor.
    struct Item {
        int l;
        std::size_t j;
        bool deriv;
    };
    std::vector<Item> items;
    for (std::size_t j = 0; j < N; ++j) {
        for (int l = 0; l <= active[j]; ++l) items.push_back({l, j, true});
        items.push_back({active[j] + 1, j, false});
    }
    const std::size_t anchor_base = items.size();
    for (int l = 0; l <= L + 1; ++l) items.push_back({l, N, false});
    std::vector<ChannelLogJost> res(items.size());
    parallel_for(items.size(), opt.threads, [&](std::size_t i) {
        const Item& it = items[i];
        const double xi = it.j < N ? xi_grid[it.j] : 0.0;
        res[i] = channel_log_jost(Sector(dim, it.l), critical_point(dim, xi), V, opt.radial, it.deriv);
    });

    // theta_l(xi) - theta_l(0) unwrapped per channel, then summed with weights.
    std::vector<double> anchor(L + 2);
    for (int l = 0; l <= L + 1; ++l) anchor[l] = res[anchor_base + l].log_J.imag();
    std::vector<double> prev_theta(L + 1, 0.0), prev_d(L + 1, 0.0);
    std::vector<bool> started(L + 1, false);
    std::size_t cursor = 0;
    for (std::size_t j = 0; j < N; ++j) {
        double sig = 0.0, dsig = 0.0;
        for (int l = 0; l <= active[j]; ++l, ++cursor) {
            const ChannelLogJost& r = res[cursor];
            const double d = r.dlog_J.real();
            double theta;
            if (!started[l]) {
                // Entering channels carry a phase below the tail level, so the
                // principal offset from the anchor is the continuous one.
                theta = wrap(r.log_J.imag() - anchor[l]);
                started[l] = true;
            } else {
                const double pred = prev_theta[l] + 0.5 * (xi_grid[j] - xi_grid[j - 1]) * (prev_d[l] + d);
                const double raw = r.log_J.imag() - anchor[l];
                theta = raw + kTwoPi * std::round((pred - raw) / kTwoPi);
                if (std::abs(theta - pred) > 0.5 * kPi) {
                    std::ostringstream os;
                    os << "scattering_phase: channel l = " << l << " phase is ambiguous on [" << xi_grid[j - 1]
                       << ", " << xi_grid[j] << "]; refine the grid";
                    throw ConvergenceError(os.str());
                }
            }
            prev_theta[l] = theta;
            prev_d[l] = d;
            const double m = double(Sector(dim, l).multiplicity);
            sig += m * theta;
            dsig += m * d;
        }
        const ChannelLogJost& t = res[cursor++];
        const int lt = active[j] + 1;
        g.tail_estimate[j] = 2.0 * double(Sector(dim, lt).multiplicity) *
                             std::abs(wrap(t.log_J.imag() - anchor[lt])) / kPi;
        g.sigma[j] = sig / kPi;
        g.dsigma[j] = dsig / kPi;
        if (j > 0 && kTwoPi * std::abs(g.sigma[j] - g.sigma[j - 1]) >= 0.5 * kPi) {
            std::ostringstream os;
            os << "scattering_phase: arg tau jumps by " << kTwoPi * std::abs(g.sigma[j] - g.sigma[j - 1])
               << " on [" << xi_grid[j - 1] << ", " << xi_grid[j] << "]; refine the grid";
            throw ConvergenceError(os.str());
        }
        // arg tau(n/2 + i xi) - arg tau(n/2) = -2 pi sigma.
        const double phi = -kTwoPi * g.sigma[j];
        g.branch_offsets[j] = std::llround((phi - wrap(phi)) / kTwoPi);
    }
    return g;
}

double phase_coefficient_target(int k, double a_k, const HyperbolicDim& dim) {
    const double g = 0.5 * (dim.n() + 1) - k;
    if (g <= 0.0 && g == std::floor(g)) return 0.0;
    return std::pow(2.0, -dim.n() + 2 * k) * a_k / (std::sqrt(kPi) * std::tgamma(g));
}

AsymptoticFit phase_asymptotics_fit(const PhaseGrid& grid, const HyperbolicDim& dim, int K, bool include_leading) {
    if (K < 1) throw DomainError("phase_asymptotics_fit: K must be >= 1");
    if (grid.xi.empty()) throw DomainError("phase_asymptotics_fit: empty grid");
    const int n = dim.n();
    AsymptoticFit fit;
    fit.window_hi = grid.xi.back();
    fit.window_lo = 0.5 * fit.window_hi;
    if (include_leading) fit.powers.push_back(n - 1);
    for (int k = 1; k <= K; ++k) fit.powers.push_back(n - 2 * k);
    const int p = int(fit.powers.size());

    std::vector<std::size_t> rows;
    for (std::size_t j = 0; j < grid.xi.size(); ++j)
        if (grid.xi[j] >= fit.window_lo && grid.xi[j] > 0.0) rows.push_back(j);
    if (int(rows.size()) <= p + 2)
        throw ConvergenceError("phase_asymptotics_fit: too few samples in the window for the requested basis");

    const Eigen::Index m = Eigen::Index(rows.size());
    Eigen::MatrixXd A(m, p);
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double x = grid.xi[rows[i]];
        for (int c = 0; c < p; ++c) A(i, c) = std::pow(x, fit.powers[c]);
        b(i) = grid.dsigma[rows[i]];
    }
    // Normalized columns keep the conditioning meaningful across powers.
    Eigen::VectorXd scale(p);
    for (int c = 0; c < p; ++c) {
        scale(c) = A.col(c).norm();
        A.col(c) /= scale(c);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    fit.condition = sv(0) / sv(p - 1);
    if (!(fit.condition < 1e10)) {
        std::ostringstream os;
        os << "phase_asymptotics_fit: basis is ill-conditioned on the window (condition " << fit.condition << ")";
        throw ConvergenceError(os.str());
    }
    const Eigen::VectorXd y = svd.solve(b);
    const double rss = (A * y - b).squaredNorm();
    const double var = rss / double(m - p);
    const Eigen::MatrixXd V = svd.matrixV();
    Eigen::VectorXd inv2 = sv.array().square().inverse();
    const Eigen::MatrixXd cov = var * V * inv2.asDiagonal() * V.transpose();

    int offset = 0;
    if (include_leading) {
        fit.has_leading = true;
        fit.leading = y(0) / scale(0);
        fit.leading_stderr = std::sqrt(cov(0, 0)) / scale(0);
        offset = 1;
    }
    for (int c = offset; c < p; ++c) {
        const double v = y(c) / scale(c);
        const double e = std::sqrt(cov(c, c)) / scale(c);
        fit.coef.push_back(v);
        fit.stderr_.push_back(e);
        fit.resolvable.push_back(std::abs(v) > 2.0 * e);
    }
    fit.powers.erase(fit.powers.begin(), fit.powers.begin() + offset);
    return fit;
}

LevinsonEstimate levinson_constant(const PhaseGrid& grid, const HyperbolicDim& dim, const std::vector<double>& c,
                                   double max_drift) {
    if (grid.xi.empty()) throw DomainError("levinson_constant: empty grid");
    const int n = dim.n();
    const double hi = grid.xi.back(), lo = 0.5 * hi, mid = 0.75 * hi;
    double s1 = 0.0, s2 = 0.0;
    int c1 = 0, c2 = 0;
    for (std::size_t j = 0; j < grid.xi.size(); ++j) {
        const double x = grid.xi[j];
        if (x < lo) continue;
        double rem = grid.sigma[j];
        for (int k = 1; k <= int(c.size()); ++k) {
            const int e = n - 2 * k + 1;
            if (e != 0) rem -= c[k - 1] * std::pow(x, e) / e;
        }
        if (x < mid) {
            s1 += rem;
            ++c1;
        } else {
            s2 += rem;
            ++c2;
        }
    }
    if (c1 == 0 || c2 == 0) throw ConvergenceError("levinson_constant: window holds too few samples");
    LevinsonEstimate out;
    out.value = (s1 + s2) / (c1 + c2);
    out.drift = std::abs(s2 / c2 - s1 / c1);
    if (out.drift > max_drift) {
        std::ostringstream os;
        os << "levinson_constant: windowed limit drifts by " << out.drift << " (limit " << max_drift << ")";
        throw ConvergenceError(os.str());
    }
    return out;
}

}  // namespace hyperres
