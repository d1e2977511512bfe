#include "hyperres/resonances.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "hyperres/error.hpp"
#include "hyperres/parallel.hpp"

namespace hyperres {

void SearchRegion::validate() const {
    if (!(re_lo < re_hi) || !(im_lo < im_hi) || !std::isfinite(re_lo) || !std::isfinite(re_hi) ||
        !std::isfinite(im_lo) || !std::isfinite(im_hi))
        throw DomainError("SearchRegion: need finite re_lo < re_hi and im_lo < im_hi");
    for (const Disk& d : exclusions)
        if (!(d.radius > 0.0)) throw DomainError("SearchRegion: exclusion radius must be > 0");
}

bool SearchRegion::contains(cplx s) const {
    return s.real() >= re_lo && s.real() <= re_hi && s.imag() >= im_lo && s.imag() <= im_hi;
}

double SearchRegion::inscribed_radius(cplx c) const {
    if (!contains(c)) return 0.0;
    return std::min({c.real() - re_lo, re_hi - c.real(), c.imag() - im_lo, im_hi - c.imag()});
}

namespace {

constexpr double kPi = std::numbers::pi;

struct Trace {
    double arg = 0.0;            // total change of arg D along the path
    double min_distance = 1e300;  // smallest |D| / |D'| estimate along the path
    bool degenerate = false;      // D vanished on the path or refinement bottomed out
    std::vector<double> abs_values;
};

struct Rect {
    double x0, x1, y0, y1;
    double diameter() const { return std::hypot(x1 - x0, y1 - y0); }
    cplx center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
    bool contains(cplx s, double pad) const {
        const double px = pad * (x1 - x0), py = pad * (y1 - y0);
        return s.real() >= x0 - px && s.real() <= x1 + px && s.imag() >= y0 - py && s.imag() <= y1 + py;
    }
};

struct Winding {
    int count = 0;
    bool near = false;  // a zero sits within the standoff of the contour
    double median_abs = 0.0;
};

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
}

// Root search for one channel. Evaluations of D_l are cached by exact s so
// that edges shared between neighbouring cells are sampled once.
class ChannelSearch {
public:
    ChannelSearch(const Sector& sec, const RadialPotential& V, const ResonanceOptions& opt)
        : sec_(sec), V_(V), opt_(opt), rng_(opt.seed ^ (0x9e3779b97f4a7c15ULL * (sec.l + 1))) {}

    cplx D(cplx s) {
        const auto key = std::make_pair(s.real(), s.imag());
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        if (++evals_ > opt_.eval_budget) {
            std::ostringstream os;
            os << "resonance search: evaluation budget " << opt_.eval_budget << " exceeded in channel l = " << sec_.l;
            throw ConvergenceError(os.str());
        }
        const cplx v = jost_function(sec_, s, V_, opt_.radial);
        cache_.emplace(key, v);
        return v;
    }

    // Adaptive trace of the straight segment a -> b. Sampling is done from
    // the lexicographically smaller endpoint so both traversal directions hit
    // the same cached points.
    Trace segment(cplx a, cplx b) {
        const bool flip = std::make_pair(b.real(), b.imag()) < std::make_pair(a.real(), a.imag());
        if (flip) std::swap(a, b);
        const int n0 = std::max(4, int(std::ceil(std::abs(b - a) / opt_.max_sample_step)));
        std::vector<cplx> z, d;
        for (int i = 0; i <= n0; ++i) {
            z.push_back(i == n0 ? b : a + (b - a) * (double(i) / n0));
            d.push_back(D(z.back()));
        }
        Trace t = refine([&](double u) { return u >= 1.0 ? b : a + (b - a) * u; }, n0, d);
        if (flip) t.arg = -t.arg;
        return t;
    }

    // Adaptive trace of the full circle |s - c| = rho, counterclockwise.
    Trace circle(cplx c, double rho) {
        const int n0 = std::max(16, int(std::ceil(2.0 * kPi * rho / opt_.max_sample_step)));
        auto path = [&](double u) { return c + std::polar(rho, 2.0 * kPi * u); };
        std::vector<cplx> d;
        for (int i = 0; i <= n0; ++i) d.push_back(i == n0 ? d.front() : D(path(double(i) / n0)));
        return refine(path, n0, d);
    }

    Winding rect_winding(const Rect& r, double standoff) {
        const cplx p[4] = {{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}};
        Winding w;
        double total = 0.0;
        std::vector<double> abs_all;
        for (int k = 0; k < 4; ++k) {
            const Trace t = segment(p[k], p[(k + 1) % 4]);
            total += t.arg;
            w.near = w.near || t.degenerate || t.min_distance < standoff;
            abs_all.insert(abs_all.end(), t.abs_values.begin(), t.abs_values.end());
        }
        w.count = to_count(total);
        w.median_abs = median(std::move(abs_all));
        return w;
    }

    Winding circle_winding(cplx c, double rho, double standoff) {
        const Trace t = circle(c, rho);
        Winding w;
        w.count = to_count(t.arg);
        w.near = t.degenerate || t.min_distance < standoff;
        w.median_abs = median(t.abs_values);
        return w;
    }

    double jitter() { return std::uniform_real_distribution<double>(-1.0, 1.0)(rng_); }

    // Newton from `start` with the analytic s-derivative. Returns false when
    // the iterate leaves the (padded) cell or the step never settles.
    bool newton(cplx start, const Rect& cell, double scale, ResonanceEntry& e, const RadialOptions& ropt) {
        cplx s = start, best = start;
        double best_abs = 1e300, last_step = 1e300;
        bool settled = false;
        for (int it = 0; it < 60; ++it) {
            const JostFunctionValue f = jost_function_with_derivative(sec_, s, V_, ropt);
            if (std::abs(f.value) < best_abs) {
                best_abs = std::abs(f.value);
                best = s;
            }
            if (f.value == 0.0) {
                settled = true;
                break;
            }
            if (f.ds == 0.0) return false;
            const cplx step = f.value / f.ds;
            s -= step;
            if (!cell.contains(s, 0.25)) return false;
            last_step = std::abs(step);
            if (last_step < 1e-10 * std::max(1.0, std::abs(s))) {
                settled = true;
                break;
            }
        }
        if (!settled && last_step > 1e-6 * std::max(1.0, std::abs(best))) return false;
        const double fin = std::abs(jost_function(sec_, s, V_, ropt));
        if (fin > best_abs) s = best;
        e.zeta = s;
        e.residual = std::min(fin, best_abs) / std::max(scale, 1e-300);
        e.strict = settled && e.residual < 1e-9;
        return true;
    }

    std::vector<ResonanceEntry> roots;

private:
    template <class Path>
    Trace refine(Path&& path, int n0, const std::vector<cplx>& d0) {
        Trace t;
        struct Node {
            double u;
            cplx z, d;
        };
        std::vector<Node> done;
        for (int i = 0; i < n0; ++i) {
            // Depth-first bisection of [u_i, u_{i+1}].
            std::vector<std::pair<Node, Node>> stack;
            const double ua = double(i) / n0, ub = double(i + 1) / n0;
            stack.push_back({{ua, path(ua), d0[i]}, {ub, path(ub), d0[i + 1]}});
            while (!stack.empty()) {
                auto [a, b] = stack.back();
                stack.pop_back();
                if (a.d == 0.0 || b.d == 0.0) {
                    t.degenerate = true;
                    done.push_back(a);
                    continue;
                }
                const double step = std::arg(b.d / a.d);
                if (std::abs(step) < 0.5 * kPi) {
                    t.arg += step;
                    done.push_back(a);
                    continue;
                }
                if (b.u - a.u < 1e-12) {
                    t.degenerate = true;
                    t.arg += step;
                    done.push_back(a);
                    continue;
                }
                const double um = 0.5 * (a.u + b.u);
                const cplx zm = path(um);
                const Node m{um, zm, D(zm)};
                stack.push_back({m, b});
                stack.push_back({a, m});
            }
        }
        done.push_back({1.0, path(1.0), d0[n0]});
        for (std::size_t i = 0; i + 1 < done.size(); ++i) {
            const double h = std::abs(done[i + 1].z - done[i].z);
            const double slope = std::abs(done[i + 1].d - done[i].d) / std::max(h, 1e-300);
            const double a0 = std::abs(done[i].d), a1 = std::abs(done[i + 1].d);
            if (slope > 0.0) t.min_distance = std::min(t.min_distance, std::min(a0, a1) / slope);
            t.abs_values.push_back(a0);
        }
        return t;
    }

    int to_count(double total_arg) const {
        const double w = total_arg / (2.0 * kPi);
        const double k = std::round(w);
        if (std::abs(w - k) > 1e-6) {
            std::ostringstream os;
            os << "argument principle: non-integer winding " << w << " in channel l = " << sec_.l;
            throw InconsistencyError(os.str());
        }
        return int(k);
    }

    const Sector& sec_;
    const RadialPotential& V_;
    const ResonanceOptions& opt_;
    std::mt19937_64 rng_;
    std::map<std::pair<double, double>, cplx> cache_;
    long long evals_ = 0;
};

double match_radius(const RadialPotential& V, const RadialOptions& ro) {
    return ro.r_match > 0.0 ? ro.r_match : std::max(V.support_radius(), 1.0);
}

// Winding of D_l on the region boundary, with outward/inward jitter of the
// edges when a zero sits on it.
Winding region_winding(ChannelSearch& cs, const SearchRegion& region, const ResonanceOptions& opt, Rect& used) {
    Rect r{region.re_lo, region.re_hi, region.im_lo, region.im_hi};
    for (int attempt = 0; attempt <= opt.jitter_retries; ++attempt) {
        const double standoff = opt.standoff_fraction * r.diameter();
        const Winding w = cs.rect_winding(r, standoff);
        if (!w.near) {
            used = r;
            return w;
        }
        const double amp = 10.0 * opt.standoff_fraction * Rect{region.re_lo, region.re_hi, region.im_lo,
                                                               region.im_hi}.diameter();
        r = {region.re_lo + amp * cs.jitter(), region.re_hi + amp * cs.jitter(), region.im_lo + amp * cs.jitter(),
             region.im_hi + amp * cs.jitter()};
    }
    throw ConvergenceError("argument principle: a zero lies on the search boundary after all jitter retries");
}

void finish_entry(ResonanceEntry& e, const Sector& sec) {
    const double n = sec.dim.n();
    e.l = sec.l;
    e.m_l = sec.multiplicity;
    if (std::abs(e.zeta.imag()) < 1e-9 * std::max(1.0, std::abs(e.zeta.real()))) e.zeta = e.zeta.real();
    e.eigenvalue = e.zeta.imag() == 0.0 && e.zeta.real() > 0.5 * n;
    e.lambda = e.eigenvalue ? e.zeta.real() * (n - e.zeta.real()) : 0.0;
}

// Recursive subdivision of a cell holding `count` zeros.
void search_cell(ChannelSearch& cs, const Rect& cell, const Winding& w, const ResonanceOptions& opt) {
    if (w.count == 0) return;
    if (w.count < 0) throw InconsistencyError("argument principle: negative zero count (D_l has a pole?)");
    const double diam = cell.diameter();

    auto try_root = [&](int order) {
        ResonanceEntry e;
        if (!cs.newton(cell.center(), cell, w.median_abs, e, opt.radial)) return false;
        if (!cell.contains(e.zeta, 1e-9)) return false;
        const double side = std::min(cell.x1 - cell.x0, cell.y1 - cell.y0);
        const double rho = order == 1 ? std::min(0.25 * side, 1e-2) : std::max(diam, 1e-8);
        const Winding v = cs.circle_winding(e.zeta, rho, 0.0);
        if (v.count != order) return false;
        e.order = order;
        cs.roots.push_back(e);
        return true;
    };
    if (w.count == 1 && try_root(1)) return;
    if (diam < opt.min_cell) {
        if (try_root(w.count)) return;
        throw ConvergenceError("resonance search: could not isolate or polish a zero in a minimal cell");
    }

    const bool vertical = (cell.x1 - cell.x0) >= (cell.y1 - cell.y0);
    for (int attempt = 0; attempt <= opt.jitter_retries; ++attempt) {
        const double frac = 0.5 + (attempt == 0 ? 0.05 : 0.2) * cs.jitter();
        Rect a = cell, b = cell;
        if (vertical) {
            const double x = cell.x0 + frac * (cell.x1 - cell.x0);
            a.x1 = x;
            b.x0 = x;
        } else {
            const double y = cell.y0 + frac * (cell.y1 - cell.y0);
            a.y1 = y;
            b.y0 = y;
        }
        const Winding wa = cs.rect_winding(a, opt.standoff_fraction * a.diameter());
        const Winding wb = cs.rect_winding(b, opt.standoff_fraction * b.diameter());
        if (wa.near || wb.near || wa.count + wb.count != w.count) continue;
        search_cell(cs, a, wa, opt);
        search_cell(cs, b, wb, opt);
        return;
    }
    throw ConvergenceError("resonance search: subdivision lines keep meeting zeros after all jitter retries");
}

int auto_channel_limit(const HyperbolicDim& dim, const RadialPotential& V, const SearchRegion& region,
                       const RadialOptions& ro) {
    double far = 0.0;
    for (double x : {region.re_lo, region.re_hi})
        for (double y : {region.im_lo, region.im_hi}) {
            const cplx s(x, y);
            far = std::max(far, std::abs(s * (double(dim.n()) - s)));
        }
    const double sh = std::sinh(match_radius(V, ro));
    const double target = 4.0 * (far + V.max_abs()) * sh * sh;
    int l = 0;
    while (double(l) * (l + dim.n() - 1) < target) ++l;
    return l;
}

}  // namespace

int count_zeros(const Sector& sector, const SearchRegion& region, const RadialPotential& V,
                const ResonanceOptions& opt) {
    region.validate();
    ChannelSearch cs(sector, V, opt);
    Rect used{};
    int count = region_winding(cs, region, opt, used).count;
    for (const Disk& d : region.exclusions) {
        if (!region.contains(d.center) || region.inscribed_radius(d.center) < d.radius) continue;
        const Winding w = cs.circle_winding(d.center, d.radius, opt.standoff_fraction * 2.0 * d.radius);
        if (w.near) throw ConvergenceError("count_zeros: a zero lies on an exclusion circle");
        count -= w.count;
    }
    return count;
}

ResonanceList find_resonances(const HyperbolicDim& dim, const RadialPotential& V, const SearchRegion& region,
                              int L_max, const ResonanceOptions& opt) {
    region.validate();
    ResonanceList out;
    out.n = dim.n();
    out.region = region;
    out.L_max = L_max >= 0 ? L_max : auto_channel_limit(dim, V, region, opt.radial);
    out.channel_counts.assign(out.L_max + 1, 0);

    std::vector<std::vector<ResonanceEntry>> per(out.L_max + 1);
    parallel_for(per.size(), opt.threads, [&](std::size_t l) {
        const Sector sec(dim, int(l));
        ChannelSearch cs(sec, V, opt);
        Rect used{};
        const Winding w = region_winding(cs, region, opt, used);
        out.channel_counts[l] = w.count;
        search_cell(cs, used, w, opt);
        RadialOptions shifted = opt.radial;
        shifted.r_match = match_radius(V, opt.radial) + 0.25;
        for (ResonanceEntry& e : cs.roots) {
            finish_entry(e, sec);
            for (const Disk& d : region.exclusions)
                if (std::abs(e.zeta - d.center) <= d.radius) e.probe = true;
            if (opt.stability_check) {
                ResonanceEntry moved;
                const Rect box{e.zeta.real() - 1e-3, e.zeta.real() + 1e-3, e.zeta.imag() - 1e-3,
                               e.zeta.imag() + 1e-3};
                e.rmatch_shift = cs.newton(e.zeta, box, 1.0, moved, shifted) ? std::abs(moved.zeta - e.zeta) : 1e300;
            }
        }
        int total = 0;
        for (const auto& e : cs.roots) total += e.order;
        if (total != w.count) {
            std::ostringstream os;
            os << "resonance search: channel l = " << l << " winding " << w.count << " but polished orders sum to "
               << total;
            throw InconsistencyError(os.str());
        }
        per[l] = std::move(cs.roots);
    });
    for (auto& v : per) out.entries.insert(out.entries.end(), v.begin(), v.end());
    std::sort(out.entries.begin(), out.entries.end(), [](const ResonanceEntry& a, const ResonanceEntry& b) {
        if (a.l != b.l) return a.l < b.l;
        if (a.zeta.real() != b.zeta.real()) return a.zeta.real() < b.zeta.real();
        return a.zeta.imag() < b.zeta.imag();
    });
    out.complete = out.channel_counts.back() == 0;

    // Real V: nonreal zeros pair with their conjugates when the region is symmetric.
    const double half = 0.5 * dim.n();
    for (const ResonanceEntry& e : out.entries) {
        if (!e.probe && e.zeta.imag() != 0.0 && std::abs(e.zeta.real() - half) < 1e-9) {
            std::ostringstream os;
            os << "resonance search: zero " << e.zeta << " on the critical line in channel l = " << e.l;
            throw InconsistencyError(os.str());
        }
        if (region.im_lo != -region.im_hi || e.zeta.imag() == 0.0) continue;
        const bool paired = std::any_of(out.entries.begin(), out.entries.end(), [&](const ResonanceEntry& f) {
            return f.l == e.l && f.order == e.order &&
                   std::abs(f.zeta - std::conj(e.zeta)) < 1e-6 * std::max(1.0, std::abs(e.zeta));
        });
        if (!paired) {
            std::ostringstream os;
            os << "resonance search: zero " << e.zeta << " in channel l = " << e.l << " has no conjugate partner";
            throw InconsistencyError(os.str());
        }
    }
    return out;
}

long long critical_point_probe(const HyperbolicDim& dim, const RadialPotential& V, int L_max,
                               const ResonanceOptions& opt) {
    if (L_max < 0) throw DomainError("critical_point_probe: L_max must be >= 0");
    const cplx c(0.5 * dim.n(), 0.0);
    std::vector<long long> per(L_max + 1, 0);
    parallel_for(per.size(), opt.threads, [&](std::size_t l) {
        const Sector sec(dim, int(l));
        ChannelSearch cs(sec, V, opt);
        const Winding w = cs.circle_winding(c, opt.exclusion_radius, opt.standoff_fraction * opt.exclusion_radius);
        if (w.near) throw ConvergenceError("critical_point_probe: a zero lies on the probe circle");
        per[l] = w.count * sec.multiplicity;
    });
    long long total = 0;
    for (long long v : per) total += v;
    return total;
}

CountValue counting_function(const ResonanceList& list, double r) {
    if (!(r >= 0.0)) throw DomainError("counting_function: r must be >= 0");
    const cplx c(0.5 * list.n, 0.0);
    CountValue out;
    for (const ResonanceEntry& e : list.entries)
        if (std::abs(e.zeta - c) <= r) out.count += e.multiplicity();
    out.lower_bound_only = !list.complete || r > list.region.inscribed_radius(c);
    return out;
}

double counting_growth_constant(const ResonanceList& list, double r_min, double r_max) {
    if (!(r_min > 0.0) || !(r_max >= r_min)) throw DomainError("counting_growth_constant: need 0 < r_min <= r_max");
    const cplx c(0.5 * list.n, 0.0);
    r_max = std::min(r_max, list.region.inscribed_radius(c));
    const int p = list.n + 1;
    // N(r)/r^p is maximal just at the jumps of N, or at r_min.
    std::vector<double> radii{r_min};
    for (const ResonanceEntry& e : list.entries) {
        const double d = std::abs(e.zeta - c);
        if (d >= r_min && d <= r_max) radii.push_back(d);
    }
    double C = 0.0;
    for (double r : radii) C = std::max(C, double(counting_function(list, r).count) / std::pow(r, p));
    return C;
}

}  // namespace hyperres
