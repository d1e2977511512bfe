// hyperres command-line front end: one subcommand per task, a JSON run
// configuration, CSV/JSON outputs and a manifest with SHA-256 checksums.
#include <openssl/evp.h>

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hyperres/acceptance.hpp"
#include "hyperres/error.hpp"
#include "hyperres/kernels.hpp"
#include "hyperres/parallel.hpp"
#include "hyperres/resonances.hpp"
#include "hyperres/scattering.hpp"
#include "hyperres/traces.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace hyperres;

namespace {

constexpr const char* kSchema = "hyperres-config/1";

// ---------------------------------------------------------------- config

struct ConfigError : DomainError {
    using DomainError::DomainError;
};

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items())
        if (!ok.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

double num(const json& obj, const char* key, const std::string& where, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return obj[key].get<double>();
}

double num_required(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing required key '" + key + "'");
    return num(obj, key, where, 0.0);
}

int integer(const json& obj, const char* key, const std::string& where, int fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
    return obj[key].get<int>();
}

cplx complex_value(const json& v, const std::string& where) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError(where + ": expected a number or [re, im]");
}

RadialPotential parse_potential(const json& p, const std::string& where) {
    if (!p.contains("kind") || !p["kind"].is_string()) throw ConfigError(where + ": missing string key 'kind'");
    const std::string kind = p["kind"];
    if (kind == "zero") {
        allow_keys(p, where, {"kind"});
        return {};
    }
    if (kind == "bump" || kind == "ball") {
        allow_keys(p, where, {"kind", "amplitude", "radius"});
        const double a = num_required(p, "amplitude", where), R = num_required(p, "radius", where);
        return kind == "bump" ? RadialPotential::bump(a, R) : RadialPotential::ball(a, R);
    }
    if (kind == "smoothed_well") {
        allow_keys(p, where, {"kind", "amplitude", "radius", "inner"});
        return RadialPotential::smoothed_well(num_required(p, "amplitude", where), num_required(p, "radius", where),
                                              num_required(p, "inner", where));
    }
    if (kind == "tabulated") {
        allow_keys(p, where, {"kind", "r", "v", "radius"});
        if (!p.contains("r") || !p.contains("v")) throw ConfigError(where + ": tabulated needs 'r' and 'v'");
        return RadialPotential::tabulated(p["r"].get<std::vector<double>>(), p["v"].get<std::vector<double>>(),
                                          num_required(p, "radius", where));
    }
    if (kind == "sum") {
        allow_keys(p, where, {"kind", "terms"});
        if (!p.contains("terms") || !p["terms"].is_array() || p["terms"].empty())
            throw ConfigError(where + ": sum needs a nonempty 'terms' array");
        RadialPotential V;
        for (std::size_t i = 0; i < p["terms"].size(); ++i)
            V = V + parse_potential(p["terms"][i], where + ".terms[" + std::to_string(i) + "]");
        return V;
    }
    throw ConfigError(where + ": unknown potential kind '" + kind + "'");
}

// Tolerance names accepted in "tolerances" and as HYPERRES_<NAME> overrides.
const std::map<std::string, double> kDefaultTolerances = {
    {"scattering_tail", 1e-6},  {"heat_tail", 1e-6},      {"eigen_margin", 1e-6},
    {"eigen_cap", 1e-6},        {"levinson_drift", 0.05}, {"poisson_max_tail", 1e300},
    {"standoff_fraction", 1e-3}, {"min_cell", 1e-6},
};

struct RunConfig {
    std::string task;
    json echo;
    HyperbolicDim dim{1};
    RadialPotential V;
    std::vector<double> xi;
    double t_min = 1e-3, t_max = 0.05;
    int t_count = 25;
    SearchRegion region;
    bool have_region = false;
    int L_max = -1;
    std::uint64_t seed = 0x5eed5eedULL;
    std::map<std::string, double> tol = kDefaultTolerances;
    int fit_terms = 3;
    bool polynomial_extension = true;
    double r_cap = 40.0;
    int mesh = 4000;
    double psi_center = 2.0, psi_halfwidth = 1.0;
    int psi_order = 4;
    double r_max = 6.0;
    std::string kernel_kind = "resolvent";
    cplx kernel_param{1.5, 0.0};
    double kr_min = 0.01, kr_max = 10.0;
    int kr_count = 100;
    std::vector<int> criteria;
};

void apply_env_overrides(RunConfig& c) {
    for (auto& [name, value] : c.tol) {
        std::string env = "HYPERRES_";
        for (char ch : name) env += char(std::toupper(static_cast<unsigned char>(ch)));
        if (const char* v = std::getenv(env.c_str())) {
            char* end = nullptr;
            const double x = std::strtod(v, &end);
            if (end == v || *end != '\0' || !std::isfinite(x))
                throw ConfigError("environment " + env + ": not a finite number");
            value = x;
        }
    }
}

RunConfig parse_config(const json& j, const std::string& task) {
    allow_keys(j, "config", {"schema", "task", "dimension", "potential", "grids", "search", "tolerances", "L_max",
                             "seed", "heat", "poisson", "kernels", "verify", "output"});
    if (!j.contains("schema") || j["schema"] != kSchema)
        throw ConfigError(std::string("config.schema: expected \"") + kSchema + "\"");
    if (j.contains("task") && j["task"] != task)
        throw ConfigError("config.task '" + j["task"].get<std::string>() + "' does not match subcommand '" + task + "'");
    RunConfig c;
    c.task = task;
    c.echo = j;
    const int dimension = integer(j, "dimension", "config", 3);
    if (dimension < 2) throw ConfigError("config.dimension: must be >= 2 (the dimension n+1 of H^{n+1})");
    c.dim = HyperbolicDim(dimension - 1);
    if (j.contains("potential")) c.V = parse_potential(j["potential"], "config.potential");
    else if (task != "verify" && task != "kernels") throw ConfigError("config: missing required block 'potential'");

    double xi_max = 20.0, dense_step = 0.01, dense_until = 1.0, step = 0.1;
    if (j.contains("grids")) {
        const json& g = j["grids"];
        allow_keys(g, "config.grids", {"xi", "t"});
        if (g.contains("xi")) {
            allow_keys(g["xi"], "config.grids.xi", {"max", "dense_step", "dense_until", "step"});
            xi_max = num(g["xi"], "max", "config.grids.xi", xi_max);
            dense_step = num(g["xi"], "dense_step", "config.grids.xi", dense_step);
            dense_until = num(g["xi"], "dense_until", "config.grids.xi", dense_until);
            step = num(g["xi"], "step", "config.grids.xi", step);
        }
        if (g.contains("t")) {
            allow_keys(g["t"], "config.grids.t", {"min", "max", "count"});
            c.t_min = num(g["t"], "min", "config.grids.t", c.t_min);
            c.t_max = num(g["t"], "max", "config.grids.t", c.t_max);
            c.t_count = integer(g["t"], "count", "config.grids.t", c.t_count);
        }
    }
    if (task == "phase" || task == "heat" || task == "poisson-check")
        c.xi = default_xi_grid(xi_max, dense_step, dense_until, step);

    if (j.contains("search")) {
        const json& s = j["search"];
        allow_keys(s, "config.search", {"re", "im", "exclusions"});
        auto pair = [&](const char* k) {
            if (!s.contains(k) || !s[k].is_array() || s[k].size() != 2)
                throw ConfigError(std::string("config.search.") + k + ": expected [lo, hi]");
            return std::pair<double, double>(s[k][0].get<double>(), s[k][1].get<double>());
        };
        const auto [rl, rh] = pair("re");
        const auto [il, ih] = pair("im");
        c.region = SearchRegion{rl, rh, il, ih, {}};
        if (s.contains("exclusions"))
            for (const auto& e : s["exclusions"]) {
                allow_keys(e, "config.search.exclusions[]", {"center", "radius"});
                if (!e.contains("center")) throw ConfigError("config.search.exclusions[]: missing 'center'");
                c.region.exclusions.push_back(
                    {complex_value(e["center"], "config.search.exclusions[].center"),
                     num_required(e, "radius", "config.search.exclusions[]")});
            }
        c.region.validate();
        c.have_region = true;
    }
    if ((task == "resonances" || task == "poisson-check") && !c.have_region)
        throw ConfigError("config: task '" + task + "' needs a 'search' block");

    if (j.contains("tolerances")) {
        for (const auto& [k, v] : j["tolerances"].items()) {
            if (!c.tol.count(k)) throw ConfigError("config.tolerances: unknown key '" + k + "'");
            if (!v.is_number()) throw ConfigError("config.tolerances." + k + ": expected a number");
            c.tol[k] = v.get<double>();
        }
    }
    if (j.contains("L_max")) {
        const json& L = j["L_max"];
        if (L.is_string() && L == "auto") c.L_max = -1;
        else if (L.is_number_integer() && L.get<int>() >= 0) c.L_max = L.get<int>();
        else throw ConfigError("config.L_max: expected \"auto\" or a nonnegative integer");
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw ConfigError("config.seed: expected a nonnegative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("heat")) {
        const json& h = j["heat"];
        allow_keys(h, "config.heat", {"fit_terms", "extension", "r_cap", "mesh"});
        c.fit_terms = integer(h, "fit_terms", "config.heat", c.fit_terms);
        if (h.contains("extension")) {
            if (h["extension"] == "polynomial") c.polynomial_extension = true;
            else if (h["extension"] == "zero") c.polynomial_extension = false;
            else throw ConfigError("config.heat.extension: expected \"polynomial\" or \"zero\"");
        }
        c.r_cap = num(h, "r_cap", "config.heat", c.r_cap);
        c.mesh = integer(h, "mesh", "config.heat", c.mesh);
    }
    if (j.contains("poisson")) {
        const json& p = j["poisson"];
        allow_keys(p, "config.poisson", {"psi", "r_max"});
        if (p.contains("psi")) {
            allow_keys(p["psi"], "config.poisson.psi", {"center", "halfwidth", "order"});
            c.psi_center = num(p["psi"], "center", "config.poisson.psi", c.psi_center);
            c.psi_halfwidth = num(p["psi"], "halfwidth", "config.poisson.psi", c.psi_halfwidth);
            c.psi_order = integer(p["psi"], "order", "config.poisson.psi", c.psi_order);
        }
        c.r_max = num(p, "r_max", "config.poisson", c.r_max);
    }
    if (j.contains("kernels")) {
        const json& k = j["kernels"];
        allow_keys(k, "config.kernels", {"kind", "s", "xi", "r"});
        if (k.contains("kind")) {
            c.kernel_kind = k["kind"];
            if (c.kernel_kind != "resolvent" && c.kernel_kind != "spectral")
                throw ConfigError("config.kernels.kind: expected \"resolvent\" or \"spectral\"");
        }
        if (c.kernel_kind == "resolvent" && k.contains("s")) c.kernel_param = complex_value(k["s"], "config.kernels.s");
        if (c.kernel_kind == "spectral") c.kernel_param = cplx(num(k, "xi", "config.kernels", 1.0), 0.0);
        if (k.contains("r")) {
            allow_keys(k["r"], "config.kernels.r", {"min", "max", "count"});
            c.kr_min = num(k["r"], "min", "config.kernels.r", c.kr_min);
            c.kr_max = num(k["r"], "max", "config.kernels.r", c.kr_max);
            c.kr_count = integer(k["r"], "count", "config.kernels.r", c.kr_count);
        }
    }
    if (j.contains("verify")) {
        allow_keys(j["verify"], "config.verify", {"criteria"});
        c.criteria = j["verify"].value("criteria", std::vector<int>{});
    }
    if (c.criteria.empty())
        for (int i = 1; i <= 10; ++i) c.criteria.push_back(i);
    if (j.contains("output")) {
        allow_keys(j["output"], "config.output", {"formats"});
    }
    apply_env_overrides(c);
    return c;
}

// ---------------------------------------------------------------- output

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

class Csv {
public:
    explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}
    void row(const std::vector<std::string>& cells) { rows_.push_back(cells); }
    std::string str() const {
        std::string out;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) out += ',';
                out += cells[i];
            }
            out += "\r\n";
        };
        line(header_);
        for (const auto& r : rows_) line(r);
        return out;
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

class Outputs {
public:
    explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }
    void write(const std::string& name, const std::string& content) {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
        f << content;
        files_.push_back({{"name", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
    }
    void json_file(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
    void manifest(const RunConfig& c) {
        json m;
        m["tool"] = "hyperres";
        m["schema"] = kSchema;
        m["task"] = c.task;
        m["config"] = c.echo;
        json tol;
        for (const auto& [k, v] : c.tol) tol[k] = v;
        m["effective_tolerances"] = tol;
        m["files"] = files_;
        std::ofstream f(dir_ / "manifest.json", std::ios::binary);
        f << m.dump(2) << "\n";
    }

private:
    fs::path dir_;
    json files_ = json::array();
};

// ---------------------------------------------------------------- tasks

ScatteringOptions scat_opts(const RunConfig& c, int threads) {
    ScatteringOptions o;
    o.threads = threads;
    o.tail_tolerance = c.tol.at("scattering_tail");
    return o;
}

ResonanceOptions res_opts(const RunConfig& c, int threads) {
    ResonanceOptions o;
    o.threads = threads;
    o.seed = c.seed;
    o.standoff_fraction = c.tol.at("standoff_fraction");
    o.min_cell = c.tol.at("min_cell");
    return o;
}

EigenOracleOptions eig_opts(const RunConfig& c) {
    EigenOracleOptions o;
    o.margin = c.tol.at("eigen_margin");
    o.cap_tolerance = c.tol.at("eigen_cap");
    return o;
}

json fit_json(const AsymptoticFit& f, const WaveInvariants& w, const HyperbolicDim& dim) {
    json j = json::array();
    for (std::size_t k = 0; k < f.coef.size(); ++k) {
        json e{{"k", k + 1}, {"power", f.powers[k]}, {"coef", f.coef[k]}, {"stderr", f.stderr_[k]},
               {"resolvable", bool(f.resolvable[k])}};
        if (k < 2) e["target"] = phase_coefficient_target(int(k) + 1, w.a(int(k) + 1), dim);
        j.push_back(e);
    }
    return j;
}

void task_invariants(const RunConfig& c, Outputs& out) {
    const WaveInvariants w = wave_invariants(c.V, c.dim);
    out.json_file("invariants.json", {{"dimension", c.dim.n() + 1},
                                      {"a1", w.a1},
                                      {"a2", w.a2},
                                      {"intV", w.intV},
                                      {"intV2", w.intV2}});
    std::cout << "a1 = " << fmt(w.a1) << "\na2 = " << fmt(w.a2) << "\n";
}

void task_phase(const RunConfig& c, int threads, Outputs& out) {
    const PhaseGrid g = scattering_phase(c.V, c.dim, c.xi, c.L_max, scat_opts(c, threads));
    Csv csv({"xi", "sigma", "dsigma", "branch_offset", "tail_estimate"});
    for (std::size_t j = 0; j < g.xi.size(); ++j)
        csv.row({fmt(g.xi[j]), fmt(g.sigma[j]), fmt(g.dsigma[j]), std::to_string(g.branch_offsets[j]),
                 fmt(g.tail_estimate[j])});
    out.write("phase.csv", csv.str());
    const WaveInvariants w = wave_invariants(c.V, c.dim);
    json rep{{"L_max", g.L_max}, {"xi_max", g.xi.back()}};
    const AsymptoticFit f = phase_asymptotics_fit(g, c.dim, c.fit_terms);
    rep["fit"] = fit_json(f, w, c.dim);
    rep["fit_window"] = {f.window_lo, f.window_hi};
    const LevinsonEstimate L = levinson_constant(g, c.dim, f.coef, c.tol.at("levinson_drift"));
    rep["levinson_limit"] = L.value;
    rep["levinson_drift"] = L.drift;
    out.json_file("phase_report.json", rep);
    std::cout << "phase: " << g.xi.size() << " samples, L_max " << g.L_max << ", limit " << fmt(L.value) << "\n";
}

void task_resonances(const RunConfig& c, int threads, Outputs& out) {
    const ResonanceList L = find_resonances(c.dim, c.V, c.region, c.L_max, res_opts(c, threads));
    Csv csv({"l", "m_l", "re", "im", "order", "multiplicity", "eigenvalue", "lambda", "probe", "strict", "residual",
             "rmatch_shift"});
    for (const auto& e : L.entries)
        csv.row({std::to_string(e.l), std::to_string(e.m_l), fmt(e.zeta.real()), fmt(e.zeta.imag()),
                 std::to_string(e.order), std::to_string(e.multiplicity()), e.eigenvalue ? "1" : "0",
                 fmt(e.lambda), e.probe ? "1" : "0", e.strict ? "1" : "0", fmt(e.residual), fmt(e.rmatch_shift)});
    out.write("resonances.csv", csv.str());
    const cplx center(0.5 * c.dim.n(), 0.0);
    const double rad = c.region.inscribed_radius(center);
    json counting = json::array();
    for (int i = 1; i <= 20 && rad > 0.0; ++i) {
        const double r = rad * i / 20.0;
        const CountValue v = counting_function(L, r);
        counting.push_back({{"r", r}, {"N", v.count}, {"lower_bound_only", v.lower_bound_only}});
    }
    json rep{{"L_max", L.L_max}, {"complete", L.complete}, {"channel_counts", L.channel_counts},
             {"counting", counting}};
    if (rad > 0.0 && !L.entries.empty()) rep["growth_constant"] = counting_growth_constant(L, 0.5 * rad, rad);
    out.json_file("resonances_report.json", rep);
    std::cout << "resonances: " << L.entries.size() << " entries, L_max " << L.L_max
              << (L.complete ? ", complete" : ", incomplete") << "\n";
}

void task_heat(const RunConfig& c, int threads, Outputs& out) {
    const PhaseGrid g = scattering_phase(c.V, c.dim, c.xi, c.L_max, scat_opts(c, threads));
    const std::vector<double> lam = bound_state_eigenvalues(c.V, c.dim, c.r_cap, c.mesh, eig_opts(c));
    const long long m = critical_point_probe(c.dim, c.V, 4, res_opts(c, threads));
    HeatOptions ho;
    ho.polynomial_extension = c.polynomial_extension;
    ho.fit_terms = c.fit_terms;
    ho.tail_tolerance = c.tol.at("heat_tail");
    const HeatCurve curve = heat_trace(g, c.dim, lam, int(m), log_grid(c.t_min, c.t_max, c.t_count), ho);
    Csv csv({"t", "value", "phase_integral", "eigencontrib", "value_zero_pad", "value_extended", "tail_bound"});
    for (std::size_t i = 0; i < curve.t.size(); ++i)
        csv.row({fmt(curve.t[i]), fmt(curve.value[i]), fmt(curve.phase_integral[i]), fmt(curve.eigencontrib[i]),
                 fmt(curve.value_zero_pad[i]), fmt(curve.value_extended[i]), fmt(curve.tail_bound[i])});
    out.write("heat.csv", csv.str());
    const WaveInvariants w = wave_invariants(c.V, c.dim);
    json rep{{"eigenvalues", lam}, {"m_half", m}, {"smallest_admissible_t", smallest_admissible_t(g, c.dim, ho)}};
    if (std::log10(c.t_max / c.t_min) >= 1.5) {
        const HeatFit f = heat_smallt_fit(curve, c.dim, c.fit_terms, &w);
        json terms = json::array();
        for (std::size_t k = 0; k < f.coef.size(); ++k) {
            json e{{"k", k + 1}, {"power_of_4t", f.exponents[k]}, {"coef", f.coef[k]}, {"stderr", f.stderr_[k]}};
            if (std::isfinite(f.target[k])) e["target"] = f.target[k];
            terms.push_back(e);
        }
        rep["small_t_fit"] = terms;
    }
    out.json_file("heat_report.json", rep);
    std::cout << "heat: " << curve.t.size() << " samples, " << lam.size() << " eigenvalues\n";
}

void task_poisson(const RunConfig& c, int threads, Outputs& out) {
    const TestFunction psi = TestFunction::bspline_pair(c.psi_center, c.psi_halfwidth, c.psi_order);
    const PhaseGrid g = scattering_phase(c.V, c.dim, c.xi, -1, scat_opts(c, threads));
    const std::vector<double> lam = bound_state_eigenvalues(c.V, c.dim, c.r_cap, c.mesh, eig_opts(c));
    const long long m = critical_point_probe(c.dim, c.V, 4, res_opts(c, threads));
    const ResonanceList L = find_resonances(c.dim, c.V, c.region, c.L_max, res_opts(c, threads));
    PoissonOptions po;
    po.fit_terms = c.fit_terms;
    po.max_tail = c.tol.at("poisson_max_tail");
    const PoissonResult P = poisson_pairing(g, c.dim, lam, int(m), L, psi, c.r_max, po);
    out.json_file("poisson.json", {{"lhs", P.lhs},
                                   {"rhs", P.rhs},
                                   {"tail_bound", P.tail_bound},
                                   {"psi_preset", psi.name},
                                   {"r_max", P.r_max},
                                   {"u0_pairing", P.u0_pairing},
                                   {"resonances_used", P.resonances_used},
                                   {"growth_constant", P.growth_constant},
                                   {"assumed_depth", P.depth}});
    std::cout << "lhs = " << fmt(P.lhs) << "\nrhs = " << fmt(P.rhs) << "\ntail_bound = " << fmt(P.tail_bound)
              << "\n";
}

void task_kernels(const RunConfig& c, Outputs& out) {
    if (c.kr_count < 2 || !(c.kr_max > c.kr_min) || c.kr_min < 0.0)
        throw ConfigError("config.kernels.r: need 0 <= min < max and count >= 2");
    std::vector<double> r(c.kr_count);
    for (int i = 0; i < c.kr_count; ++i) r[i] = c.kr_min + (c.kr_max - c.kr_min) * i / (c.kr_count - 1);
    const auto rows = kernel_table(c.kernel_kind == "resolvent" ? KernelKind::resolvent : KernelKind::spectral,
                                   c.dim, c.kernel_param, r);
    Csv csv({"r", "re", "im"});
    for (const auto& row : rows) csv.row({fmt(row.r), fmt(row.value.real()), fmt(row.value.imag())});
    out.write("kernels.csv", csv.str());
}

bool task_verify(const RunConfig& c, int threads, Outputs& out) {
    AcceptanceOptions opt;
    opt.threads = threads;
    json results = json::array();
    bool all = true;
    for (int id : c.criteria) {
        const CriterionResult r = run_criterion(id, opt);
        json metrics = json::object();
        for (const auto& [k, v] : r.metrics) metrics[k] = v;
        results.push_back({{"criterion", r.id},
                           {"title", r.title},
                           {"pass", r.pass},
                           {"seconds", r.seconds},
                           {"time_limit", r.time_limit},
                           {"metrics", metrics},
                           {"note", r.note}});
        std::cout << "criterion " << r.id << (r.pass ? " PASS " : " FAIL ") << r.title << "\n" << std::flush;
        all = all && r.pass;
    }
    out.json_file("verify.json", {{"all_passed", all}, {"results", results}});
    return all;
}

int exit_code(ErrorClass cls) {
    switch (cls) {
        case ErrorClass::validation: return 2;
        case ErrorClass::numerical: return 3;
        case ErrorClass::inconsistency: return 4;
    }
    return 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scattering and resonance computations for radial potentials on hyperbolic space"};
    app.require_subcommand(1);
    std::string config_path, out_dir = ".";
    int threads = default_threads();
    const std::vector<std::string> tasks = {"phase", "resonances", "heat", "invariants",
                                            "poisson-check", "kernels", "verify"};
    for (const auto& t : tasks) {
        CLI::App* sub = app.add_subcommand(t, "run the " + t + " task");
        sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--out", out_dir, "output directory");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    const std::string task = app.get_subcommands().front()->get_name();

    try {
        json j;
        {
            std::ifstream f(config_path);
            try {
                j = json::parse(f);
            } catch (const json::parse_error& e) {
                throw ConfigError(std::string("config: ") + e.what());
            }
        }
        RunConfig c;
        try {
            c = parse_config(j, task);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        Outputs out(out_dir);
        bool ok = true;
        if (task == "invariants") task_invariants(c, out);
        else if (task == "phase") task_phase(c, threads, out);
        else if (task == "resonances") task_resonances(c, threads, out);
        else if (task == "heat") task_heat(c, threads, out);
        else if (task == "poisson-check") task_poisson(c, threads, out);
        else if (task == "kernels") task_kernels(c, out);
        else ok = task_verify(c, threads, out);
        out.manifest(c);
        return ok ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "hyperres: " << e.what() << "\n";
        return exit_code(e.error_class());
    } catch (const std::exception& e) {
        std::cerr << "hyperres: internal error: " << e.what() << "\n";
        return 4;
    }
}
