#pragma once

// Verification suites driven by scenario files, shared by the command-line
// tool and the acceptance runner. Each suite returns one JSON item per
// inequality instance plus pass/fail counts.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "hfd/entropy.hpp"
#include "hfd/fde_bounds.hpp"
#include "hfd/fde_sim.hpp"
#include "json.hpp"

namespace hfd {

struct SuiteResult {
    std::string suite;
    nlohmann::json items = nlohmann::json::array();
    int passed = 0, failed = 0;

    void add(nlohmann::json item, bool ok) {
        item["pass"] = ok;
        items.push_back(std::move(item));
        (ok ? passed : failed) += 1;
    }
    bool pass() const { return failed == 0 && passed > 0; }
    int count(const std::string& kind) const {
        int n = 0;
        for (const auto& it : items)
            if (it.value("name", "") == kind) ++n;
        return n;
    }
    nlohmann::json to_json() const { return {{"suite", suite}, {"passed", passed}, {"failed", failed}, {"items", items}}; }
};

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"herrero-pierre", "bounds", "aleksandrov", "entropy", "truncation", "all"};
    return names;
}

// ---------------------------------------------------------------------------
// Simulation-based suites

/// Runs every case of the suite file that has checks of the requested kind.
inline void run_simulation_checks(const nlohmann::json& suite, const std::string& which, const std::string& base_dir,
                                  SuiteResult& out) {
    if (!suite.contains("cases")) return;
    for (const auto& cs : suite["cases"]) {
        const bool want_hp = (which == "herrero-pierre" || which == "all") && cs.contains("herrero_pierre");
        const bool want_bounds = (which == "bounds" || which == "all") && (cs.contains("local_upper") || cs.contains("local_lower"));
        const bool want_alek = (which == "aleksandrov" || which == "all") && cs.contains("aleksandrov");
        if (!want_hp && !want_bounds && !want_alek) continue;
        const Scenario sc = scenario_from_json(cs.at("scenario"), base_dir);
        const Solution sol = evolve(sc.config, sc.u0);
        const std::string case_name = cs.value("name", "case");
        auto tag = [&](nlohmann::json j) {
            j["case"] = case_name;
            return j;
        };
        if (want_hp) {
            for (const auto& t : cs["herrero_pierre"]) {
                const Verdict v = verify_herrero_pierre(sol, t.at("R"), t.at("r"), t.at("t"), t.at("tau"), t.at("rho0"));
                out.add(tag(to_json(v)), v.pass);
            }
        }
        if (want_bounds) {
            const ParamSet p = derive_params(sc.config.d, sc.config.m, Usage::FdeBounds);
            const SmoothingConstants s = smoothing_kappa_bar(p);
            const PositivityConstants pc = positivity_constants(p, s.kbar);
            for (const auto& t : cs.value("local_upper", nlohmann::json::array())) {
                const Verdict v = verify_local_upper(sol, t.at("R"), t.at("t"), s.kbar);
                out.add(tag(to_json(v)), v.pass);
            }
            for (const auto& t : cs.value("local_lower", nlohmann::json::array())) {
                const Verdict v = verify_local_lower(sol, t.at("R"), t.at("t"), pc.kappa, pc.kappa_star);
                out.add(tag(to_json(v)), v.pass);
            }
        }
        if (want_alek) {
            for (const auto& t : cs["aleksandrov"]) {
                const AleksandrovVerdict v = verify_aleksandrov(sol, t.at("R"), t.at("lambda"), t.at("t"));
                out.add(tag(to_json(v.mean)), v.mean.pass);
                if (v.r_form) out.add(tag(to_json(*v.r_form)), v.r_form->pass);
            }
        }
    }
}

inline void run_truncation_checks(const nlohmann::json& suite, SuiteResult& out) {
    for (const auto& t : suite.value("truncation", nlohmann::json::array())) {
        const TruncationVerdict v = verify_truncation_bounds(t.at("R1"), t.at("R0"), t.at("d"), t.at("samples"));
        out.add({{"name", "truncation"},
                 {"where", t},
                 {"samples", v.samples},
                 {"sup_grad", v.sup_grad},
                 {"grad_bound", v.grad_bound},
                 {"sup_laplacian", v.sup_laplacian},
                 {"laplacian_bound", v.laplacian_bound},
                 {"phi_min", v.phi_min},
                 {"phi_max", v.phi_max}},
                v.pass);
    }
}

// ---------------------------------------------------------------------------
// Entropy suite

/// Radial test function for the Hardy-Poincare checks, before the mean is removed.
inline std::function<double(double)> hardy_poincare_sample(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "power") {
        const double s = j.at("s").get<double>();
        return [s](double r) { return std::pow(1.0 + r * r, s); };
    }
    if (kind == "gauss") {
        const double sigma = j.at("sigma").get<double>();
        return [sigma](double r) { return std::exp(-r * r / sigma); };
    }
    if (kind == "rational") return [](double r) { return r * r / (1.0 + r * r * r * r); };
    if (kind == "mix") return [](double r) { return std::sqrt(1.0 + r * r) + std::exp(-r * r); };
    throw ConfigError("unknown sample kind " + kind);
}

/// Successive quadratization drifts must shrink like eps: drift ratio over
/// eps ratio within [1/2, 2] (for eps ratios of 1/10, drift ratios in [0.05, 0.2]).
inline constexpr double kDriftScaleLo = 0.5, kDriftScaleHi = 2.0;

inline void run_entropy_checks(const nlohmann::json& suite, SuiteResult& out) {
    for (const auto& e : suite.value("entropy", nlohmann::json::array())) {
        const ParamSet p = derive_params(e.at("d"), e.at("m"), Usage::Entropy);
        const std::vector<double> r = make_entropy_grid(p, e.value("intervals", 4096));
        const nlohmann::json where = {{"d", p.d}, {"m", p.m}};
        {
            const RadialField B = barenblatt_field(p, r);
            const Estimate F = free_energy(B, p), I = fisher_information(B, p);
            out.add({{"name", "entropy-identity"}, {"where", where}, {"F", F.value}, {"I", I.value}},
                    std::abs(F.value) <= F.error + 1e-14 && std::abs(I.value) <= I.error + 1e-14);
        }
        for (const auto& pj : e.value("perturbations", nlohmann::json::array())) {
            const Perturbation pert{pj.at("delta"), pj.value("center", 0.0), pj.value("width", 1.0), pj.value("freq", 0.0)};
            const PerturbedProfile pp = perturbed_barenblatt(p, r, pert);
            const EepVerdict v = eep_check(pp.v, pp.eps_tube, p);
            nlohmann::json w = where;
            w["perturbation"] = pj;
            out.add({{"name", "eep"},
                     {"where", w},
                     {"eps_tube", v.eps_tube},
                     {"mass_scale", pp.scale},
                     {"improved", v.improved},
                     {"I", v.I.value},
                     {"F", v.F.value},
                     {"ratio", v.ratio},
                     {"target", v.target},
                     {"slack", v.slack},
                     {"error", v.error},
                     {"sandwich_ok", v.sandwich_ok},
                     {"fisher_sandwich_ok", v.fisher_sandwich_ok}},
                    v.pass && v.sandwich_ok && v.fisher_sandwich_ok);
        }
        for (const auto& gj : e.value("hardy_poincare", nlohmann::json::array())) {
            const RadialField g = make_mean_zero(sample(p, r, hardy_poincare_sample(gj), true), p);
            const HardyPoincareVerdict v = hardy_poincare_check(g, p);
            nlohmann::json w = where;
            w["g"] = gj;
            out.add({{"name", "hardy-poincare"},
                     {"where", w},
                     {"ratio", v.ratio},
                     {"target", v.target},
                     {"slack", v.slack},
                     {"error", v.error}},
                    v.pass);
        }
        if (e.contains("quadratization")) {
            const auto& q = e["quadratization"];
            const RadialField g = make_mean_zero(sample(p, r, hardy_poincare_sample(q.at("g")), true), p);
            double F_lin = 0.0;
            const auto pts = quadratization(g, p, q.at("eps").get<std::vector<double>>(), &F_lin);
            bool ok = pts.size() >= 2;
            nlohmann::json arr = nlohmann::json::array();
            for (std::size_t k = 0; k < pts.size(); ++k) {
                nlohmann::json pt = {{"eps", pts[k].eps}, {"ratio", pts[k].ratio}, {"drift", pts[k].drift}};
                if (k > 0) {
                    const double dr = std::abs(pts[k].drift) / std::abs(pts[k - 1].drift);
                    const double er = pts[k].eps / pts[k - 1].eps;
                    pt["drift_ratio"] = dr;
                    ok = ok && dr >= kDriftScaleLo * er && dr <= kDriftScaleHi * er;
                }
                arr.push_back(pt);
            }
            out.add({{"name", "quadratization"}, {"where", where}, {"F_lin", F_lin}, {"points", arr}}, ok);
        }
        if (e.contains("f_grid")) {
            const int n = e["f_grid"].get<int>();
            const double top = p.chi * p.eta;
            double fmin = INFINITY;
            for (int i = 1; i <= n; ++i) fmin = std::min(fmin, improvement_functions(top * i / (n + 1.0), p).f);
            out.add({{"name", "improvement-f"}, {"where", where}, {"points", n}, {"f_min", fmin}, {"eta", p.eta}}, fmin >= p.eta);
        }
    }
}

inline SuiteResult run_suite(const nlohmann::json& suite, const std::string& which, const std::string& base_dir = ".") {
    bool known = false;
    for (const auto& n : suite_names()) known = known || n == which;
    if (!known) throw ConfigError("unknown suite " + which);
    SuiteResult out;
    out.suite = which;
    if (which == "herrero-pierre" || which == "bounds" || which == "aleksandrov" || which == "all")
        run_simulation_checks(suite, which, base_dir, out);
    if (which == "truncation" || which == "all") run_truncation_checks(suite, out);
    if (which == "entropy" || which == "all") run_entropy_checks(suite, out);
    return out;
}

// ---------------------------------------------------------------------------
// Simulator regression and comparison

struct RegressionRun {
    int N = 0;
    double linf_rel = 0.0;    ///< max |u - B| / max B at the final time
    double mass_drift = 0.0;  ///< relative change of the discrete mass
};

/// Barenblatt data at time t0 evolved for `duration`, compared with the
/// self-similar solution at t0 + duration on each grid.
inline std::vector<RegressionRun> barenblatt_regression(int d, double m, double t0, double duration, double r_max,
                                                        const std::vector<int>& grids, double dt_coeff = 0.5) {
    const ParamSet p = derive_params(d, m, Usage::FdeBounds);
    std::vector<RegressionRun> out;
    for (int N : grids) {
        SolverConfig c;
        c.d = d;
        c.m = m;
        c.r_max = r_max;
        c.N = N;
        c.dt_policy = DtPolicy::Fixed;
        c.dt_coeff = dt_coeff;
        c.snapshot_times = {0.5 * duration, duration};
        const Solution sol = evolve(c, [&](double r) { return barenblatt_time(p, t0, r); });
        RegressionRun run;
        run.N = N;
        double err = 0.0, mx = 0.0;
        const auto& u = sol.snapshots.back().u;
        for (int j = 0; j < sol.grid.cells(); ++j) {
            const double b = barenblatt_time(p, t0 + duration, sol.grid.centers[j]);
            err = std::max(err, std::abs(u[j] - b));
            mx = std::max(mx, b);
        }
        run.linf_rel = err / mx;
        run.mass_drift = std::abs(sol.snapshots.back().mass - sol.snapshots.front().mass) / sol.snapshots.front().mass;
        out.push_back(run);
    }
    return out;
}

struct ComparisonCase {
    int d = 0;
    double m = 0.0;
    double worst = 0.0;  ///< max over snapshots and cells of (u - v) / max v
    bool pass = false;
};

/// Random ordered pairs u0 <= v0 (sums of cosine bumps), evolved with the same
/// fixed steps; u(t) <= v(t) must hold cell by cell up to the Newton tolerance.
inline std::vector<ComparisonCase> comparison_pairs(int count, std::uint64_t seed, double tol = 1e-9) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<ComparisonCase> out;
    for (int k = 0; k < count; ++k) {
        ComparisonCase cs;
        cs.d = 1 + static_cast<int>(rng() % 3);
        const double lo = std::max(0.1, admitted_m_lower(cs.d, Usage::FdeBounds));
        cs.m = lo + (0.95 - lo) * U(rng);
        struct Bump {
            double h, R;
        };
        std::vector<Bump> base, extra;
        const int nb = 1 + static_cast<int>(rng() % 3);
        for (int i = 0; i < nb; ++i) base.push_back({0.1 + 0.9 * U(rng), 0.5 + 2.5 * U(rng)});
        extra.push_back({0.05 + 0.5 * U(rng), 0.5 + 3.5 * U(rng)});
        auto sum = [](const std::vector<Bump>& bs, double r) {
            double s = 0.0;
            for (const auto& b : bs) s += cosine_bump(r, b.h, b.R);
            return s;
        };
        SolverConfig c;
        c.d = cs.d;
        c.m = cs.m;
        c.r_max = 30.0;
        c.N = 200;
        c.dt_policy = DtPolicy::Fixed;
        c.dt_coeff = 0.5;
        c.snapshot_times = {0.05, 0.2, 0.5};
        const Solution su = evolve(c, [&](double r) { return sum(base, r); });
        const Solution sv = evolve(c, [&](double r) { return sum(base, r) + sum(extra, r); });
        for (std::size_t s = 0; s < su.snapshots.size(); ++s) {
            double vmax = 0.0;
            for (double x : sv.snapshots[s].u) vmax = std::max(vmax, x);
            for (int j = 0; j < su.grid.cells(); ++j)
                cs.worst = std::max(cs.worst, (su.snapshots[s].u[j] - sv.snapshots[s].u[j]) / vmax);
        }
        cs.pass = cs.worst <= tol;
        out.push_back(cs);
    }
    return out;
}

}  // namespace hfd
