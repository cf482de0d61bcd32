#pragma once

// Threshold time t* after which a fast-diffusion solution is eps-close to the
// Barenblatt profile in relative error, assembled from every intermediate
// constant. Most quantities are double-exponential and live in TowerScalar.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>

#include "hfd/core_params.hpp"
#include "hfd/errors.hpp"
#include "hfd/fde_bounds.hpp"
#include "hfd/harnack.hpp"
#include "hfd/lognum.hpp"
#include "hfd/report.hpp"

namespace hfd {

/// Constants that come from the companion analysis and are not derived here.
struct CompanionConstants {
    std::optional<double> M_over;  ///< upper mass constant; eps_over is omitted when absent
    double C_dnu1 = 1.0;           ///< interpolation constant C_{d,nu,1}
    double C_over = 1.0;           ///< envelope constant for lambda0
    double C_under = 1.0;          ///< envelope constant for lambda1
};

struct ThresholdInputs {
    ParamSet params;
    double eps = 0.0;
    double A = 0.0;
    double G = 0.0;
    CompanionConstants companion;
};

/// R(t) = (1 + alpha t)^{1/alpha}
inline double radius_R(double t, double alpha) {
    if (!(t >= 0.0)) throw DomainError("t must be >= 0");
    if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
    return std::exp(std::log1p(alpha * t) / alpha);
}

/// (1+eps)^{1-m} - 1 and 1 - (1-eps)^{1-m} without cancellation.
inline double grow_minus_one(double eps, double m) { return std::expm1((1.0 - m) * std::log1p(eps)); }
inline double one_minus_shrink(double eps, double m) { return -std::expm1((1.0 - m) * std::log1p(-eps)); }

struct RhoResult {
    TowerScalar rho_under, rho_over, rho;
    double over_lower = 0.0, over_upper = 0.0;  ///< sandwich for rho_over
    bool over_sandwich_ok = false;
};

/// Outer radii. one_minus_eps_under = 1 - eps_under as a tower value.
inline RhoResult rho_eps(const ParamSet& p, double eps, const TowerScalar& one_minus_eps_under) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
    const double om = 1.0 - p.m;
    RhoResult r;
    const double g = grow_minus_one(eps, p.m);
    r.rho_over = tw(std::sqrt((g + 2.0) / g) / p.mu);
    // ((1-eps)/(1-eps_under))^{1-m} - 1, needs eps < eps_under
    const TowerScalar L = tw(om) * (tw(std::log1p(-eps)) - tower_log(one_minus_eps_under));
    if (L.sign() <= 0) throw DomainError("eps must be below eps_under");
    const TowerScalar num = L.level() == 0 ? tw(std::expm1(L.to_double())) : tower_exp(L) - tw(1.0);
    const TowerScalar sq = tw(2.0 + g) * num / tw(one_minus_shrink(eps, p.m));
    r.rho_under = tower_sqrt(sq) / tw(p.mu);
    r.rho = tower_max(r.rho_over, r.rho_under);
    const double base = 1.0 / (p.mu * std::sqrt(eps) * std::sqrt(om));
    r.over_lower = base;
    r.over_upper = 4.0 * base;
    const double ro = r.rho_over.to_double();
    r.over_sandwich_ok = r.over_lower <= ro && ro <= r.over_upper;
    return r;
}

/// c = max(1, 2^{5-m} kbar^{1-m} b^alpha)
inline TowerScalar c_constant(const ParamSet& p, const TowerScalar& kbar) {
    return tower_max(tw(1.0), tw(std::pow(2.0, 5.0 - p.m) * std::pow(p.b_const, p.alpha)) * tower_pow(kbar, 1.0 - p.m));
}

struct TimeResult {
    TowerScalar c, t0, t_bar, T_under, T_over, T;
};

inline TimeResult T_eps(const ParamSet& p, double eps, double A, double kappa_star_value, const TowerScalar& kbar) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
    if (!(A >= 0.0)) throw DomainError("A must be >= 0");
    const double om = 1.0 - p.m;
    TimeResult t;
    t.c = c_constant(p, kbar);
    t.t0 = tw(std::pow(A, om));
    t.t_bar = t.c * t.t0;
    t.T_under = tw((kappa_star_value * std::pow(2.0 * A, om) + 2.0 / p.alpha) / one_minus_shrink(eps, p.m));
    t.T_over = tw(2.0) * t.t_bar / tw(grow_minus_one(eps, p.m));
    t.T = tower_max(t.T_under, t.T_over);
    return t;
}

struct LambdaBounds {
    double sup_Q2 = 0.0;        ///< b^d 4^{d/alpha}
    double sup_Q4_k = 0.0;      ///< 32^{1/(1-m)} b^{-alpha/(1-m)}, uniform in k
    double inf_lower = 0.0;     ///< 4^{-1/(1-m)} b^{-alpha/(1-m)} (2^{2/alpha}/b^2 + 64)^{1/(m-1)}
    double lambda0 = 0.0, lambda1 = 0.0;
};

/// lambda from (C * envelope)^{1/(m-1)} = m^{1/(m-1)} lambda^{1/(m-1)}.
inline double lambda_from_envelope(double m, double C, double envelope) { return m * std::pow(C * envelope, m - 1.0); }

/// lambda0 <= lambda1 from the sup and inf of the Barenblatt envelopes.
inline LambdaBounds lambda_from_envelopes(double m, double C_over, double C_under, double sup_env, double inf_env) {
    if (!(C_under > 0.0 && C_over >= C_under)) throw ConfigError("need C_over >= C_under > 0");
    if (!(sup_env > 0.0 && inf_env > 0.0)) throw DomainError("envelopes must be positive");
    LambdaBounds lb;
    lb.lambda0 = lambda_from_envelope(m, C_over, sup_env);
    lb.lambda1 = lambda_from_envelope(m, C_under, inf_env);
    if (lb.lambda0 > lb.lambda1) throw ConfigError("lambda0 > lambda1");
    return lb;
}

/// B(t - 1/alpha, x; k^{alpha/(1-m)} M), the shifted Barenblatt profile with mass scale k.
inline double barenblatt_shifted(const ParamSet& p, double t, double r, double k = 1.0) {
    return barenblatt_time(p, t, r, k);
}

inline LambdaBounds lambda_bounds(const ParamSet& p, double C_over, double C_under) {
    const double om = 1.0 - p.m, b = p.b_const, a = p.alpha, d = p.d;
    const double sup_Q2 = std::pow(b, d) * std::pow(4.0, d / a);
    const double sup_Q4 = std::exp((std::log(32.0) - a * std::log(b)) / om);
    const double inf_lo = std::exp((-std::log(4.0) - a * std::log(b) - std::log(std::pow(2.0, 2.0 / a) / (b * b) + 64.0)) / om);
    LambdaBounds lb = lambda_from_envelopes(p.m, C_over, C_under, std::max(sup_Q2, sup_Q4), inf_lo);
    lb.sup_Q2 = sup_Q2;
    lb.sup_Q4_k = sup_Q4;
    lb.inf_lower = inf_lo;
    return lb;
}

/// sup_x |grad B(1 - 1/alpha, x)|
/// = mu^{d+1}/alpha^{(d+1)/alpha} 2^{1/(m-1)}/sqrt((1-m)(3-m)) ((3-m)/(2-m))^{(2-m)/(1-m)}
inline double barenblatt_gradient_norm(const ParamSet& p) {
    const double m = p.m, om = 1.0 - m, d = p.d;
    return std::exp((d + 1.0) * std::log(p.mu) - (d + 1.0) / p.alpha * std::log(p.alpha) - std::log(2.0) / om -
                    0.5 * std::log(om * (3.0 - m)) + (2.0 - m) / om * std::log((3.0 - m) / (2.0 - m)));
}

/// c2 = 2 max(b, |grad B|_inf)
inline double gradient_c2(const ParamSet& p) { return 2.0 * std::max(p.b_const, barenblatt_gradient_norm(p)); }

struct TwoPowRatio {
    TowerScalar value;
    bool expansion = false;
};

/// 2^nu/(2^nu - 1). Direct while nu is a normal double, otherwise
/// 1/(nu ln 2) + 1/2, whose relative error is below nu ln2 / 12 < nu/2.
inline TwoPowRatio two_pow_ratio(const TowerScalar& nu) {
    if (nu.sign() <= 0) throw DomainError("nu must be positive");
    if (nu.level() == 0) return {tw(-1.0 / std::expm1(-nu.mag() * std::log(2.0))), false};
    return {tw(1.0) / (nu * tw(std::log(2.0))) + tw(0.5), true};
}

inline TowerScalar two_pow_ratio_expansion(const TowerScalar& nu) {
    return tw(1.0) / (nu * tw(std::log(2.0))) + tw(0.5);
}

/// theta = nu / (d + nu)
inline TowerScalar theta_of_nu(int d, const TowerScalar& nu) { return nu / (tw(d) + nu); }

/// Harnack-driven constant K of the inner estimate.
inline TowerScalar mathsf_K(const ParamSet& p, const TowerScalar& nu, const TowerScalar& theta, double C_dnu1,
                            const TowerScalar& kbar, double mass) {
    if (!(C_dnu1 > 0.0)) throw DomainError("C_dnu1 must be positive");
    const double m = p.m, om = 1.0 - m, a = p.alpha, d = p.d;
    // theta is tiny but enters only through exponents and factors of size O(1)
    const double th = theta.to_double();
    const double ln_pref = (3.0 * d / a + (3.0 + 6.0 * a) / (a * om) + th + 10.0) * std::log(2.0) +
                           th * std::log(a + mass) - th * std::log(m) - (2.0 * (1.0 + th) + 2.0 / om) * std::log(om);
    const TowerScalar expo = tw(d) / (tw(d) + nu);  // d/(d+nu)
    const TowerScalar inner = kbar * tw(std::pow(mass, 2.0 / a)) * two_pow_ratio(nu).value + tw(gradient_c2(p));
    const TowerScalar tail = tw(std::pow(p.mu, 2.0 * d) / std::pow(a, d / a)) * tower_pow(tw(mass), expo);
    const TowerScalar bracket = tw(1.0) + tw(std::pow(p.b_const, d) * C_dnu1) * (tower_pow(inner, expo) + tail);
    return TowerScalar::from_log(ln_pref) * bracket;
}

/// a = (alpha/theta)(2-m)/(1-m)
inline TowerScalar a_exponent(const ParamSet& p, const TowerScalar& theta) {
    return tw(p.alpha * (2.0 - p.m) / (1.0 - p.m)) / theta;
}

/// eps/((1+eps)^{1-m} - 1), increasing in eps
inline double inc_factor(double eps, double m) { return eps / grow_minus_one(eps, m); }
/// eps/(1 - (1-eps)^{1-m}), decreasing in eps
inline double dec_factor(double eps, double m) { return eps / one_minus_shrink(eps, m); }

/// A logarithm that is affine in ln(1/eps): constant + coeff * ln(1/eps).
/// Keeping the two parts apart lets eps-powers cancel exactly even when the
/// coefficient is far beyond double resolution of the total.
struct LogAffine {
    TowerScalar constant;
    TowerScalar coeff;
    TowerScalar at(double eps) const { return constant + coeff * tw(-std::log(eps)); }
};
inline LogAffine operator+(const LogAffine& x, const LogAffine& y) { return {x.constant + y.constant, x.coeff + y.coeff}; }

/// ln kappa2 = ln((4 alpha)^{alpha-1} K^{alpha/theta}) + a ln(1/eps)
inline LogAffine log_kappa2(const ParamSet& p, const TowerScalar& K, const TowerScalar& theta) {
    return {tw((p.alpha - 1.0) * std::log(4.0 * p.alpha)) + tw(p.alpha) / theta * tower_log(K), a_exponent(p, theta)};
}

/// ln(eps^a kappa2(eps)), assembled term by term.
inline TowerScalar log_eps_a_kappa2(const ParamSet& p, double eps, const TowerScalar& K, const TowerScalar& theta) {
    const LogAffine eps_pow{TowerScalar::zero(), -a_exponent(p, theta)};
    return (eps_pow + log_kappa2(p, K, theta)).at(eps);
}

/// Same quantity with every term collapsed to a single tower value before
/// adding. Only meaningful while a ln(1/eps) is within double resolution of
/// the total; kept as a cross-check for moderate theta.
inline TowerScalar log_eps_a_kappa2_flat(const ParamSet& p, double eps, const TowerScalar& K, const TowerScalar& theta) {
    return -a_exponent(p, theta) * tw(-std::log(eps)) + log_kappa2(p, K, theta).at(eps);
}

struct SupResult {
    TowerScalar value;
    double argmax = 0.0;
};

/// sup over (lo, hi) of f on a log-spaced grid followed by golden-section refinement.
inline SupResult grid_sup(const std::function<TowerScalar(double)>& f, double lo, double hi, int points = 10000) {
    if (!(lo > 0.0 && hi > lo)) throw DomainError("bad sup interval");
    const double llo = std::log(lo), lhi = std::log(hi);
    int best = 0;
    TowerScalar best_v = f(lo);
    for (int i = 1; i < points; ++i) {
        const double e = std::exp(llo + (lhi - llo) * i / (points - 1));
        const TowerScalar v = f(i == points - 1 ? hi : e);
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    auto at = [&](int i) { return i <= 0 ? lo : (i >= points - 1 ? hi : std::exp(llo + (lhi - llo) * i / (points - 1))); };
    double a = std::log(at(best - 1)), b = std::log(at(best + 1));
    SupResult out{best_v, at(best)};
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    TowerScalar f1 = f(std::exp(x1)), f2 = f(std::exp(x2));
    for (int it = 0; it < 80 && b - a > 1e-14 * std::max(1.0, std::abs(a)); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(std::exp(x2));
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(std::exp(x1));
        }
    }
    for (const auto& [x, v] : {std::pair{x1, f1}, std::pair{x2, f2}})
        if (v > out.value) out = {v, std::exp(x)};
    return out;
}

struct CStarResult {
    SupResult term1;          ///< sup eps kappa1(eps)
    TowerScalar term2;        ///< (4 alpha)^{alpha-1} K^{alpha/theta}, the eps-free value of eps^a kappa2
    SupResult term3;          ///< sup eps kappa3(eps)
    TowerScalar c_star;
    TowerScalar a_exp;
    double eps_lo = 0.0, eps_hi = 0.0;
};

inline CStarResult c_star(const ParamSet& p, double eps_md, const TowerScalar& c, double kappa_star_value,
                          const TowerScalar& K, const TowerScalar& theta, int grid_points = 10000) {
    CStarResult r;
    r.eps_lo = eps_md * 1e-9;
    r.eps_hi = eps_md * (1.0 - 1e-9);
    const double m = p.m;
    const TowerScalar c8 = tw(8.0) * c;
    const double ks = std::pow(2.0, 3.0 - m) * kappa_star_value;
    r.term1 = grid_sup([&](double e) { return tower_max(c8 * tw(inc_factor(e, m)), tw(ks * dec_factor(e, m))); },
                       r.eps_lo, r.eps_hi, grid_points);
    r.term3 = grid_sup([&](double e) { return tw(8.0 / p.alpha * dec_factor(e, m)); }, r.eps_lo, r.eps_hi, grid_points);
    r.a_exp = a_exponent(p, theta);
    r.term2 = tower_exp(tw((p.alpha - 1.0) * std::log(4.0 * p.alpha)) + tw(p.alpha) / theta * tower_log(K));
    r.c_star = tower_max(tower_max(r.term1.value, r.term2), r.term3.value);
    return r;
}

/// t* in structured form: ln t* = ln c* + a ln(1/eps) + ln(1 + A^{1-m} + G^{alpha/2}).
struct TStar {
    TowerScalar log_c_star;
    TowerScalar a_exp;
    double log_inv_eps = 0.0;
    double log_bracket = 0.0;
    TowerScalar log_t_star;
    TowerScalar t_star;
};

inline double t_star_bracket(const ParamSet& p, double A, double G) {
    return 1.0 + std::pow(A, 1.0 - p.m) + std::pow(G, p.alpha / 2.0);
}

inline TStar t_star(const ParamSet& p, const TowerScalar& c_star_value, const TowerScalar& a_exp, double eps, double A,
                    double G) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
    if (!(A >= 0.0 && G >= 0.0)) throw DomainError("A and G must be >= 0");
    TStar t;
    t.log_c_star = tower_log(c_star_value);
    t.a_exp = a_exp;
    t.log_inv_eps = -std::log(eps);
    t.log_bracket = std::log(t_star_bracket(p, A, G));
    t.log_t_star = t.log_c_star + a_exp * tw(t.log_inv_eps) + tw(t.log_bracket);
    t.t_star = tower_exp(t.log_t_star);
    return t;
}

/// Order of two threshold times. When both come from the same constants (c*, a
/// bit-identical) the eps and bracket contributions are compared directly,
/// since their effect on ln t* is far below the resolution of ln c*.
inline int compare_t_star(const TStar& x, const TStar& y) {
    if (x.log_c_star.same_as(y.log_c_star) && x.a_exp.same_as(y.a_exp)) {
        const TowerScalar diff = x.a_exp * tw(x.log_inv_eps - y.log_inv_eps) + tw(x.log_bracket - y.log_bracket);
        return diff.sign();
    }
    return compare(x.log_t_star, y.log_t_star);
}

/// Everything the pipeline computes, kept for tests and the report.
struct ThresholdResult {
    ThresholdInputs inputs;
    double mass = 0.0;
    HarnackConstants harnack;
    SmoothingConstants smoothing;
    PositivityConstants positivity;
    LambdaBounds lambdas;
    TowerScalar log_hbar;
    HolderExponent nu;
    TowerScalar theta;
    double c2_gradient = 0.0;
    TowerScalar K;
    RhoResult rho;
    TimeResult times;
    CStarResult cstar;
    TStar tstar;
    double chi_appendix = 0.0;  ///< m/(266+56m), the alternative chi
};

/// Pipeline constants that do not depend on (eps, A, G).
inline ThresholdResult threshold_constants(const ParamSet& p, const CompanionConstants& cc) {
    ThresholdResult r;
    r.inputs.params = p;
    r.inputs.companion = cc;
    r.mass = barenblatt_mass(p);
    r.harnack = harnack_h(p);
    r.smoothing = smoothing_kappa_bar(p);
    r.positivity = mass_thresholds(p, r.mass, positivity_constants(p, r.smoothing.kbar), cc.M_over);
    r.lambdas = lambda_bounds(p, cc.C_over, cc.C_under);
    r.log_hbar = log_hbar(r.harnack.log_h, r.lambdas.lambda0, r.lambdas.lambda1);
    r.nu = holder_exponent(r.log_hbar);
    r.theta = theta_of_nu(p.d, r.nu.nu);
    r.c2_gradient = gradient_c2(p);
    r.K = mathsf_K(p, r.nu.nu, r.theta, cc.C_dnu1, r.smoothing.kbar, r.mass);
    r.times.c = c_constant(p, r.smoothing.kbar);
    r.cstar = c_star(p, r.positivity.eps_md, r.times.c, r.positivity.kappa_star, r.K, r.theta);
    r.chi_appendix = p.m / (266.0 + 56.0 * p.m);
    return r;
}

/// Largest admissible eps: below eps_md and below chi eta.
inline double eps_admissible_bound(const ThresholdResult& base) {
    return std::min(base.positivity.eps_md, base.inputs.params.chi * base.inputs.params.eta);
}

/// Adds the (eps, A, G)-dependent pieces to precomputed constants.
inline ThresholdResult threshold_for(const ThresholdResult& base, double eps, double A, double G) {
    const ParamSet& p = base.inputs.params;
    if (!(eps > 0.0 && eps < base.positivity.eps_md))
        throw DomainError("eps must lie in (0, eps_md) with eps_md = " + std::to_string(base.positivity.eps_md));
    if (!(eps < p.chi * p.eta)) throw DomainError("eps must be below chi * eta = " + std::to_string(p.chi * p.eta));
    if (!(A >= 0.0 && G >= 0.0)) throw DomainError("A and G must be >= 0");
    ThresholdResult r = base;
    r.inputs.eps = eps;
    r.inputs.A = A;
    r.inputs.G = G;
    r.rho = rho_eps(p, eps, r.positivity.one_minus_eps_under);
    r.times = T_eps(p, eps, A, r.positivity.kappa_star, r.smoothing.kbar);
    r.tstar = t_star(p, r.cstar.c_star, r.cstar.a_exp, eps, A, G);
    return r;
}

inline ThresholdResult run_threshold(const ThresholdInputs& in) {
    return threshold_for(threshold_constants(in.params, in.companion), in.eps, in.A, in.G);
}

// ---------------------------------------------------------------------------
// Reports

inline void add_param_inputs(ConstantReport& rep, const ParamSet& p) {
    rep.inputs["d"] = p.d;
    rep.inputs["m"] = p.m;
    rep.inputs["usage"] = to_string(p.usage);
}

/// Harnack and local-bound constants for (d, m).
inline void append_constants(ConstantReport& rep, const ParamSet& p, const HarnackConstants& h,
                             const SmoothingConstants& s) {
    const char* kin = "K";
    rep.add("K", "Table(table.k.bar)", tw(p.sobolev_K), {"d", "m"});
    rep.add("K_moser", "Table(table.k.bar)", tw(p.sobolev_K_moser), {"d"}, "exponent 8 when d = 1");
    char note[128];
    std::snprintf(note, sizeof note, "partial sum of %d terms; tail <= %.3e", h.sigma.terms, h.sigma.tail_bound);
    rep.add("sigma", "Eq.(sigma)", h.sigma_t, {"d"}, note);
    rep.add("c1_moser", "Eq.(Lem.Moser.constant)", h.c1_moser, {"d", "K_moser"});
    rep.add("c2_log", "Eq.(Lem.Log.Est.Ineq.a)", tw(h.c2_log), {"d"});
    rep.add("c0", "Eq.(c_0)", h.c0, {"d", "K_moser"});
    rep.add("log_h", "Eq.(h)", h.log_h, {"c0", "c2_log", "sigma"},
            h.c0_dominates_c1 ? "c0 >= c1_moser" : "c0 < c1_moser: the simplified form is not an upper bound here");
    rep.add("log_kappa0", "Eq.(proof.Harnack.5)", h.kappa0_log, {"c1_moser", "c2_log", "sigma"});
    rep.add("log_kappa0_under", "Eq.(proof.Harnack.10)", h.kappa0_under_log, {"c1_moser", "c2_log", "sigma"});
    rep.add("xi", "Eq.(kappa)", tw(s.xi), {"d", "m"});
    rep.add("X_aux", "Eq.(kappa)", s.X_aux, {kin});
    rep.add("frakC", "Eq.(goth.C)", s.frakC, {"X_aux", "xi"});
    rep.add("scrC", "Eq.(calligrafic.C)", s.scrC, {"d", "m"});
    rep.add("kbar", "Eq.(kd12)", s.kbar, {"frakC", "scrC"});
    rep.add("k_aux", "Eq.(kappa)", s.k_aux, {"d", "m"});
    rep.add("kbar_via_k", "Eq.(kappa)", s.kbar_via_k, {"k_aux", kin}, "must agree with kbar");
    rep.add("C2", "Eq.(C2)", s.C2, {"kbar"}, s.C2_lower_ok && s.C2_upper_ok ? "within its bracket" : "bracket violated");
    rep.add("C3", "Eq.(C_3)", s.C3, {"d", "m"},
            std::string(s.C3_lower_4d_ok ? "(4d)^d <= C3" : "(4d)^d > C3") +
                (s.C3_lower_16d_ok ? "; 16^d d^d <= C3" : "; 16^d d^d > C3") +
                (s.C3_upper_ok ? "; upper bracket holds" : "; upper bracket violated"));
    rep.add("A_d", "Eq.(AD)", tw(s.A_d), {"d"});
    rep.add("c3_herrero_pierre", "Eq.(C3.constant)", s.c3_hp, {"d", "m"}, "rho0 = 2");
}

inline ConstantReport constants_report(const ParamSet& p) {
    ConstantReport rep;
    add_param_inputs(rep, p);
    const HarnackConstants h = harnack_h(p);
    const SmoothingConstants s = smoothing_kappa_bar(p);
    append_constants(rep, p, h, s);
    const PositivityConstants pc = positivity_constants(p, s.kbar);
    rep.add("kappa_star", "Eq.(kappaExpr-kappastarExpr)", tw(pc.kappa_star), {"d", "m"});
    rep.add("kappa", "Eq.(kappaExpr-kappastarExpr)", pc.kappa, {"kbar"});
    return rep;
}

inline ConstantReport threshold_report(const ThresholdResult& r) {
    const ParamSet& p = r.inputs.params;
    const CompanionConstants& cc = r.inputs.companion;
    ConstantReport rep;
    add_param_inputs(rep, p);
    rep.inputs["eps"] = r.inputs.eps;
    rep.inputs["A"] = r.inputs.A;
    rep.inputs["G"] = r.inputs.G;
    append_constants(rep, p, r.harnack, r.smoothing);

    rep.add("mass", "Barenblatt-mass", tw(r.mass), {"d", "m"});
    rep.add("kappa_star", "Eq.(kappaExpr-kappastarExpr)", tw(r.positivity.kappa_star), {"d", "m"});
    rep.add("kappa", "Eq.(kappaExpr-kappastarExpr)", r.positivity.kappa, {"kbar"});
    rep.add("M_under", "Eq.(SUPPL-underlineM)", r.positivity.M_under, {"kappa", "kappa_star", "mass"});
    rep.add("one_minus_eps_under", "Eq.(SUPPL-underlineM)", r.positivity.one_minus_eps_under, {"M_under", "mass"});
    std::vector<std::string> eps_md_prov = {"one_minus_eps_under"};
    if (cc.M_over) {
        rep.add("M_over", "Eq.(SUPPL-GHP-1)", tw(*cc.M_over), {}, "configured, not derived", true);
        rep.add("eps_over", "Eq.(SUPPL-GHP-1)", tw(*r.positivity.eps_over), {"M_over", "mass"});
        eps_md_prov.push_back("eps_over");
    }
    rep.add("eps_md", "Eq.(SUPPL-epsilon.md.def)", tw(r.positivity.eps_md), eps_md_prov,
            cc.M_over ? "" : "M_over not configured: eps_over omitted from the min");
    rep.add("C_over", "Eq.(lambdas-s)", tw(cc.C_over), {}, "configured, not derived", true);
    rep.add("C_under", "Eq.(lambdas-s)", tw(cc.C_under), {}, "configured, not derived", true);
    rep.add("lambda0", "Eq.(lambdas-s)", tw(r.lambdas.lambda0), {"C_over", "d", "m"});
    rep.add("lambda1", "Eq.(lambdas-s)", tw(r.lambdas.lambda1), {"C_under", "d", "m"});
    rep.add("log_hbar", "Eq.(h-bar)", r.log_hbar, {"log_h", "lambda0", "lambda1"});
    rep.add("nu", "Eq.(SUPPL-nu)", r.nu.nu, {"log_hbar"},
            r.nu.expansion ? "first-order expansion; neglected term <= " + to_string(r.nu.abs_error) : "direct evaluation");
    rep.add("theta", "Eq.(SUPPL-theta)", r.theta, {"nu"});
    rep.add("c2_gradient", "Eq.(SUPPL-gamma-norm-barenblatt)", tw(r.c2_gradient), {"d", "m"});
    rep.add("C_dnu1", "Eq.(SUPPL-interpolation.inequality.cpt6)", tw(cc.C_dnu1), {}, "configured, not derived", true);
    rep.add("K_inner", "Eq.(SUPPL-constant-c-control-radius.suppl.1)", r.K,
            {"nu", "theta", "C_dnu1", "kbar", "mass", "c2_gradient"});
    rep.add("R_at_1", "Eq.(SUPPL-R)", tw(radius_R(1.0, p.alpha)), {"m", "d"});
    rep.add("rho_under", "Eq.(SUPPL-Rbis)", r.rho.rho_under, {"eps", "one_minus_eps_under"});
    rep.add("rho_over", "Eq.(SUPPL-Rter)", r.rho.rho_over, {"eps"},
            r.rho.over_sandwich_ok ? "within its sandwich" : "sandwich violated");
    rep.add("rho", "Eq.(SUPPL-RE)", r.rho.rho, {"rho_under", "rho_over"});
    rep.add("t0", "Eq.(SUPPL-GHP-1-time)", r.times.t0, {"A"});
    rep.add("c_time", "Eq.(SUPPL-toverline)", r.times.c, {"kbar"});
    rep.add("T_under", "Eq.(SUPPL-t1bis)", r.times.T_under, {"kappa_star", "A", "eps"});
    rep.add("T_over", "Eq.(SUPPL-Tter)", r.times.T_over, {"c_time", "t0", "eps"});
    rep.add("T", "Eq.(SUPPL-RE)", r.times.T, {"T_under", "T_over"});
    rep.add("a_exp", "Eq.(t.star.simplified)", r.cstar.a_exp, {"theta"});
    rep.add("sup_eps_kappa1", "Eq.(SUPPL-taustarabstract)", r.cstar.term1.value, {"c_time", "kappa_star", "eps_md"},
            "grid sup; argmax " + std::to_string(r.cstar.term1.argmax));
    rep.add("eps_a_kappa2", "Eq.(SUPPL-taustarabstract)", r.cstar.term2, {"K_inner", "theta"},
            "independent of eps");
    rep.add("sup_eps_kappa3", "Eq.(SUPPL-taustarabstract)", r.cstar.term3.value, {"eps_md"},
            "grid sup; argmax " + std::to_string(r.cstar.term3.argmax));
    rep.add("c_star", "Eq.(SUPPL-taustarabstract)", r.cstar.c_star, {"sup_eps_kappa1", "eps_a_kappa2", "sup_eps_kappa3"});
    rep.add("log_t_star_bracket", "Eq.(t.star.simplified)", tw(r.tstar.log_bracket), {"A", "G"}, "0 when A = G = 0");
    rep.add("log_t_star", "Eq.(t.star.simplified)", r.tstar.log_t_star, {"c_star", "a_exp", "eps", "log_t_star_bracket"});
    rep.add("t_star", "Eq.(t.star.simplified)", r.tstar.t_star, {"log_t_star"});
    return rep;
}

}  // namespace hfd
