#pragma once

// Constants of the local estimates for the fast diffusion equation:
// mass displacement (Herrero-Pierre), local smoothing, positivity, and the
// mass thresholds derived from them.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "hfd/core_params.hpp"
#include "hfd/errors.hpp"
#include "hfd/lognum.hpp"

namespace hfd {

/// c3 = 2^{m/(1-m)} omega_d (16(d+1)(3+m)/(1-m))^{1/(1-m)} (rho0 + 1)
inline TowerScalar herrero_pierre_c3(const ParamSet& p, double rho0) {
    if (!(rho0 > 0.0)) throw DomainError("rho0 must be positive");
    if (!(p.m > 0.0 && p.m < 1.0)) throw RangeError("m must lie in (0, 1)");
    const double m = p.m, om = 1.0 - m, d = p.d;
    const double l = m / om * std::log(2.0) + std::log(p.omega_d) +
                     std::log(16.0 * (d + 1.0) * (3.0 + m) / om) / om + std::log1p(rho0);
    return TowerScalar::from_log(l);
}

/// Exponent r^{-(2-d(1-m))/(1-m)} paired with c3.
inline double herrero_pierre_radius_exponent(const ParamSet& p) { return p.alpha / (1.0 - p.m); }

/// S = sum_{j>=0} log(j+1) rho^j, 0 < rho < 1, summed until the geometric tail
/// bound falls below rel_tol * S.
inline SeriesSum log_weighted_series(double rho, double rel_tol = 1e-15) {
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("ratio must lie in (0, 1)");
    SeriesSum out;
    long double s = 0.0L;
    double tail = INFINITY;
    for (int j = 1;; ++j) {  // j = 0 term is log 1 = 0
        const double term = std::log(j + 1.0) * std::pow(rho, j);
        s += term;
        // term ratio rho log(j+2)/log(j+1) decreases in j
        const double r = rho * std::log(j + 2.0) / std::log(j + 1.0);
        if (r < 1.0) {
            tail = term * r / (1.0 - r);
            if (tail <= rel_tol * static_cast<double>(s)) {
                out.terms = j + 1;
                break;
            }
        }
        if (j > 10000000) throw ToleranceError("log-weighted series did not converge");
    }
    out.value = static_cast<double>(s);
    out.log_value = std::log(out.value);
    out.tail_bound = tail;
    return out;
}

struct SmoothingConstants {
    double beta = 0.0, q = 0.0, K = 0.0;
    double xi = 0.0;                ///< (2/3)^{beta/(4(q+1))}
    SeriesSum log_series;           ///< sum_{j>=0} log(j+1) (q/(q+1))^j
    TowerScalar X_aux;
    TowerScalar frakC;              ///< 4 (38/(1-xi)^2)^{2(q+1)/beta} X
    TowerScalar scrC;               ///< 2^{m/(1-m)} 3 omega_d [16(d+1)(3+m)/(1-m)]^{1/(1-m)}
    TowerScalar bracket;            ///< 2^{m/(1-m)} + (1-m)/(2-m) scrC + (2/3)^d omega_d/d
    TowerScalar kbar;               ///< frakC * bracket^{2/beta}
    TowerScalar a_aux, b_aux;       ///< the two auxiliary constants of the k^beta display
    TowerScalar k_aux;              ///< k with k^beta given by the closed display
    TowerScalar kbar_via_k;         ///< k * K^{2q/beta}, same quantity through the other route
    TowerScalar C2, C3;
    double A_d = 0.0;
    TowerScalar c3_hp;              ///< Herrero-Pierre c3 with rho0 = 2
    // bracket checks
    bool C2_lower_ok = false, C2_upper_ok = false;
    bool C3_lower_4d_ok = false, C3_lower_16d_ok = false, C3_upper_ok = false;
    bool rmax_condition_ok = false;     ///< 32 d >= 2^{(d-1)/d} - 1
    bool rmax_constants_ok = false;     ///< same lower bound from the actual C2, C3
};

/// A_d = omega_d 4^{d-1}
inline double aleksandrov_Ad(int d) { return omega(d) * std::pow(4.0, d - 1); }

inline SmoothingConstants smoothing_kappa_bar(const ParamSet& p) {
    SmoothingConstants s;
    const double d = p.d, m = p.m, om = 1.0 - m;
    const double beta = p.beta_smoothing, q = p.q_exp, K = p.sobolev_K;
    if (!(beta > 0.0)) throw RangeError("beta must be positive");
    s.beta = beta;
    s.q = q;
    s.K = K;
    const double ln2 = std::log(2.0), lnpi = std::log(std::numbers::pi);
    s.xi = std::pow(2.0 / 3.0, beta / (4.0 * (q + 1.0)));
    const double rho = q / (q + 1.0);
    s.log_series = log_weighted_series(rho);
    const double S = s.log_series.value;

    // X = beta/(beta+2) (4/(beta+2))^{2/beta} K^{2q/beta} (pi^q e^{sum_{j>=1} rho^j log j})^{8(q+1)/(q beta)}
    // and sum_{j>=1} rho^j log j = rho S.
    const double lnX = std::log(beta / (beta + 2.0)) + 2.0 / beta * std::log(4.0 / (beta + 2.0)) +
                       2.0 * q / beta * std::log(K) + 8.0 * (q + 1.0) / (q * beta) * (q * lnpi + rho * S);
    s.X_aux = TowerScalar::from_log(lnX);
    const double one_minus_xi = -std::expm1(beta / (4.0 * (q + 1.0)) * std::log(2.0 / 3.0));
    s.frakC = TowerScalar::from_log(std::log(4.0) + 2.0 * (q + 1.0) / beta * (std::log(38.0) - 2.0 * std::log(one_minus_xi)) + lnX);

    const double ln_hp = std::log(16.0 * (d + 1.0) * (3.0 + m) / om) / om;  // ln [16(d+1)(3+m)/(1-m)]^{1/(1-m)}
    s.scrC = TowerScalar::from_log(m / om * ln2 + std::log(3.0) + std::log(p.omega_d) + ln_hp);
    s.bracket = TowerScalar::from_log(m / om * ln2) + tw(om / (2.0 - m)) * s.scrC +
                tw(std::pow(2.0 / 3.0, d) * p.omega_d / d);
    s.kbar = s.frakC * tower_pow(s.bracket, 2.0 / beta);

    // k^beta = (4beta/(beta+2))^beta (4/(beta+2))^2 pi^{8(q+1)} e^{8 S} 2^{2m/(1-m)} (1 + a omega_d)^2 b
    s.a_aux = TowerScalar::from_log(std::log(3.0) + std::log(16.0 * (d + 1.0) * (3.0 + m)) / om - std::log(2.0 - m) -
                                    m / om * std::log(om)) +
              TowerScalar::from_log((d - m * (d + 1.0)) / om * ln2 - d * std::log(3.0) - std::log(d));
    s.b_aux = TowerScalar::from_log(2.0 * (q + 1.0) * std::log(38.0) - 4.0 * (q + 1.0) * std::log(one_minus_xi));
    const TowerScalar k_beta = tw(std::pow(4.0 * beta / (beta + 2.0), beta) * std::pow(4.0 / (beta + 2.0), 2.0)) *
                               TowerScalar::from_log(8.0 * (q + 1.0) * lnpi + 8.0 * S + 2.0 * m / om * ln2) *
                               tower_pow(tw(1.0) + s.a_aux * tw(p.omega_d), 2.0) * s.b_aux;
    s.k_aux = tower_pow(k_beta, 1.0 / beta);
    s.kbar_via_k = s.k_aux * tw(std::pow(K, 2.0 * q / beta));

    // positivity-proof constants
    s.C2 = tw(std::pow(2.0, d)) * tower_max(tw(1.0), s.kbar * tw(p.omega_d / d));
    s.C3 = TowerScalar::from_log(std::log(16.0 / om) / om) *
           tower_max(tw(1.0), TowerScalar::from_log(std::log(2.0 * p.omega_d) + ln_hp));
    s.A_d = aleksandrov_Ad(p.d);
    s.c3_hp = herrero_pierre_c3(p, 2.0);

    const double pi = std::numbers::pi;
    s.C2_lower_ok = s.C2 >= tw(std::pow(2.0, d));
    s.C2_upper_ok = s.C2 <= tw(std::pow(2.0, d) * pi * pi) * s.kbar;
    s.C3_lower_4d_ok = s.C3 >= TowerScalar::from_log(d * std::log(4.0 * d));
    s.C3_lower_16d_ok = s.C3 >= TowerScalar::from_log(d * std::log(16.0 * d));
    s.C3_upper_ok = s.C3 <= TowerScalar::from_log(2.0 / om * std::log(128.0 * d / om) + std::log(4.0 * pi * pi * pi));
    const double target = std::pow(2.0, (d - 1.0) / d) - 1.0;
    s.rmax_condition_ok = 32.0 * d >= target;
    const TowerScalar lhs = TowerScalar::from_log(2.0 * om / p.alpha * std::log(2.0 / (d * om))) *
                            tower_pow(tw(2.0 / p.alpha) * s.C2, 1.0 / d) * tower_pow(s.C3, 2.0 / (d * p.alpha));
    s.rmax_constants_ok = lhs >= tw(target);
    return s;
}

/// kappa_star = 2^{3 alpha + 2} d^alpha
inline double kappa_star(const ParamSet& p) { return std::pow(2.0, 3.0 * p.alpha + 2.0) * std::pow(p.d, p.alpha); }

/// ln kappa = ln alpha + ln omega_d + 2/((1-m)^2 alpha d) [4 ln(1-m) - 38 ln 2 - 4 ln d - 16 (1-m) alpha ln pi - alpha^2 (1-m) ln kbar]
inline TowerScalar log_kappa(const ParamSet& p, const TowerScalar& kbar) {
    if (kbar.sign() <= 0) throw DomainError("kbar must be positive");
    const double om = 1.0 - p.m, a = p.alpha, d = p.d;
    const TowerScalar inner = tw(4.0 * std::log(om) - 38.0 * std::log(2.0) - 4.0 * std::log(d) -
                                 16.0 * om * a * std::log(std::numbers::pi)) -
                              tw(a * a * om) * tower_log(kbar);
    return tw(std::log(a) + std::log(p.omega_d)) + tw(2.0 / (om * om * a * d)) * inner;
}

struct PositivityConstants {
    TowerScalar log_kappa_value;
    TowerScalar kappa;
    double kappa_star = 0.0;
    double mass = 0.0;
    TowerScalar M_under;
    TowerScalar log_M_under_ratio;      ///< ln(M_under / mass) < 0
    TowerScalar one_minus_eps_under;    ///< (M_under/mass)^{2/alpha}
    double eps_under = 0.0;             ///< 1 - (M_under/mass)^{2/alpha}, rounded to double
    std::optional<double> M_over;
    std::optional<double> eps_over;     ///< (M_over/mass)^{2/alpha} - 1 when M_over is configured
    double eps_md = 0.0;                ///< min(eps_over, eps_under, 1/2) over the available entries
};

inline PositivityConstants positivity_constants(const ParamSet& p, const TowerScalar& kbar) {
    PositivityConstants out;
    out.log_kappa_value = log_kappa(p, kbar);
    out.kappa = tower_exp(out.log_kappa_value);
    out.kappa_star = kappa_star(p);
    return out;
}

/// Fills M_under, eps_under, eps_over and eps_md.
inline PositivityConstants mass_thresholds(const ParamSet& p, double mass, PositivityConstants pc,
                                           std::optional<double> M_over) {
    if (!(mass > 0.0)) throw DomainError("mass must be positive");
    const double om = 1.0 - p.m, a = p.alpha, d = p.d;
    const TowerScalar& lk = pc.log_kappa_value;
    // two candidates for the min, in log form
    const TowerScalar first = tw(-0.5 * d * std::log(2.0)) + tw(0.5 * a) * (lk - tw(d * std::log(p.b_const)));
    const TowerScalar second = lk - tw(0.5 * d * std::log(d * om) + a / (2.0 * om) * std::log(a));
    const TowerScalar log_M = tower_min(first, second) + tw(std::log(pc.kappa_star) / om + 2.0 * std::log(mass));
    pc.mass = mass;
    pc.M_under = tower_exp(log_M);
    pc.log_M_under_ratio = log_M - tw(std::log(mass));
    if (pc.log_M_under_ratio.sign() >= 0) throw ConfigError("M_under / mass >= 1: inconsistent kappa, kappa_star");
    const TowerScalar l = tw(2.0 / a) * pc.log_M_under_ratio;
    pc.one_minus_eps_under = tower_exp(l);
    pc.eps_under = l.level() == 0 ? -std::expm1(l.to_double()) : 1.0 - pc.one_minus_eps_under.to_double();
    pc.M_over = M_over;
    pc.eps_md = std::min(pc.eps_under, 0.5);
    if (M_over) {
        if (!(*M_over > mass)) throw ConfigError("M_over must exceed the mass of the Barenblatt profile");
        pc.eps_over = std::expm1(2.0 / a * std::log(*M_over / mass));
        pc.eps_md = std::min(pc.eps_md, *pc.eps_over);
    } else {
        pc.eps_over.reset();
    }
    return pc;
}

}  // namespace hfd
