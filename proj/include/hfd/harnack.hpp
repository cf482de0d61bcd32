#pragma once

// Explicit constants of the parabolic Harnack inequality for linear equations
// with bounded measurable coefficients, and the Hölder exponent they imply.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "hfd/core_params.hpp"
#include "hfd/errors.hpp"
#include "hfd/lognum.hpp"

namespace hfd {

/// sigma = sum_{j>=0} (3/4)^j ((2+j)(1+j))^{2d+4}.
///
/// The term ratio (3/4)((3+j)/(1+j))^{2d+4} decreases in j, so once it is below
/// one the tail after term j is at most term_j r/(1-r). Terms are accumulated
/// with a common scale so large d does not overflow.
inline SeriesSum sigma_series(int d, double rel_tol = 1e-12) {
    if (d < 1) throw DimensionError("d must be >= 1");
    if (!(rel_tol > 0.0 && rel_tol <= 1e-3)) throw DomainError("rel_tol must lie in (0, 1e-3]");
    const double p = 2.0 * d + 4.0;
    const double l34 = std::log(0.75);
    std::vector<double> logs;
    double run_max = -INFINITY, run_sum = 0.0;  // running sum = exp(run_max) * run_sum
    double log_tail = -INFINITY;
    for (int j = 0;; ++j) {
        const double jj = j;
        const double lt = jj * l34 + p * std::log((2.0 + jj) * (1.0 + jj));
        logs.push_back(lt);
        if (lt > run_max) {
            run_sum = run_sum * std::exp(run_max - lt) + 1.0;
            run_max = lt;
        } else {
            run_sum += std::exp(lt - run_max);
        }
        const double r = 0.75 * std::pow((3.0 + jj) / (1.0 + jj), p);
        if (r < 1.0) {
            log_tail = lt + std::log(r / (1.0 - r));
            const double log_s = run_max + std::log(run_sum);
            if (log_tail <= std::log(rel_tol) + log_s) break;
        }
    }
    // final pass: sum from the smallest terms up for accuracy
    const double lmax = *std::max_element(logs.begin(), logs.end());
    long double acc = 0.0L;
    for (auto it = logs.rbegin(); it != logs.rend(); ++it) acc += std::exp(static_cast<long double>(*it - lmax));
    SeriesSum out;
    out.log_value = lmax + static_cast<double>(std::log(acc));
    out.value = std::exp(out.log_value);
    out.tail_bound = std::exp(log_tail);
    out.terms = static_cast<int>(logs.size());
    return out;
}

/// Moser iteration constant
/// c1 = 3^{g-1} (2^{2g^2+7(g-1)} g^{(g+1)(2g-1)} d^{(g+1)(g-1)} K^{g-1})^{g/(g-1)^2}.
/// K is the interpolation constant for the Moser exponent.
inline TowerScalar moser_c1(const ParamSet& p, double K) {
    const double g = p.gamma_moser, d = p.d;
    const double inner = (2.0 * g * g + 7.0 * (g - 1.0)) * std::log(2.0) + (g + 1.0) * (2.0 * g - 1.0) * std::log(g) +
                         (g + 1.0) * (g - 1.0) * std::log(d) + (g - 1.0) * std::log(K);
    return TowerScalar::from_log((g - 1.0) * std::log(3.0) + g / ((g - 1.0) * (g - 1.0)) * inner);
}
inline TowerScalar moser_c1(const ParamSet& p) { return moser_c1(p, p.sobolev_K_moser); }

/// Constant of the logarithmic estimate: 2^{d+2} 3^d d.
inline double log_estimate_c2(int d) {
    if (d < 1) throw DimensionError("d must be >= 1");
    return std::ldexp(std::pow(3.0, d) * d, d + 2);
}

/// Simplified Moser-type constant
/// c0 = 3^{2/d} 2^{((d+2)(3d^2+18d+24)+13)/(2d)} ((2+d)^{1+4/d^2}/d^{1+2/d^2})^{(d+1)(d+2)} K^{(2d+4)/d}.
inline TowerScalar harnack_c0(int d, double K) {
    const double dd = d;
    const double l = 2.0 / dd * std::log(3.0) +
                     ((dd + 2.0) * (3.0 * dd * dd + 18.0 * dd + 24.0) + 13.0) / (2.0 * dd) * std::log(2.0) +
                     (dd + 1.0) * (dd + 2.0) *
                         ((1.0 + 4.0 / (dd * dd)) * std::log(2.0 + dd) - (1.0 + 2.0 / (dd * dd)) * std::log(dd)) +
                     (2.0 * dd + 4.0) / dd * std::log(K);
    return TowerScalar::from_log(l);
}

/// ln kappa0 = max(2 c2, 8 c1^3 sigma (1-theta)^{-2 beta}).
inline TowerScalar bgm_log_kappa0(double beta, const TowerScalar& c1, double c2, double theta, const TowerScalar& sigma) {
    if (!(theta >= 0.5 && theta < 1.0)) throw DomainError("theta must lie in [1/2, 1)");
    if (!(beta > 0.0) || c1.sign() <= 0 || sigma.sign() <= 0) throw DomainError("beta, c1, sigma must be positive");
    if (!(c2 >= std::exp(-1.0))) throw DomainError("c2 must be >= 1/e");
    const TowerScalar second = tw(8.0) * tower_pow(c1, 3.0) * sigma * tower_pow(tw(1.0 - theta), -2.0 * beta);
    return tower_max(tw(2.0 * c2), second);
}

struct HarnackConstants {
    SeriesSum sigma;
    TowerScalar sigma_t;            ///< sigma as a tower value
    TowerScalar c1_moser;
    double c2_log = 0.0;
    TowerScalar c0;
    TowerScalar log_h;              ///< ln h assembled with c0
    TowerScalar log_h_verbose_c0;   ///< 4 c2 + c0^3 2^{2(d+2)+3}(1 + ...) sigma, must equal log_h
    TowerScalar log_h_verbose_c1;   ///< same with c1 in place of c0
    TowerScalar kappa0_log;         ///< theta = 1/sqrt 2, c1 scaled by 2^{(d+2)/2}
    TowerScalar kappa0_under_log;   ///< theta = 1/2
    TowerScalar log_h_exact_c1;     ///< ln kappa0 + ln kappa0_under, before the max is dropped
    bool c0_dominates_c1 = false;
};

inline TowerScalar assemble_log_h(int d, const TowerScalar& c, double c2, const TowerScalar& sigma) {
    const double dd = d;
    const double geo = 1.0 + std::pow(2.0, dd + 2.0) / std::pow(std::numbers::sqrt2 - 1.0, 2.0 * (dd + 2.0));
    return tw(4.0 * c2) + tower_pow(c, 3.0) * tw(std::pow(2.0, 2.0 * (dd + 2.0) + 3.0) * geo) * sigma;
}

inline HarnackConstants harnack_h(const ParamSet& p, double sigma_tol = 1e-12) {
    HarnackConstants h;
    const int d = p.d;
    h.sigma = sigma_series(d, sigma_tol);
    h.sigma_t = TowerScalar::from_log(h.sigma.log_value);
    h.c1_moser = moser_c1(p);
    h.c2_log = log_estimate_c2(d);
    h.c0 = harnack_c0(d, p.sobolev_K_moser);
    // ln h = 2^{d+4} 3^d d + c0^3 2^{2(d+2)+3} (1 + 2^{d+2}/(sqrt2-1)^{2(d+2)}) sigma
    h.log_h = assemble_log_h(d, h.c0, h.c2_log, h.sigma_t);
    h.log_h_verbose_c0 = assemble_log_h(d, h.c0, h.c2_log, h.sigma_t);
    h.log_h_verbose_c1 = assemble_log_h(d, h.c1_moser, h.c2_log, h.sigma_t);
    const double beta = d + 2.0;
    const TowerScalar c1_scaled = h.c1_moser * tw(std::pow(2.0, 0.5 * (d + 2.0)));
    h.kappa0_log = bgm_log_kappa0(beta, c1_scaled, h.c2_log, 1.0 / std::numbers::sqrt2, h.sigma_t);
    h.kappa0_under_log = bgm_log_kappa0(beta, h.c1_moser, h.c2_log, 0.5, h.sigma_t);
    h.log_h_exact_c1 = h.kappa0_log + h.kappa0_under_log;
    h.c0_dominates_c1 = h.c0 >= h.c1_moser;
    return h;
}

/// ln hbar = (lambda1 + 1/lambda0) ln h.
inline TowerScalar log_hbar(const TowerScalar& log_h, double lambda0, double lambda1) {
    if (!(lambda0 > 0.0)) throw DomainError("lambda0 must be positive");
    if (!(lambda1 >= lambda0)) throw DomainError("lambda1 must be >= lambda0");
    return tw(lambda1 + 1.0 / lambda0) * log_h;
}

struct HolderExponent {
    TowerScalar nu;
    TowerScalar abs_error;  ///< bound on the neglected expansion term (zero when evaluated directly)
    bool expansion = false;
};

/// nu = -log_4(1 - 1/hbar), from ln hbar.
///
/// Direct evaluation while 1/hbar is a normal double; beyond that
/// ln nu = -ln hbar - ln ln 4, neglecting at most x^2/(2 ln 4), x = 1/hbar.
inline HolderExponent holder_exponent(const TowerScalar& log_hbar_value) {
    const double ln4 = std::log(4.0);
    if (log_hbar_value < tw(std::log(4.0 / 3.0) - 4e-16)) throw DomainError("hbar must be >= 4/3");
    HolderExponent out;
    if (log_hbar_value.level() == 0 && log_hbar_value.mag() <= 700.0) {
        const double x = std::exp(-log_hbar_value.to_double());
        out.nu = tw(std::min(1.0, -std::log1p(-x) / ln4));
        return out;
    }
    out.expansion = true;
    out.nu = tower_exp(-(log_hbar_value + tw(std::log(ln4))));
    out.abs_error = tower_exp(-(tw(2.0) * log_hbar_value + tw(std::log(2.0 * ln4))));
    return out;
}

inline HolderExponent holder_exponent_of_hbar(double hbar) {
    if (!(hbar >= 4.0 / 3.0)) throw DomainError("hbar must be >= 4/3");
    return holder_exponent(tw(std::log(hbar)));
}

/// Space-time cylinder (t_lo, t_hi) x (B_radius(center) \ B_inner(center)).
struct Cylinder {
    double t_lo = 0.0, t_hi = 0.0;
    std::vector<double> center;
    double radius = 0.0;
    double inner_radius = 0.0;
};

/// inf over (t,x) in Q1 and (s,y) on the parabolic boundary of Q2 of |x-y| + |t-s|^{1/2}.
inline double parabolic_distance(const Cylinder& q1, const Cylinder& q2) {
    if (q1.center.size() != q2.center.size()) throw GeometryError("cylinder centers differ in dimension");
    if (!(q1.t_lo < q1.t_hi) || !(q2.t_lo < q2.t_hi)) throw GeometryError("empty time interval");
    if (!(q1.radius > q1.inner_radius) || !(q2.radius > q2.inner_radius)) throw GeometryError("empty spatial section");
    double off = 0.0;
    for (std::size_t i = 0; i < q1.center.size(); ++i) off += (q1.center[i] - q2.center[i]) * (q1.center[i] - q2.center[i]);
    off = std::sqrt(off);
    const bool annular = q1.inner_radius > 0.0 || q2.inner_radius > 0.0;
    if (annular && off > 0.0) throw GeometryError("annular cylinders must be concentric");
    const bool nested_t = q2.t_lo <= q1.t_lo && q1.t_hi <= q2.t_hi;
    const bool nested_x = off + q1.radius <= q2.radius && q1.inner_radius >= q2.inner_radius;
    if (!nested_t || !nested_x) throw GeometryError("Q1 is not contained in Q2");
    double space = q2.radius - off - q1.radius;
    if (q2.inner_radius > 0.0) space = std::min(space, q1.inner_radius - q2.inner_radius);
    const double bottom = std::sqrt(q1.t_lo - q2.t_lo);
    const double top = std::sqrt(q2.t_hi - q1.t_hi);
    return std::min({space, bottom, top});
}

/// 2 (128/dist)^nu sup_norm
inline TowerScalar holder_bound(const TowerScalar& nu, double dist, double sup_norm) {
    if (!(dist > 0.0)) throw DomainError("parabolic distance must be positive");
    return tw(2.0 * sup_norm) * tower_pow(tw(128.0 / dist), nu);
}

}  // namespace hfd
