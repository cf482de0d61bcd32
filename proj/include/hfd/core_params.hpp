#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "hfd/errors.hpp"
#include "hfd/special.hpp"

namespace hfd {

/// Which family of results a parameter set is meant for. Each one admits a
/// different range of the exponent m.
enum class Usage {
    FdeBounds,  ///< local bounds for the fast diffusion equation: m in (m1, 1), i.e. (0, 1) when d = 1
    Entropy,    ///< entropy methods: m in (m1, 1), and m in (1/3, 1) when d = 1
    Threshold,  ///< threshold-time pipeline: same range as Entropy
};

inline const char* to_string(Usage u) {
    switch (u) {
        case Usage::FdeBounds: return "fde-bounds";
        case Usage::Entropy: return "entropy";
        case Usage::Threshold: return "threshold";
    }
    return "?";
}

/// Dimension / exponent bundle with every derived scalar parameter.
struct ParamSet {
    int d = 0;
    double m = 0.0;
    double m1 = 0.0;              ///< (d-1)/d
    double mc = 0.0;              ///< (d-2)/d
    double alpha = 0.0;           ///< 2 - d(1-m)
    double mu = 0.0;              ///< ((1-m)/(2m))^(1/alpha)
    double b_const = 0.0;         ///< ((1-m)/(2 m alpha))^(1/alpha)
    double gamma_moser = 0.0;     ///< (d+2)/d for d >= 3, 5/3 otherwise
    double beta_smoothing = 0.0;  ///< 2 - 2 q (1-m)
    double q_exp = 0.0;           ///< conjugate exponent of p_m / 2
    double p_m = 0.0;             ///< Sobolev-type exponent used by the smoothing estimate
    double p_moser = 0.0;         ///< exponent used by the Moser iteration (8 when d = 1)
    double eta = 0.0;             ///< 2d(m - m1)
    double chi = 0.0;             ///< 1/322 for d >= 2, m/(266+56m) for d = 1
    double omega_d = 0.0;         ///< |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2)
    double sobolev_K = 0.0;       ///< interpolation constant with exponent p_m
    double sobolev_K_moser = 0.0; ///< interpolation constant with exponent p_moser
    Usage usage = Usage::Threshold;
};

struct SeriesSum {
    double value = 0.0;       ///< partial sum (may be +inf for very large d; see log_value)
    double log_value = 0.0;   ///< ln of the partial sum
    double tail_bound = 0.0;  ///< bound on the neglected tail
    int terms = 0;            ///< number of terms summed
};

/// Surface area of the unit sphere in R^d.
inline double omega(int d) {
    if (d < 1) throw DimensionError("d must be >= 1, got " + std::to_string(d));
    return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / gamma_fn(0.5 * d);
}

/// Interpolation constant K for the exponent p, in the form valid for d = 1:
/// 2^{1+2/p} max((p-2)/pi^2, 1/4). For d >= 2 it does not depend on p.
inline double sobolev_constant_p(int d, double p) {
    using std::numbers::pi;
    if (d < 1) throw DimensionError("d must be >= 1, got " + std::to_string(d));
    if (d >= 3) return (2.0 / pi) * std::pow(gamma_fn(0.5 * d + 1.0), 2.0 / d);
    if (d == 2) return 2.0 / std::sqrt(pi);
    return std::pow(2.0, 1.0 + 2.0 / p) * std::max((p - 2.0) / (pi * pi), 0.25);
}

/// Interpolation constant K with the exponent p_m of the smoothing estimate.
/// For d = 1 this is 2^{1+m/2} max(2(2-m)/(m pi^2), 1/4).
inline double sobolev_constant(int d, double m) {
    if (d < 1) throw DimensionError("d must be >= 1, got " + std::to_string(d));
    if (d == 1) {
        if (!(m > 0.0)) throw RangeError("m must be positive");
        return sobolev_constant_p(1, 4.0 / m);
    }
    return sobolev_constant_p(d, 0.0);
}

/// Lower end of the admitted m-interval (open) for a usage profile.
inline double admitted_m_lower(int d, Usage usage) {
    const double m1 = static_cast<double>(d - 1) / d;
    if (d == 1 && usage != Usage::FdeBounds) return 1.0 / 3.0;
    return m1;
}

inline ParamSet derive_params(int d, double m, Usage usage = Usage::Threshold) {
    using std::numbers::pi;
    if (d < 1) throw DimensionError("d must be >= 1, got " + std::to_string(d));
    const double lo = admitted_m_lower(d, usage);
    if (!(m > lo && m < 1.0))
        throw RangeError("m = " + std::to_string(m) + " outside (" + std::to_string(lo) + ", 1) for d = " +
                         std::to_string(d) + " and usage " + to_string(usage));
    ParamSet p;
    p.d = d;
    p.m = m;
    p.usage = usage;
    const double dd = d;
    p.m1 = (dd - 1.0) / dd;
    p.mc = (dd - 2.0) / dd;
    p.alpha = 2.0 - dd * (1.0 - m);
    p.mu = std::pow((1.0 - m) / (2.0 * m), 1.0 / p.alpha);
    p.b_const = std::pow((1.0 - m) / (2.0 * m * p.alpha), 1.0 / p.alpha);
    p.gamma_moser = d >= 3 ? (dd + 2.0) / dd : 5.0 / 3.0;
    if (d >= 3) {
        p.p_m = 2.0 * dd / (dd - 2.0);
        p.q_exp = dd / 2.0;
        p.p_moser = p.p_m;
    } else if (d == 2) {
        p.p_m = 4.0;
        p.q_exp = 2.0;
        p.p_moser = 4.0;
    } else {
        p.p_m = 4.0 / m;
        p.q_exp = 2.0 / (2.0 - m);
        p.p_moser = 8.0;
    }
    p.beta_smoothing = 2.0 - 2.0 * p.q_exp * (1.0 - m);
    p.eta = 2.0 * dd * (m - p.m1);
    p.chi = d >= 2 ? 1.0 / 322.0 : m / (266.0 + 56.0 * m);
    p.omega_d = omega(d);
    p.sobolev_K = sobolev_constant(d, m);
    p.sobolev_K_moser = sobolev_constant_p(d, p.p_moser);
    return p;
}

/// Table form of beta: alpha for d >= 3, 2(alpha-1) for d = 2, 2m/(2-m) for d = 1.
inline double beta_table(const ParamSet& p) {
    if (p.d >= 3) return p.alpha;
    if (p.d == 2) return 2.0 * (p.alpha - 1.0);
    return 2.0 * p.m / (2.0 - p.m);
}

/// Mass of the static profile (1+|x|^2)^{1/(m-1)}, finite iff m > mc.
inline double barenblatt_mass(const ParamSet& p) {
    const double s = 1.0 / (1.0 - p.m);
    const double h = 0.5 * p.d;
    if (!(s > h)) throw DomainError("Barenblatt profile has infinite mass for m <= mc");
    // omega_d/2 * B(d/2, s - d/2)
    return 0.5 * p.omega_d * std::exp(log_gamma(h) + log_gamma(s - h) - log_gamma(s));
}

/// Static profile (1+r^2)^{1/(m-1)}.
inline double barenblatt_static(const ParamSet& p, double r) { return std::exp(std::log1p(r * r) / (p.m - 1.0)); }

/// Self-similar solution of u_t = Delta u^m in the time variable t:
/// t^{1/(1-m)} b^{-alpha/(1-m)} (t^{2/alpha}/(k^2 b^2) + r^2)^{1/(m-1)}.
/// Its mass is k^{alpha/(1-m)} times the mass of the static profile.
inline double barenblatt_time(const ParamSet& p, double t, double r, double k = 1.0) {
    if (!(t > 0.0)) throw DomainError("t must be positive");
    if (!(k > 0.0)) throw DomainError("mass scale must be positive");
    const double om = 1.0 - p.m, b = p.b_const;
    return std::exp(std::log(t) / om - p.alpha / om * std::log(b) -
                    std::log(std::pow(t, 2.0 / p.alpha) / (k * k * b * b) + r * r) / om);
}

}  // namespace hfd
