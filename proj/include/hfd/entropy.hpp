#pragma once

// Barenblatt profiles, the nonlinear and linearized entropy functionals by
// radial quadrature, and the improved entropy / entropy-production check in a
// relative-error tube around the Barenblatt profile.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hfd/core_params.hpp"
#include "hfd/errors.hpp"

namespace hfd {

/// Radial grid with one sample per node. Nodes start at r = 0 and increase.
struct RadialField {
    int d = 0;
    std::vector<double> r;
    std::vector<double> values;
    bool allow_negative = false;

    static RadialField nonnegative(int d, std::vector<double> r, std::vector<double> v) {
        RadialField f{d, std::move(r), std::move(v), false};
        f.validate();
        return f;
    }
    static RadialField signed_field(int d, std::vector<double> r, std::vector<double> v) {
        RadialField f{d, std::move(r), std::move(v), true};
        f.validate();
        return f;
    }

    std::size_t size() const { return r.size(); }

    void validate() const {
        if (d < 1) throw DimensionError("d must be >= 1");
        if (r.size() != values.size()) throw ConfigError("grid and values differ in length");
        if (r.size() < 17) throw ConfigError("need at least 16 intervals");
        if (r[0] != 0.0) throw ConfigError("grid must start at r = 0");
        for (std::size_t i = 1; i < r.size(); ++i)
            if (!(r[i] > r[i - 1])) throw ConfigError("grid must be strictly increasing");
        for (double v : values) {
            if (!std::isfinite(v)) throw ConfigError("non-finite sample");
            if (!allow_negative && v < 0.0) throw ConfigError("negative sample in a nonnegative field");
        }
    }

    /// CSV with header "r,value".
    std::string to_csv() const {
        std::ostringstream os;
        os.precision(17);
        os << "r,value\n";
        for (std::size_t i = 0; i < r.size(); ++i) os << r[i] << ',' << values[i] << '\n';
        return os.str();
    }

    static RadialField from_csv(int d, const std::string& text, bool allow_negative = false) {
        std::istringstream is(text);
        std::string line;
        if (!std::getline(is, line) || line.rfind("r,value", 0) != 0) throw ConfigError("CSV header must be r,value");
        std::vector<double> r, v;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            const auto comma = line.find(',');
            if (comma == std::string::npos) throw ConfigError("malformed CSV line: " + line);
            try {
                r.push_back(std::stod(line.substr(0, comma)));
                v.push_back(std::stod(line.substr(comma + 1)));
            } catch (const std::exception&) {
                throw ConfigError("malformed CSV line: " + line);
            }
        }
        return allow_negative ? signed_field(d, std::move(r), std::move(v)) : nonnegative(d, std::move(r), std::move(v));
    }

    static RadialField read_csv(int d, const std::string& path, bool allow_negative = false) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return from_csv(d, ss.str(), allow_negative);
    }
};

// ---------------------------------------------------------------------------
// Barenblatt profiles

/// Static profile, or the self-similar solution at time t with mass scale k.
inline double barenblatt(const ParamSet& p, double r, std::optional<double> t = std::nullopt,
                         std::optional<double> k = std::nullopt) {
    if (!t) return barenblatt_static(p, r);
    return barenblatt_time(p, *t, r, k.value_or(1.0));
}

/// Exponent e of the tail: B^m r^{d-1} ~ r^{-e-1}. Positive iff m > d/(d+2).
inline double tail_exponent(const ParamSet& p) { return 2.0 * p.m / (1.0 - p.m) - p.d; }

/// Upper bound for omega_d * int_R^inf B^m r^{d-1} dr.
inline double barenblatt_m_tail(const ParamSet& p, double R) {
    const double e = tail_exponent(p);
    if (!(e > 0.0)) throw DecayError("B^m is not integrable for m <= d/(d+2)");
    return p.omega_d * std::pow(R, -e) / e;
}

/// Radius where the B^m tail drops below tol, clamped to [50, 1e6].
inline double tail_radius(const ParamSet& p, double tol) {
    const double e = tail_exponent(p);
    if (!(e > 0.0)) throw DecayError("B^m is not integrable for m <= d/(d+2)");
    return std::clamp(std::pow(tol * e / p.omega_d, -1.0 / e), 50.0, 1e6);
}

/// r_j = sinh(B j / N) with B = asinh(r_max): fine near the origin,
/// geometric far out. N is rounded up to a multiple of 4 so the grid can be
/// halved twice.
inline std::vector<double> make_grid(double r_max, int intervals) {
    if (!(r_max > 0.0)) throw DomainError("r_max must be positive");
    if (intervals < 16) throw ConfigError("need at least 16 intervals");
    intervals = (intervals + 3) / 4 * 4;
    const double B = std::asinh(r_max);
    std::vector<double> r(intervals + 1);
    for (int j = 0; j <= intervals; ++j) r[j] = std::sinh(B * j / intervals);
    r.back() = r_max;
    return r;
}

inline std::vector<double> make_entropy_grid(const ParamSet& p, int intervals = 4096, double tail_tol = 1e-10) {
    return make_grid(tail_radius(p, tail_tol), intervals);
}

inline RadialField sample(const ParamSet& p, const std::vector<double>& r, const std::function<double(double)>& f,
                          bool allow_negative = false) {
    std::vector<double> v(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) v[i] = f(r[i]);
    return allow_negative ? RadialField::signed_field(p.d, r, std::move(v)) : RadialField::nonnegative(p.d, r, std::move(v));
}

inline RadialField barenblatt_field(const ParamSet& p, const std::vector<double>& r) {
    return sample(p, r, [&](double x) { return barenblatt_static(p, x); });
}

// ---------------------------------------------------------------------------
// Quadrature on a radial grid

/// Value with an a-posteriori error estimate.
struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

/// omega_d int f r^{d-1} dr by the trapezoid rule on every stride-th node.
inline double radial_trapezoid(int d, double omega_d, const std::vector<double>& r, const std::vector<double>& f,
                               int stride = 1) {
    const std::size_t n = r.size() - 1;
    if (n % stride != 0) throw ConfigError("stride must divide the number of intervals");
    long double s = 0.0L;
    double prev = f[0] * std::pow(r[0], d - 1);
    for (std::size_t i = stride; i <= n; i += stride) {
        const double cur = f[i] * std::pow(r[i], d - 1);
        s += 0.5L * (r[i] - r[i - stride]) * (prev + cur);
        prev = cur;
    }
    return omega_d * static_cast<double>(s);
}

/// Derivative on every stride-th node: three-point formulas for uneven
/// spacing, zero at the origin (radial symmetry), one-sided at the far end.
/// The result is indexed by the sub-grid.
inline std::vector<double> radial_derivative(const std::vector<double>& r, const std::vector<double>& f, int stride = 1) {
    const std::size_t n = (r.size() - 1) / stride;
    std::vector<double> df(n + 1, 0.0);
    auto R = [&](std::size_t k) { return r[k * stride]; };
    auto F = [&](std::size_t k) { return f[k * stride]; };
    for (std::size_t k = 1; k < n; ++k) {
        const double h1 = R(k) - R(k - 1), h2 = R(k + 1) - R(k);
        df[k] = -h2 / (h1 * (h1 + h2)) * F(k - 1) + (h2 - h1) / (h1 * h2) * F(k) + h1 / (h2 * (h1 + h2)) * F(k + 1);
    }
    const double h1 = R(n - 1) - R(n - 2), h2 = R(n) - R(n - 1);
    df[n] = h2 / (h1 * (h1 + h2)) * F(n - 2) - (h1 + h2) / (h1 * h2) * F(n - 1) + (h1 + 2 * h2) / (h2 * (h1 + h2)) * F(n);
    return df;
}

/// Integral of an integrand that is rebuilt on the full and the halved grid;
/// the error is the Richardson estimate |I_h - I_2h|/3 plus a rounding floor.
inline Estimate richardson(int d, double omega_d, const std::vector<double>& r,
                           const std::function<std::vector<double>(int stride)>& integrand_on) {
    const std::vector<double> f1 = integrand_on(1);
    const std::vector<double> f2 = integrand_on(2);
    std::vector<double> f2_full(r.size(), 0.0);
    for (std::size_t k = 0; k < f2.size(); ++k) f2_full[2 * k] = f2[k];
    const double i1 = radial_trapezoid(d, omega_d, r, f1, 1);
    const double i2 = radial_trapezoid(d, omega_d, r, f2_full, 2);
    std::vector<double> absf(f1.size());
    for (std::size_t i = 0; i < f1.size(); ++i) absf[i] = std::abs(f1[i]);
    const double scale = radial_trapezoid(d, omega_d, r, absf, 1);
    return {i1, std::abs(i1 - i2) / 3.0 + 1e-13 * scale};
}

inline std::vector<double> subsample(const std::vector<double>& x, int stride) {
    std::vector<double> out;
    out.reserve(x.size() / stride + 1);
    for (std::size_t i = 0; i < x.size(); i += stride) out.push_back(x[i]);
    return out;
}

/// omega_d int f r^{d-1} with Richardson error.
inline Estimate integrate(const RadialField& f, const ParamSet& p) {
    return richardson(p.d, p.omega_d, f.r, [&](int s) { return subsample(f.values, s); });
}

// ---------------------------------------------------------------------------
// Functionals

/// ((1+w)^m - 1 - m w)/(m-1) >= 0, with a series near w = 0.
inline double bregman_power(double w, double m) {
    if (!(w > -1.0)) throw DomainError("relative deviation must exceed -1");
    if (std::abs(w) < 1e-3) {
        // m/2 w^2 + m(m-2)/6 w^3 + m(m-2)(m-3)/24 w^4 + m(m-2)(m-3)(m-4)/120 w^5
        const double c2 = m / 2.0, c3 = m * (m - 2.0) / 6.0, c4 = c3 * (m - 3.0) / 4.0, c5 = c4 * (m - 4.0) / 5.0;
        return w * w * (c2 + w * (c3 + w * (c4 + w * c5)));
    }
    return (std::expm1(m * std::log1p(w)) - m * w) / (m - 1.0);
}

/// w = v/B - 1 at every node.
inline std::vector<double> relative_deviation(const RadialField& v, const ParamSet& p) {
    if (v.d != p.d) throw DimensionError("field dimension differs from parameters");
    std::vector<double> w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = v.values[i] / barenblatt_static(p, v.r[i]) - 1.0;
    return w;
}

inline void check_decay(const std::vector<double>& w) {
    for (double x : w)
        if (!(x > -1.0) || !std::isfinite(x)) throw DecayError("v is not comparable to B on the grid");
}

/// Free energy from the relative deviation w = v/B - 1:
/// int B^m ((1+w)^m - 1 - m w)/(m-1). The error adds a tail bound that
/// extends the last node's deviation to infinity.
inline Estimate free_energy_w(const std::vector<double>& r, const std::vector<double>& w, const ParamSet& p) {
    check_decay(w);
    Estimate e = richardson(p.d, p.omega_d, r, [&](int s) {
        std::vector<double> f;
        for (std::size_t i = 0; i < r.size(); i += s)
            f.push_back(std::pow(barenblatt_static(p, r[i]), p.m) * bregman_power(w[i], p.m));
        return f;
    });
    e.error += bregman_power(w.back(), p.m) * barenblatt_m_tail(p, r.back());
    return e;
}

inline Estimate free_energy(const RadialField& v, const ParamSet& p) {
    return free_energy_w(v.r, relative_deviation(v, p), p);
}

/// Fisher information m/(1-m) int v |d/dr (v^{m-1} - B^{m-1})|^2 from w,
/// with v^{m-1} - B^{m-1} = (1+r^2) ((1+w)^{m-1} - 1).
inline Estimate fisher_information_w(const std::vector<double>& r, const std::vector<double>& w, const ParamSet& p) {
    check_decay(w);
    std::vector<double> q(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) q[i] = (1.0 + r[i] * r[i]) * std::expm1((p.m - 1.0) * std::log1p(w[i]));
    return richardson(p.d, p.omega_d, r, [&](int s) {
        const std::vector<double> dq = radial_derivative(r, q, s);
        std::vector<double> f(dq.size());
        for (std::size_t k = 0; k < dq.size(); ++k) {
            const std::size_t i = k * s;
            f[k] = barenblatt_static(p, r[i]) * (1.0 + w[i]) * dq[k] * dq[k];
        }
        for (double& x : f) x *= p.m / (1.0 - p.m);
        return f;
    });
}

inline Estimate fisher_information(const RadialField& v, const ParamSet& p) {
    return fisher_information_w(v.r, relative_deviation(v, p), p);
}

/// int g B^{2-m}, the constraint for the Hardy-Poincare inequality.
inline Estimate weighted_mean(const RadialField& g, const ParamSet& p) {
    return richardson(p.d, p.omega_d, g.r, [&](int s) {
        std::vector<double> f;
        for (std::size_t i = 0; i < g.size(); i += s) f.push_back(g.values[i] * std::pow(barenblatt_static(p, g.r[i]), 2.0 - p.m));
        return f;
    });
}

struct LinearizedFunctionals {
    Estimate F;  ///< m/2 int g^2 B^{2-m}
    Estimate I;  ///< m(1-m) int |g'|^2 B
};

inline LinearizedFunctionals linearized_functionals(const RadialField& g, const ParamSet& p) {
    if (g.d != p.d) throw DimensionError("field dimension differs from parameters");
    LinearizedFunctionals out;
    out.F = richardson(p.d, p.omega_d, g.r, [&](int s) {
        std::vector<double> f;
        for (std::size_t i = 0; i < g.size(); i += s)
            f.push_back(0.5 * p.m * g.values[i] * g.values[i] * std::pow(barenblatt_static(p, g.r[i]), 2.0 - p.m));
        return f;
    });
    out.I = richardson(p.d, p.omega_d, g.r, [&](int s) {
        const std::vector<double> dg = radial_derivative(g.r, g.values, s);
        std::vector<double> f(dg.size());
        for (std::size_t k = 0; k < dg.size(); ++k)
            f[k] = p.m * (1.0 - p.m) * dg[k] * dg[k] * barenblatt_static(p, g.r[k * s]);
        return f;
    });
    return out;
}

/// Subtracts the constant that makes int g B^{2-m} vanish.
inline RadialField make_mean_zero(const RadialField& g, const ParamSet& p) {
    const RadialField one = sample(p, g.r, [](double) { return 1.0; });
    const double c = weighted_mean(g, p).value / weighted_mean(one, p).value;
    RadialField out = g;
    out.allow_negative = true;
    for (double& x : out.values) x -= c;
    return out;
}

struct HardyPoincareVerdict {
    LinearizedFunctionals lin;
    double ratio = 0.0;   ///< I/F
    double target = 0.0;  ///< 4 alpha
    double slack = 0.0;   ///< I - 4 alpha F
    double error = 0.0;   ///< error bar on the slack
    bool pass = false;    ///< slack >= -error
};

/// I[g] >= 4 alpha F[g] for radial g with int g B^{2-m} = 0.
inline HardyPoincareVerdict hardy_poincare_check(const RadialField& g, const ParamSet& p, double mean_tol = 1e-9) {
    const Estimate mean = weighted_mean(g, p);
    std::vector<double> absg(g.values.size());
    for (std::size_t i = 0; i < absg.size(); ++i) absg[i] = std::abs(g.values[i]);
    const double scale = weighted_mean(RadialField{g.d, g.r, absg, true}, p).value;
    if (std::abs(mean.value) > mean_tol * scale + mean.error)
        throw ToleranceError("int g B^{2-m} = " + std::to_string(mean.value) + " is not zero");
    HardyPoincareVerdict v;
    v.lin = linearized_functionals(g, p);
    v.target = 4.0 * p.alpha;
    v.ratio = v.lin.I.value / v.lin.F.value;
    v.slack = v.lin.I.value - v.target * v.lin.F.value;
    v.error = v.lin.I.error + v.target * v.lin.F.error;
    v.pass = v.slack >= -v.error;
    return v;
}

// ---------------------------------------------------------------------------
// Improvement functions

struct ImprovementFunctions {
    double s1 = 0.0, s2 = 0.0, f = 0.0;
};

/// s1, s2 and f with a = 2 - m; f(0) = 4 alpha - 4 = 2 eta.
inline ImprovementFunctions improvement_functions(double eps, const ParamSet& p) {
    if (!(eps >= 0.0 && eps < 0.5)) throw DomainError("eps must lie in [0, 1/2)");
    const double a = 2.0 - p.m;
    ImprovementFunctions out;
    out.s1 = std::pow(1.0 + eps, 2.0 * a) / (1.0 - eps);
    out.s2 = 2.0 * p.d / p.m * (1.0 - p.m) * (1.0 - p.m) * std::expm1(2.0 * a * (std::log1p(eps) - std::log1p(-eps)));
    out.f = (4.0 * p.alpha * std::pow(1.0 - eps, a) - 4.0 * out.s1 - std::pow(1.0 + eps, a) * out.s2) / out.s1;
    return out;
}

/// 1 - (1-eps)^{1+a}/(1+eps)^{2a}, concave on [0, 1].
inline double improvement_g(double eps, const ParamSet& p) {
    const double a = 2.0 - p.m;
    return -std::expm1((1.0 + a) * std::log1p(-eps) - 2.0 * a * std::log1p(eps));
}

/// (1-eps)/(1+eps)^a ((1+eps)^{2a}/(1-eps)^{2a} - 1), convex on [0, 1/2].
inline double improvement_h(double eps, const ParamSet& p) {
    const double a = 2.0 - p.m;
    return (1.0 - eps) / std::pow(1.0 + eps, a) * std::expm1(2.0 * a * (std::log1p(eps) - std::log1p(-eps)));
}

// ---------------------------------------------------------------------------
// Tube perturbations and the improved inequality

/// phi(r) = cos(freq r^2) exp(-(r^2 - center^2)^2 / width^4): smooth in r^2,
/// bounded by 1.
struct Perturbation {
    double delta = 0.0;
    double center = 0.0;
    double width = 1.0;
    double freq = 0.0;

    double phi(double r) const {
        const double u = (r * r - center * center) / (width * width);
        return std::cos(freq * r * r) * std::exp(-u * u);
    }
};

struct PerturbedProfile {
    RadialField v;
    double scale = 1.0;     ///< multiplicative mass renormalization
    double eps_tube = 0.0;  ///< max |v/B - 1| after renormalization
};

/// v = s B (1 + delta phi) with s fixing the discrete mass to that of B.
inline PerturbedProfile perturbed_barenblatt(const ParamSet& p, const std::vector<double>& r, const Perturbation& pert) {
    if (!(std::abs(pert.delta) < 1.0)) throw DomainError("perturbation amplitude must be below 1");
    const RadialField B = barenblatt_field(p, r);
    RadialField raw = sample(p, r, [&](double x) { return barenblatt_static(p, x) * (1.0 + pert.delta * pert.phi(x)); });
    PerturbedProfile out;
    out.scale = radial_trapezoid(p.d, p.omega_d, r, B.values) / radial_trapezoid(p.d, p.omega_d, r, raw.values);
    for (double& x : raw.values) x *= out.scale;
    double e = std::abs(out.scale - 1.0);  // value at infinity
    for (std::size_t i = 0; i < r.size(); ++i) e = std::max(e, std::abs(out.scale * (1.0 + pert.delta * pert.phi(r[i])) - 1.0));
    out.v = std::move(raw);
    out.eps_tube = e;
    return out;
}

struct EepVerdict {
    Estimate I, F;           ///< nonlinear Fisher information and free energy
    LinearizedFunctionals lin;  ///< for g = v B^{m-2} - B^{m-1}
    double ratio = 0.0;      ///< I/F (NaN when F = 0)
    double eps_tube = 0.0;
    bool improved = false;   ///< eps_tube < chi eta, so 4 + eta is the target
    double target = 4.0;
    double slack = 0.0, error = 0.0;
    bool pass = false;
    double mass_defect = 0.0;  ///< relative discrete mass difference to B
    bool sandwich_ok = false;  ///< (1+eps)^{-a} F[g] <= F[v] <= (1-eps)^{-a} F[g]
    bool fisher_sandwich_ok = false;  ///< I[g] <= s1 I[v] + s2 F[g]
};

/// I[v] >= (4 + eta) F[v] for v in the (1 +- eps) B tube with the mass of B.
/// Outside the improved range (eps >= chi eta) the target drops to 4.
inline EepVerdict eep_check(const RadialField& v, double eps_tube, const ParamSet& p, double mass_tol = 1e-10) {
    if (!(eps_tube >= 0.0 && eps_tube < 0.5)) throw DomainError("tube width must lie in [0, 1/2)");
    const std::vector<double> w = relative_deviation(v, p);
    for (std::size_t i = 0; i < w.size(); ++i)
        if (std::abs(w[i]) > eps_tube * (1.0 + 1e-12))
            throw TubeError("v/B - 1 = " + std::to_string(w[i]) + " at r = " + std::to_string(v.r[i]));
    EepVerdict out;
    out.eps_tube = eps_tube;
    const double mB = radial_trapezoid(p.d, p.omega_d, v.r, barenblatt_field(p, v.r).values);
    out.mass_defect = std::abs(radial_trapezoid(p.d, p.omega_d, v.r, v.values) - mB) / mB;
    if (out.mass_defect > mass_tol) throw ToleranceError("mass differs from the Barenblatt mass");
    out.F = free_energy_w(v.r, w, p);
    out.I = fisher_information_w(v.r, w, p);
    std::vector<double> g(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) g[i] = (1.0 + v.r[i] * v.r[i]) * w[i];
    out.lin = linearized_functionals(RadialField{p.d, v.r, g, true}, p);
    out.ratio = out.F.value > 0.0 ? out.I.value / out.F.value : std::nan("");
    out.improved = eps_tube < p.chi * p.eta;
    out.target = out.improved ? 4.0 + p.eta : 4.0;
    out.slack = out.I.value - out.target * out.F.value;
    out.error = out.I.error + out.target * out.F.error;
    out.pass = out.slack >= -out.error;
    const double a = 2.0 - p.m;
    const double lo = std::pow(1.0 + eps_tube, -a) * out.lin.F.value, hi = std::pow(1.0 - eps_tube, -a) * out.lin.F.value;
    const double errF = out.F.error + std::pow(1.0 - eps_tube, -a) * out.lin.F.error;
    out.sandwich_ok = lo <= out.F.value + errF && out.F.value <= hi + errF;
    const ImprovementFunctions s = improvement_functions(eps_tube, p);
    out.fisher_sandwich_ok = out.lin.I.value <= s.s1 * out.I.value + s.s2 * out.lin.F.value + out.lin.I.error +
                                                  s.s1 * out.I.error + s.s2 * out.lin.F.error;
    return out;
}

// ---------------------------------------------------------------------------
// Quadratization

struct QuadratizationPoint {
    double eps = 0.0;
    double ratio = 0.0;  ///< F[B + eps B^{2-m} g] / eps^2
    double drift = 0.0;  ///< ratio - F_lin[g]
};

/// F[B + eps B^{2-m} g]/eps^2 for each eps; the relative deviation of that
/// profile is eps g / (1 + r^2).
inline std::vector<QuadratizationPoint> quadratization(const RadialField& g, const ParamSet& p,
                                                       const std::vector<double>& eps_values, double* F_lin = nullptr) {
    const double F = linearized_functionals(g, p).F.value;
    if (F_lin) *F_lin = F;
    std::vector<QuadratizationPoint> out;
    for (double eps : eps_values) {
        std::vector<double> w(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) w[i] = eps * g.values[i] / (1.0 + g.r[i] * g.r[i]);
        const double ratio = free_energy_w(g.r, w, p).value / (eps * eps);
        out.push_back({eps, ratio, ratio - F});
    }
    return out;
}

}  // namespace hfd
