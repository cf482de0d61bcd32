#pragma once

// Radial finite-volume solver for u_t = Delta u^m and the verification
// harnesses for the local estimates (mass displacement, local upper and lower
// bounds, Aleksandrov mean value inequality, truncation functions).

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hfd/core_params.hpp"
#include "hfd/entropy.hpp"
#include "hfd/errors.hpp"
#include "hfd/fde_bounds.hpp"
#include "hfd/lognum.hpp"
#include "json.hpp"

namespace hfd {

enum class DtPolicy { Fixed, Adaptive };

struct SolverConfig {
    int d = 3;
    double m = 5.0 / 6.0;
    double r_max = 60.0;
    int N = 400;                        ///< number of cells
    DtPolicy dt_policy = DtPolicy::Adaptive;
    double dt_coeff = 0.5;              ///< fixed policy: dt = dt_coeff h^2
    double dt_initial = 1e-4;           ///< adaptive policy: first step
    double dt_max = 0.05;               ///< adaptive policy: largest step
    double max_change = 0.05;           ///< adaptive policy: accepted max|du| / max u per step
    std::vector<double> snapshot_times; ///< elapsed times, increasing; t = 0 is always stored
    double u_floor = 1e-14;             ///< u^m is evaluated at max(u, u_floor)
    double newton_tol = 1e-12;
    int max_halvings = 20;
    bool refine_estimate = false;       ///< also solve on N/2 cells for error bars
};

/// Cell-centered radial grid: faces j h, exact shell volumes, face areas.
struct FvGrid {
    int d = 0;
    double omega_d = 0.0, h = 0.0;
    std::vector<double> faces, centers, volumes, trans;  ///< trans[j] = area(face j)/h

    FvGrid() = default;
    FvGrid(int d_, double r_max, int N) : d(d_), omega_d(omega(d_)), h(r_max / N) {
        if (N < 16) throw ConfigError("need at least 16 cells");
        if (!(r_max > 0.0)) throw ConfigError("r_max must be positive");
        faces.resize(N + 1);
        for (int j = 0; j <= N; ++j) faces[j] = j * h;
        centers.resize(N);
        volumes.resize(N);
        for (int j = 0; j < N; ++j) {
            centers[j] = (j + 0.5) * h;
            volumes[j] = omega_d / d * (std::pow(faces[j + 1], d) - std::pow(faces[j], d));
        }
        trans.assign(N + 1, 0.0);  // zero flux at r = 0 (symmetry) and at r_max
        for (int j = 1; j < N; ++j) trans[j] = omega_d * std::pow(faces[j], d - 1) / h;
    }
    int cells() const { return static_cast<int>(centers.size()); }
    double r_max() const { return faces.back(); }
};

/// omega_d int_{B_rho} u, exact for the piecewise-constant cell values.
inline double ball_integral(const FvGrid& g, const std::vector<double>& u, double rho) {
    long double s = 0.0L;
    for (int j = 0; j < g.cells(); ++j) {
        if (g.faces[j + 1] <= rho) {
            s += static_cast<long double>(g.volumes[j]) * u[j];
        } else {
            if (g.faces[j] < rho) s += static_cast<long double>(g.omega_d / g.d * (std::pow(rho, g.d) - std::pow(g.faces[j], g.d))) * u[j];
            break;
        }
    }
    return static_cast<double>(s);
}

/// Point value at radius r: linear between centers, even quadratic through
/// the first two centers near the origin, constant past the last center.
inline double value_at(const FvGrid& g, const std::vector<double>& u, double r) {
    const int N = g.cells();
    if (r <= g.centers[0]) {
        const double b = (u[1] - u[0]) / (g.centers[1] * g.centers[1] - g.centers[0] * g.centers[0]);
        return u[0] + b * (r * r - g.centers[0] * g.centers[0]);
    }
    if (r >= g.centers[N - 1]) return u[N - 1];
    const int j = std::min(N - 2, static_cast<int>((r - g.centers[0]) / g.h));
    const double s = (r - g.centers[j]) / g.h;
    return (1.0 - s) * u[j] + s * u[j + 1];
}

struct Snapshot {
    double t = 0.0;
    std::vector<double> u;  ///< cell values
    double mass = 0.0;
};

struct Solution {
    SolverConfig config;
    FvGrid grid;
    std::vector<Snapshot> snapshots;
    int steps = 0, rejected = 0, newton_iterations = 0;
    std::shared_ptr<const Solution> coarse;  ///< same run on N/2 cells, when requested

    const Snapshot& at(double t) const {
        for (const auto& s : snapshots)
            if (std::abs(s.t - t) <= 1e-12 * std::max(1.0, std::abs(t))) return s;
        throw ConfigError("no snapshot at t = " + std::to_string(t));
    }
    double ball(double t, double rho) const { return ball_integral(grid, at(t).u, rho); }
    double value(double t, double r) const { return value_at(grid, at(t).u, r); }
    double center_value(double t) const { return value(t, 0.0); }

    /// Snapshot as a field on [0, r_max] with nodes 0 and the cell centers.
    RadialField field(double t) const {
        const Snapshot& s = at(t);
        std::vector<double> r{0.0}, v{std::max(0.0, value_at(grid, s.u, 0.0))};
        r.insert(r.end(), grid.centers.begin(), grid.centers.end());
        v.insert(v.end(), s.u.begin(), s.u.end());
        return RadialField::nonnegative(grid.d, std::move(r), std::move(v));
    }

    /// |Q(fine) - Q(coarse)| for a functional of the solution, or 0 without a coarse run.
    double refine_error(const std::function<double(const Solution&)>& q) const {
        return coarse ? std::abs(q(*this) - q(*coarse)) : 0.0;
    }

    /// max over snapshots of the L-infinity distance between the fine cell
    /// pairs (volume averaged) and the coarse cells.
    double refine_linf() const {
        if (!coarse) return 0.0;
        double e = 0.0;
        for (std::size_t k = 0; k < snapshots.size(); ++k) {
            const auto& f = snapshots[k].u;
            const auto& c = coarse->snapshots[k].u;
            for (int J = 0; J < coarse->grid.cells(); ++J) {
                const double v0 = grid.volumes[2 * J], v1 = grid.volumes[2 * J + 1];
                e = std::max(e, std::abs((v0 * f[2 * J] + v1 * f[2 * J + 1]) / (v0 + v1) - c[J]));
            }
        }
        return e;
    }
};

namespace detail {

/// Backward Euler step solved for w = u^m (u = w^{1/m}): the residual
/// V (w^{1/m} - u_n) - dt div(T grad w) is convex in w with an M-matrix
/// Jacobian, so Newton started from the previous level converges from above
/// and keeps w >= 0. u_floor bounds the time-term coefficient from below so
/// the Jacobian stays regular where w = 0. Returns the number of Newton
/// iterations, or -1 on non-convergence.
inline int implicit_step(const FvGrid& g, const SolverConfig& c, const std::vector<double>& un, double dt,
                         std::vector<double>& u) {
    const int N = g.cells();
    const double m = c.m, inv_m = 1.0 / m;
    u = un;
    double umax = 0.0;
    for (double x : un) umax = std::max(umax, x);
    if (umax == 0.0) return 0;
    const double w_floor = std::pow(c.u_floor, m);
    std::vector<double> w(N), R(N), a(N), b(N), cc(N), delta(N), cp(N), dp(N);
    for (int j = 0; j < N; ++j) w[j] = std::pow(un[j], m);
    const double wmax = std::pow(umax, m);
    for (int it = 1; it <= 60; ++it) {
        for (int j = 0; j < N; ++j) {
            double flux = 0.0;
            if (j + 1 < N) flux += g.trans[j + 1] * (w[j + 1] - w[j]);
            if (j > 0) flux -= g.trans[j] * (w[j] - w[j - 1]);
            R[j] = g.volumes[j] * (std::pow(w[j], inv_m) - un[j]) - dt * flux;
            const double du_dw = inv_m * std::pow(std::max(w[j], w_floor), inv_m - 1.0);
            b[j] = g.volumes[j] * du_dw + dt * (g.trans[j + 1] + g.trans[j]);
            a[j] = -dt * g.trans[j];       // coefficient of w[j-1]
            cc[j] = -dt * g.trans[j + 1];  // coefficient of w[j+1]
        }
        // Thomas algorithm on J delta = -R
        cp[0] = cc[0] / b[0];
        dp[0] = -R[0] / b[0];
        for (int j = 1; j < N; ++j) {
            const double den = b[j] - a[j] * cp[j - 1];
            cp[j] = cc[j] / den;
            dp[j] = (-R[j] - a[j] * dp[j - 1]) / den;
        }
        delta[N - 1] = dp[N - 1];
        for (int j = N - 2; j >= 0; --j) delta[j] = dp[j] - cp[j] * delta[j + 1];
        double dmax = 0.0;
        for (int j = 0; j < N; ++j) {
            if (!std::isfinite(delta[j])) return -1;
            w[j] = std::max(0.0, w[j] + delta[j]);
            dmax = std::max(dmax, std::abs(delta[j]));
        }
        if (dmax <= c.newton_tol * wmax) {
            for (int j = 0; j < N; ++j) u[j] = std::pow(w[j], inv_m);
            return it;
        }
    }
    return -1;
}

inline Solution evolve_cells(const SolverConfig& c, std::vector<double> u0) {
    Solution sol;
    sol.config = c;
    sol.grid = FvGrid(c.d, c.r_max, c.N);
    const FvGrid& g = sol.grid;
    if (static_cast<int>(u0.size()) != g.cells()) throw ConfigError("initial data size differs from the grid");
    for (double x : u0) {
        if (!std::isfinite(x)) throw ConfigError("non-finite initial value");
        if (x < 0.0) throw NonPositivityError("initial data must be nonnegative");
    }
    for (std::size_t k = 1; k < c.snapshot_times.size(); ++k)
        if (!(c.snapshot_times[k] > c.snapshot_times[k - 1])) throw ConfigError("snapshot times must increase");
    if (!c.snapshot_times.empty() && !(c.snapshot_times.front() >= 0.0)) throw ConfigError("snapshot times must be >= 0");
    if (!(c.m > 0.0 && c.m < 1.0)) throw RangeError("m must lie in (0, 1)");

    auto mass = [&](const std::vector<double>& u) {
        long double s = 0.0L;
        for (int j = 0; j < g.cells(); ++j) s += static_cast<long double>(g.volumes[j]) * u[j];
        return static_cast<double>(s);
    };
    std::vector<double> u = std::move(u0), next;
    double t = 0.0;
    sol.snapshots.push_back({0.0, u, mass(u)});
    const double dt_fixed = c.dt_coeff * g.h * g.h;
    double dt = c.dt_policy == DtPolicy::Fixed ? dt_fixed : c.dt_initial;
    for (double target : c.snapshot_times) {
        if (target == 0.0) continue;
        while (t < target) {
            const bool last = t + dt >= target * (1.0 - 1e-14);
            double step = last ? target - t : dt;
            int halvings = 0;
            for (;;) {
                const int it = implicit_step(g, c, u, step, next);
                bool ok = it >= 0;
                double change = 0.0, umax = 0.0;
                if (ok && c.dt_policy == DtPolicy::Adaptive) {
                    for (int j = 0; j < g.cells(); ++j) {
                        change = std::max(change, std::abs(next[j] - u[j]));
                        umax = std::max(umax, u[j]);
                    }
                    ok = change <= 2.0 * c.max_change * umax || step <= 1e-3 * c.dt_initial;
                }
                if (ok) {
                    sol.newton_iterations += it;
                    if (c.dt_policy == DtPolicy::Adaptive && !last && it <= 5 && change <= c.max_change * umax)
                        dt = std::min(c.dt_max, 1.25 * step);
                    else if (c.dt_policy == DtPolicy::Adaptive && !last)
                        dt = step;
                    break;
                }
                ++sol.rejected;
                if (++halvings > c.max_halvings)
                    throw StabilityError("step rejected " + std::to_string(halvings) + " times at t = " + std::to_string(t));
                step *= 0.5;
                if (c.dt_policy == DtPolicy::Adaptive) dt = step;
            }
            u.swap(next);
            t = (t + step >= target * (1.0 - 1e-14)) ? target : t + step;
            ++sol.steps;
        }
        sol.snapshots.push_back({target, u, mass(u)});
    }
    return sol;
}

}  // namespace detail

/// Solves with cell values given by a function of the radius (sampled at
/// centers). With refine_estimate the same problem is also solved on N/2 cells.
inline Solution evolve(const SolverConfig& c, const std::function<double(double)>& u0) {
    auto cells = [&](int N) {
        const FvGrid g(c.d, c.r_max, N);
        std::vector<double> v(N);
        for (int j = 0; j < N; ++j) v[j] = u0(g.centers[j]);
        return v;
    };
    Solution sol = detail::evolve_cells(c, cells(c.N));
    if (c.refine_estimate) {
        SolverConfig cc = c;
        cc.N = c.N / 2;
        cc.refine_estimate = false;
        sol.coarse = std::make_shared<Solution>(detail::evolve_cells(cc, cells(cc.N)));
    }
    return sol;
}

/// Same, with initial data from a sampled field (linear interpolation, zero
/// beyond its last node).
inline Solution evolve(const SolverConfig& c, const RadialField& u0) {
    if (u0.d != c.d) throw DimensionError("initial field dimension differs from the solver");
    return evolve(c, [&](double r) {
        if (r >= u0.r.back()) return 0.0;
        const auto it = std::upper_bound(u0.r.begin(), u0.r.end(), r);
        const std::size_t i = static_cast<std::size_t>(it - u0.r.begin());
        const double s = (r - u0.r[i - 1]) / (u0.r[i] - u0.r[i - 1]);
        return (1.0 - s) * u0.values[i - 1] + s * u0.values[i];
    });
}

// ---------------------------------------------------------------------------
// Initial data

/// cos^2 bump of the given height supported in B_radius, radially non-increasing.
inline double cosine_bump(double r, double height, double radius) {
    if (r >= radius) return 0.0;
    const double c = std::cos(0.5 * std::numbers::pi * r / radius);
    return height * c * c;
}

// ---------------------------------------------------------------------------
// Monotonicity properties

struct MonotonicityReport {
    double worst = 0.0;  ///< largest relative violation found (0 if none)
    bool pass = true;
};

/// u(t, r) t^{-1/(1-m)} is non-increasing in t; checked between consecutive
/// positive snapshot times at the given radii.
inline MonotonicityReport check_benilan_crandall(const Solution& sol, const std::vector<double>& radii, double tol) {
    MonotonicityReport rep;
    const double e = -1.0 / (1.0 - sol.config.m);
    for (std::size_t k = 1; k + 1 < sol.snapshots.size(); ++k) {
        const auto& s1 = sol.snapshots[k];
        const auto& s2 = sol.snapshots[k + 1];
        for (double r : radii) {
            const double a = value_at(sol.grid, s1.u, r) * std::pow(s1.t, e);
            const double b = value_at(sol.grid, s2.u, r) * std::pow(s2.t, e);
            if (a > 0.0) rep.worst = std::max(rep.worst, (b - a) / a);
        }
    }
    rep.pass = rep.worst <= tol;
    return rep;
}

/// u(t, 0) t^{d/alpha} is non-decreasing in t (from u_t >= -(d/alpha) u/t).
inline MonotonicityReport check_aronson_benilan(const Solution& sol, double tol) {
    MonotonicityReport rep;
    const ParamSet p = derive_params(sol.config.d, sol.config.m, Usage::FdeBounds);
    const double e = p.d / p.alpha;
    for (std::size_t k = 1; k + 1 < sol.snapshots.size(); ++k) {
        const auto& s1 = sol.snapshots[k];
        const auto& s2 = sol.snapshots[k + 1];
        const double a = value_at(sol.grid, s1.u, 0.0) * std::pow(s1.t, e);
        const double b = value_at(sol.grid, s2.u, 0.0) * std::pow(s2.t, e);
        if (a > 0.0) rep.worst = std::max(rep.worst, (a - b) / a);
    }
    rep.pass = rep.worst <= tol;
    return rep;
}

// ---------------------------------------------------------------------------
// Verdicts

/// One inequality instance lhs <= rhs with an error bar on the difference.
struct Verdict {
    std::string name;
    nlohmann::json where;  ///< the parameters of the instance
    double lhs = 0.0, rhs = 0.0;
    double log_slack = 0.0;  ///< ln rhs - ln lhs when rhs is a tower value
    double slack = 0.0;      ///< rhs - lhs (may be +inf when rhs overflows)
    double error = 0.0;
    bool pass = false;
};

inline nlohmann::json to_json(const Verdict& v) {
    auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf")); };
    return {{"name", v.name},     {"where", v.where},         {"lhs", num(v.lhs)}, {"rhs", num(v.rhs)},
            {"slack", num(v.slack)}, {"log_slack", num(v.log_slack)}, {"error", num(v.error)}, {"pass", v.pass}};
}

inline ParamSet solver_params(const Solution& sol) { return derive_params(sol.config.d, sol.config.m, Usage::FdeBounds); }

/// int_{B_2R} u(t) <= 2^{m/(1-m)} int_{B_{2R+r}} u(tau) + c3 |t-tau|^{1/(1-m)} / r^{alpha/(1-m)}
inline Verdict verify_herrero_pierre(const Solution& sol, double R, double r, double t, double tau, double rho0) {
    if (!(R > 0.0 && r > 0.0 && rho0 > 0.0)) throw DomainError("R, r, rho0 must be positive");
    if (rho0 * r < 2.0 * R) throw HypothesisError("need rho0 r >= 2R");
    if (2.0 * R + r > sol.grid.r_max()) throw ConfigError("B_{2R+r} exceeds the computational domain");
    const ParamSet p = solver_params(sol);
    const double om = 1.0 - p.m;
    Verdict v;
    v.name = "herrero-pierre";
    v.where = {{"R", R}, {"r", r}, {"t", t}, {"tau", tau}, {"rho0", rho0}};
    auto lhs = [&](const Solution& s) { return s.ball(t, 2.0 * R); };
    auto mass_term = [&](const Solution& s) { return std::pow(2.0, p.m / om) * s.ball(tau, 2.0 * R + r); };
    v.lhs = lhs(sol);
    const double c3 = herrero_pierre_c3(p, rho0).to_double();
    v.rhs = mass_term(sol) + c3 * std::pow(std::abs(t - tau), 1.0 / om) / std::pow(r, herrero_pierre_radius_exponent(p));
    v.slack = v.rhs - v.lhs;
    v.log_slack = std::log(v.rhs) - std::log(v.lhs);
    v.error = sol.refine_error(lhs) + sol.refine_error(mass_term);
    v.pass = v.slack >= -v.error;
    return v;
}

/// sup_{B_{R/2}} u(t) <= kbar (t^{-d/alpha} (int_{B_R} u0)^{2/alpha} + (t/R^2)^{1/(1-m)})
inline Verdict verify_local_upper(const Solution& sol, double R, double t, const TowerScalar& kbar) {
    if (!(R > 0.0 && t > 0.0)) throw DomainError("R and t must be positive");
    const ParamSet p = solver_params(sol);
    auto sup_half = [&](const Solution& so) {
        const Snapshot& sn = so.at(t);
        double mx = std::max(0.0, value_at(so.grid, sn.u, 0.0));
        for (int j = 0; j < so.grid.cells() && so.grid.centers[j] <= 0.5 * R; ++j) mx = std::max(mx, sn.u[j]);
        return std::max(mx, value_at(so.grid, sn.u, 0.5 * R));
    };
    Verdict v;
    v.name = "local-upper";
    v.where = {{"R", R}, {"t", t}};
    v.lhs = sup_half(sol);
    const double MR = sol.ball(0.0, R);
    const double bracket = std::pow(t, -p.d / p.alpha) * std::pow(MR, 2.0 / p.alpha) + std::pow(t / (R * R), 1.0 / (1.0 - p.m));
    const TowerScalar rhs = kbar * tw(bracket);
    v.rhs = rhs.to_double();
    v.error = sol.refine_error(sup_half);
    v.log_slack = rhs.log_abs() - std::log(v.lhs);
    v.slack = std::isfinite(v.rhs) ? v.rhs - v.lhs : INFINITY;
    v.pass = tw(std::max(0.0, v.lhs - v.error)) <= rhs;
    return v;
}

/// t_ = kappa_star/2 M_R^{1-m} R^alpha with M_R = int_{B_R} u0.
inline double lower_window_half(const Solution& sol, double R, double kappa_star_value) {
    const ParamSet p = solver_params(sol);
    return 0.5 * kappa_star_value * std::pow(sol.ball(0.0, R), 1.0 - p.m) * std::pow(R, p.alpha);
}

/// inf_{|x| <= R} u(t) >= kappa (t/R^2)^{1/(1-m)} for t in [0, 2 t_].
inline Verdict verify_local_lower(const Solution& sol, double R, double t, const TowerScalar& kappa, double kappa_star_value) {
    if (!(R > 0.0)) throw DomainError("R must be positive");
    const ParamSet p = solver_params(sol);
    if (!(sol.ball(0.0, R) > 0.0)) throw DomainError("initial mass in B_R must be positive");
    const double t_under = lower_window_half(sol, R, kappa_star_value);
    if (!(t >= 0.0 && t <= 2.0 * t_under))
        throw WindowError("t = " + std::to_string(t) + " outside [0, " + std::to_string(2.0 * t_under) + "]");
    auto inf_ball = [&](const Solution& so) {
        const Snapshot& sn = so.at(t);
        double mn = value_at(so.grid, sn.u, 0.0);
        for (int j = 0; j < so.grid.cells() && so.grid.centers[j] <= R; ++j) mn = std::min(mn, sn.u[j]);
        return std::min(mn, value_at(so.grid, sn.u, R));
    };
    Verdict v;
    v.name = "local-lower";
    v.where = {{"R", R}, {"t", t}, {"t_under", t_under}};
    v.lhs = inf_ball(sol);  // the measured infimum is the larger side here
    const TowerScalar bound = kappa * tw(std::pow(t / (R * R), 1.0 / (1.0 - p.m)));
    v.rhs = bound.to_double();
    v.error = sol.refine_error(inf_ball);
    v.log_slack = bound.is_zero() ? INFINITY : std::log(v.lhs) - bound.log_abs();
    v.slack = v.lhs - v.rhs;
    v.pass = tw(v.lhs + v.error) >= bound;
    return v;
}

struct AleksandrovVerdict {
    Verdict mean;                   ///< u(t,0) >= average over B_{lambda R} \ B_{2R}
    std::optional<Verdict> r_form;  ///< int over B_{2R+r} \ B_{2^b R} <= A_d r^d u(t,0), when r > r0
};

/// Both forms of the Aleksandrov inequality. The r-form uses r = (lambda - 2) R
/// so both concern the same outer ball; it is skipped when r <= r0.
inline AleksandrovVerdict verify_aleksandrov(const Solution& sol, double R, double lambda, double t) {
    if (!(R > 0.0)) throw DomainError("R must be positive");
    if (!(lambda > 2.0)) throw DomainError("need lambda > 2, otherwise B_{lambda R} \\ B_{2R} is empty");
    if (lambda * R > sol.grid.r_max()) throw ConfigError("B_{lambda R} exceeds the computational domain");
    const Snapshot& s0 = sol.snapshots.front();
    for (int j = 0; j < sol.grid.cells(); ++j)
        if (sol.grid.faces[j] >= R && s0.u[j] > 0.0)
            throw SupportError("initial data is positive at r = " + std::to_string(sol.grid.centers[j]) + " > R");
    const ParamSet p = solver_params(sol);
    const double vol = [&](double a, double b) { return p.omega_d / p.d * (std::pow(b, p.d) - std::pow(a, p.d)); }(2.0 * R, lambda * R);
    AleksandrovVerdict out;
    auto avg = [&](const Solution& so) { return (so.ball(t, lambda * R) - so.ball(t, 2.0 * R)) / vol; };
    auto center = [&](const Solution& so) { return so.center_value(t); };
    Verdict& a = out.mean;
    a.name = "aleksandrov-mean";
    a.where = {{"R", R}, {"lambda", lambda}, {"t", t}};
    a.lhs = avg(sol);
    a.rhs = center(sol);
    a.slack = a.rhs - a.lhs;
    a.log_slack = std::log(a.rhs) - std::log(a.lhs);
    a.error = sol.refine_error(avg) + sol.refine_error(center);
    a.pass = a.slack >= -a.error;

    const double r = (lambda - 2.0) * R;
    const double b = 2.0 - 1.0 / p.d;
    const double r0 = 2.0 * R * (std::pow(2.0, 1.0 - 1.0 / p.d) - 1.0);
    if (!(r > r0)) return out;
    Verdict& f = out.r_form.emplace();
    f.name = "aleksandrov-r";
    f.where = {{"R", R}, {"r", r}, {"t", t}, {"r0", r0}};
    auto annulus = [&](const Solution& so) { return so.ball(t, 2.0 * R + r) - so.ball(t, std::pow(2.0, b) * R); };
    f.lhs = annulus(sol);
    const double Ad = aleksandrov_Ad(p.d);
    f.rhs = Ad * std::pow(r, p.d) * center(sol);
    f.slack = f.rhs - f.lhs;
    f.log_slack = std::log(f.rhs) - std::log(f.lhs);
    f.error = sol.refine_error(annulus) + Ad * std::pow(r, p.d) * sol.refine_error(center);
    f.pass = f.slack >= -f.error;
    return out;
}

// ---------------------------------------------------------------------------
// Truncation functions

struct TruncationValue {
    double phi = 0.0;
    double grad = 0.0;  ///< radial derivative phi'(r); |grad phi| = |grad|
    double laplacian = 0.0;
};

/// phi = 1 on B_R1, 1 - 2(r-R1)^2/h^2 up to the midpoint, 2(R0-r)^2/h^2 up to
/// R0, 0 beyond (h = R0 - R1). The Laplacian is phi'' + (d-1) phi'/r; on the
/// outer branch phi'' = +4/h^2.
inline TruncationValue truncation_phi(double R1, double R0, double r, int d) {
    if (!(R1 > 0.0 && R0 > R1)) throw DomainError("need 0 < R1 < R0");
    if (!(r >= 0.0)) throw DomainError("radius must be >= 0");
    const double h = R0 - R1, h2 = h * h, mid = 0.5 * (R0 + R1);
    TruncationValue v;
    if (r <= R1) {
        v.phi = 1.0;
    } else if (r <= mid) {
        v.phi = 1.0 - 2.0 * (r - R1) * (r - R1) / h2;
        v.grad = -4.0 * (r - R1) / h2;
        v.laplacian = -4.0 / h2 + (d - 1) * v.grad / r;
    } else if (r <= R0) {
        v.phi = 2.0 * (R0 - r) * (R0 - r) / h2;
        v.grad = -4.0 * (R0 - r) / h2;
        v.laplacian = 4.0 / h2 + (d - 1) * v.grad / r;
    }
    return v;
}

struct TruncationVerdict {
    double sup_grad = 0.0, grad_bound = 0.0;
    double sup_laplacian = 0.0, laplacian_bound = 0.0;
    double phi_min = 1.0, phi_max = 0.0;
    int samples = 0;
    bool pass = false;
};

/// Samples r on (0, 1.1 R0] (stratified, plus both branch endpoints and the
/// midpoint) and checks ||grad phi|| <= 2/h, ||Delta phi|| <= 4d/h^2, 0 <= phi <= 1.
inline TruncationVerdict verify_truncation_bounds(double R1, double R0, int d, int sample_count) {
    if (d < 1) throw DimensionError("d must be >= 1");
    if (sample_count < 1) throw ConfigError("need at least one sample");
    const double h = R0 - R1;
    TruncationVerdict out;
    out.grad_bound = 2.0 / h;
    out.laplacian_bound = 4.0 * d / (h * h);
    auto visit = [&](double r) {
        const TruncationValue v = truncation_phi(R1, R0, r, d);
        out.sup_grad = std::max(out.sup_grad, std::abs(v.grad));
        out.sup_laplacian = std::max(out.sup_laplacian, std::abs(v.laplacian));
        out.phi_min = std::min(out.phi_min, v.phi);
        out.phi_max = std::max(out.phi_max, v.phi);
        ++out.samples;
    };
    for (int i = 0; i < sample_count; ++i) visit(1.1 * R0 * (i + 0.5) / sample_count);
    for (double r : {R1, 0.5 * (R0 + R1), R0, std::nextafter(R1, R0), std::nextafter(0.5 * (R0 + R1), R0)}) visit(r);
    const double tol = 1e-12;
    out.pass = out.sup_grad <= out.grad_bound * (1.0 + tol) && out.sup_laplacian <= out.laplacian_bound * (1.0 + tol) &&
               out.phi_min >= 0.0 && out.phi_max <= 1.0;
    return out;
}

// ---------------------------------------------------------------------------
// Scenario files

/// {d, m, grid: {r_max, N}, times: [...], dt: {policy, coeff, initial, max},
///  initial: {type: barenblatt|bump|csv, params: {...}}, refine}
struct Scenario {
    SolverConfig config;
    std::function<double(double)> u0;
    nlohmann::json source;
};

inline Scenario scenario_from_json(const nlohmann::json& j, const std::string& base_dir = ".") {
    Scenario s;
    s.source = j;
    SolverConfig& c = s.config;
    try {
        c.d = j.at("d").get<int>();
        c.m = j.at("m").get<double>();
        const auto& g = j.at("grid");
        c.r_max = g.at("r_max").get<double>();
        c.N = g.at("N").get<int>();
        c.snapshot_times = j.at("times").get<std::vector<double>>();
        if (j.contains("dt")) {
            const auto& dt = j["dt"];
            const std::string pol = dt.value("policy", "adaptive");
            if (pol == "fixed")
                c.dt_policy = DtPolicy::Fixed;
            else if (pol == "adaptive")
                c.dt_policy = DtPolicy::Adaptive;
            else
                throw ConfigError("unknown dt policy " + pol);
            c.dt_coeff = dt.value("coeff", c.dt_coeff);
            c.dt_initial = dt.value("initial", c.dt_initial);
            c.dt_max = dt.value("max", c.dt_max);
            c.max_change = dt.value("max_change", c.max_change);
        }
        c.u_floor = j.value("u_floor", c.u_floor);
        c.refine_estimate = j.value("refine", false);
        const auto& init = j.at("initial");
        const std::string type = init.at("type").get<std::string>();
        const nlohmann::json par = init.value("params", nlohmann::json::object());
        if (type == "barenblatt") {
            const ParamSet p = derive_params(c.d, c.m, Usage::FdeBounds);
            const double t0 = par.value("t0", 1.0), k = par.value("k", 1.0);
            s.u0 = [p, t0, k](double r) { return barenblatt_time(p, t0, r, k); };
        } else if (type == "bump") {
            const double height = par.value("height", 1.0), radius = par.at("radius").get<double>();
            s.u0 = [height, radius](double r) { return cosine_bump(r, height, radius); };
        } else if (type == "csv") {
            std::string path = par.at("path").get<std::string>();
            if (!path.empty() && path[0] != '/') path = base_dir + "/" + path;
            auto field = std::make_shared<RadialField>(RadialField::read_csv(c.d, path));
            s.u0 = [field](double r) {
                const auto& f = *field;
                if (r >= f.r.back()) return 0.0;
                const auto it = std::upper_bound(f.r.begin(), f.r.end(), r);
                const std::size_t i = static_cast<std::size_t>(it - f.r.begin());
                const double w = (r - f.r[i - 1]) / (f.r[i] - f.r[i - 1]);
                return (1.0 - w) * f.values[i - 1] + w * f.values[i];
            };
        } else {
            throw ConfigError("unknown initial type " + type);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    return s;
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

inline nlohmann::json solution_to_json(const Solution& sol) {
    nlohmann::json j;
    j["steps"] = sol.steps;
    j["rejected"] = sol.rejected;
    j["newton_iterations"] = sol.newton_iterations;
    j["snapshots"] = nlohmann::json::array();
    for (const auto& s : sol.snapshots)
        j["snapshots"].push_back({{"t", s.t}, {"mass", s.mass}, {"center", value_at(sol.grid, s.u, 0.0)}});
    if (sol.coarse) j["refine_linf"] = sol.refine_linf();
    return j;
}

}  // namespace hfd
