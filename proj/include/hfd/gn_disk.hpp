#pragma once

// Shooting for -u'' - u'/r + u = u^3 on the unit disk with u(0) = a,
// u'(0) = 0, and the Neumann condition u'(1) = 0 selecting the optimal
// Gagliardo-Nirenberg profile.

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "hfd/entropy.hpp"
#include "hfd/errors.hpp"

namespace hfd {

struct ShootingResult {
    double a = 0.0;
    double s_of_a = 0.0;             ///< u_a'(1)
    int sign_changes = 0;            ///< zeros of u_a on (0, 1)
    std::vector<double> zeros;       ///< their locations
    RadialField profile;             ///< u on a uniform mesh of [0, 1]
    std::vector<double> derivative;  ///< u' on the same mesh
};

/// Launch radius for the series start at the regular singular point.
inline constexpr double kShootStart = 1e-4;
/// Mesh intervals on [0, 1] (even, for Simpson).
inline constexpr int kShootMesh = 2000;
inline constexpr double kBlowupGuard = 1e6;

/// u(r) ~ a + (a - a^3) r^2 / 4 near r = 0.
inline std::array<double, 2> shooting_series(double a, double r) {
    const double c = 0.25 * (a - a * a * a);
    return {a + c * r * r, 2.0 * c * r};
}

inline ShootingResult shoot(double a, double tol = 1e-10) {
    namespace ode = boost::numeric::odeint;
    if (!(a > 0.0)) throw DomainError("a must be positive");
    if (!(tol > 0.0 && tol <= 1e-6)) throw DomainError("tol must lie in (0, 1e-6]");
    using State = std::array<double, 2>;
    auto rhs = [](const State& y, State& dy, double r) {
        dy[0] = y[1];
        dy[1] = y[0] - y[0] * y[0] * y[0] - y[1] / r;
    };
    std::vector<double> times{kShootStart};
    for (int i = 1; i <= kShootMesh; ++i) times.push_back(static_cast<double>(i) / kShootMesh);
    std::vector<double> u{a}, du{0.0};
    State y = shooting_series(a, kShootStart);
    bool first = true;
    auto observe = [&](const State& s, double) {
        if (first) {  // the launch point itself
            first = false;
            return;
        }
        if (!(std::abs(s[0]) < kBlowupGuard) || !std::isfinite(s[1]))
            throw BlowupError("|u| exceeded the guard for a = " + std::to_string(a));
        u.push_back(s[0]);
        du.push_back(s[1]);
    };
    // u scales with a, so small amplitudes get a proportionally smaller absolute tolerance
    auto stepper = ode::make_dense_output(tol * std::min(1.0, a), tol, ode::runge_kutta_dopri5<State>());
    ode::integrate_times(stepper, rhs, y, times.begin(), times.end(), 1e-5, observe);

    ShootingResult out;
    out.a = a;
    out.s_of_a = du.back();
    std::vector<double> r(kShootMesh + 1);
    for (int i = 0; i <= kShootMesh; ++i) r[i] = static_cast<double>(i) / kShootMesh;
    for (int i = 1; i < kShootMesh; ++i) {
        // strict sign change between mesh points; a zero exactly on a node
        // counts once, against the next nonzero sample
        if (u[i] == 0.0) continue;
        int j = i + 1;
        while (j < kShootMesh && u[j] == 0.0) ++j;
        if (u[i] * u[j] < 0.0) {
            ++out.sign_changes;
            out.zeros.push_back(r[i] + (r[j] - r[i]) * u[i] / (u[i] - u[j]));
        }
    }
    if (u[0] * u[1] < 0.0) {
        ++out.sign_changes;
        out.zeros.insert(out.zeros.begin(), r[1] * u[0] / (u[0] - u[1]));
    }
    out.profile = RadialField::signed_field(2, r, u);
    out.derivative = du;
    return out;
}

struct RootCandidate {
    double a = 0.0;
    double s_of_a = 0.0;
    int sign_changes = 0;
    bool admissible = false;  ///< exactly one sign change
};

struct AStarResult {
    double a_star = 0.0;
    ShootingResult shot;
    std::vector<RootCandidate> candidates;  ///< every root found in the bracket
};

/// Roots of s on the bracket: a scan for sign changes, then bisection with a
/// secant polish until |s| <= tol or the interval collapses.
inline std::vector<RootCandidate> scan_roots(double a_lo, double a_hi, double tol = 1e-10, int scan_points = 50) {
    if (!(a_lo > 0.0 && a_hi > a_lo)) throw DomainError("bracket must satisfy 0 < a_lo < a_hi");
    const double shoot_tol = std::min(1e-6, std::max(1e-13, 0.01 * tol));
    auto s = [&](double a) { return shoot(a, shoot_tol).s_of_a; };
    std::vector<double> as(scan_points + 1), ss(scan_points + 1);
    for (int i = 0; i <= scan_points; ++i) {
        as[i] = a_lo + (a_hi - a_lo) * i / scan_points;
        ss[i] = s(as[i]);
    }
    std::vector<RootCandidate> roots;
    auto record = [&](double a) {
        const ShootingResult r = shoot(a, shoot_tol);
        roots.push_back({a, r.s_of_a, r.sign_changes, r.sign_changes == 1});
    };
    for (int i = 0; i < scan_points; ++i) {
        if (ss[i] == 0.0) {
            record(as[i]);
            continue;
        }
        if (ss[i] * ss[i + 1] >= 0.0) continue;
        double lo = as[i], hi = as[i + 1], slo = ss[i], shi = ss[i + 1];
        double root = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            // secant proposal, bisection when it leaves the bracket
            double x = hi - shi * (hi - lo) / (shi - slo);
            if (!(x > lo && x < hi) || it % 3 == 2) x = 0.5 * (lo + hi);
            const double sx = s(x);
            root = x;
            if (std::abs(sx) <= tol || hi - lo <= 4e-16 * hi) break;
            if (sx * slo < 0.0) {
                hi = x;
                shi = sx;
            } else {
                lo = x;
                slo = sx;
            }
        }
        record(root);
    }
    if (ss[scan_points] == 0.0) record(as[scan_points]);
    return roots;
}

/// The root of s with exactly one sign change of u on (0, 1).
inline AStarResult find_a_star(double a_lo, double a_hi, double tol = 1e-10) {
    AStarResult out;
    out.candidates = scan_roots(a_lo, a_hi, tol);
    for (const auto& c : out.candidates) {
        if (!c.admissible) continue;
        out.a_star = c.a;
        out.shot = shoot(c.a, std::min(1e-6, std::max(1e-13, 0.01 * tol)));
        return out;
    }
    std::ostringstream os;
    os << "no root with one sign change in [" << a_lo << ", " << a_hi << "]";
    for (const auto& c : out.candidates) os << "; rejected a = " << c.a << " (" << c.sign_changes << " sign changes)";
    throw BracketError(os.str());
}

/// Composite Simpson on a uniform mesh with an even number of intervals.
inline double simpson(const std::vector<double>& r, const std::vector<double>& f) {
    const std::size_t n = r.size() - 1;
    if (n % 2 != 0 || n < 2) throw ConfigError("Simpson needs an even number of intervals");
    const double h = (r.back() - r.front()) / n;
    long double s = f[0] + f[n];
    for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0L : 2.0L) * f[i];
    return static_cast<double>(s * h / 3.0L);
}

struct OptimalConstant {
    double C = 0.0;             ///< (2 pi int u^4 r dr)^{-1/2}
    double quartic = 0.0;       ///< 2 pi int u^4 r dr
    double energy = 0.0;        ///< 2 pi int (u'^2 + u^2) r dr
    double identity_gap = 0.0;  ///< |energy - quartic| / quartic
};

/// Constant from a profile on a uniform mesh of [0, 1]. The energy identity
/// needs u'; when it is not supplied it is rebuilt by finite differences.
inline OptimalConstant optimal_constant(const RadialField& profile, const std::vector<double>& derivative = {}) {
    const auto& r = profile.r;
    const auto& u = profile.values;
    std::vector<double> du = derivative;
    if (du.empty()) du = radial_derivative(r, u);
    if (du.size() != u.size()) throw ConfigError("derivative size differs from the profile");
    std::vector<double> q(r.size()), e(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        q[i] = u[i] * u[i] * u[i] * u[i] * r[i];
        e[i] = (du[i] * du[i] + u[i] * u[i]) * r[i];
    }
    OptimalConstant out;
    out.quartic = 2.0 * std::numbers::pi * simpson(r, q);
    out.energy = 2.0 * std::numbers::pi * simpson(r, e);
    out.C = 1.0 / std::sqrt(out.quartic);
    out.identity_gap = std::abs(out.energy - out.quartic) / out.quartic;
    return out;
}

/// ||u||_{L4(B_R)}^2 / (||grad u||^2_{L2(B_R)} + R^{-2} ||u||^2_{L2(B_R)}) for
/// a radial function given with its derivative.
inline double disk_rayleigh_quotient(const std::function<double(double)>& u, const std::function<double(double)>& du,
                                     double R, int intervals = 4000) {
    if (!(R > 0.0)) throw DomainError("R must be positive");
    intervals += intervals % 2;
    std::vector<double> r(intervals + 1), f4(r.size()), g2(r.size()), f2(r.size());
    for (int i = 0; i <= intervals; ++i) {
        r[i] = R * i / intervals;
        const double v = u(r[i]), dv = du(r[i]);
        f4[i] = v * v * v * v * r[i];
        g2[i] = dv * dv * r[i];
        f2[i] = v * v * r[i];
    }
    const double two_pi = 2.0 * std::numbers::pi;
    const double l4sq = std::sqrt(two_pi * simpson(r, f4));
    return l4sq / (two_pi * simpson(r, g2) + two_pi * simpson(r, f2) / (R * R));
}

/// (a, s(a), sign changes) on a uniform a-grid.
inline std::string sweep_csv(double a_lo, double a_hi, int n, double tol = 1e-10) {
    if (n < 2) throw ConfigError("need at least two sweep points");
    std::ostringstream os;
    os.precision(17);
    os << "a,s,sign_changes\n";
    for (int i = 0; i < n; ++i) {
        const double a = a_lo + (a_hi - a_lo) * i / (n - 1);
        const ShootingResult s = shoot(a, tol);
        os << a << ',' << s.s_of_a << ',' << s.sign_changes << '\n';
    }
    return os.str();
}

}  // namespace hfd
