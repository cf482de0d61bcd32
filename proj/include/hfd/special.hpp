#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace hfd {

namespace detail {
// Lanczos approximation, g = 7, n = 9 (the coefficient set popularised by
// Numerical Recipes / Godfrey). Relative error is below 1e-14 on the real axis.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
}  // namespace detail

/// ln Γ(x) for x > 0.
inline double log_gamma(double x) {
    using std::numbers::pi;
    if (x < 0.5) {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        return std::log(pi / std::abs(std::sin(pi * x))) - log_gamma(1.0 - x);
    }
    x -= 1.0;
    double a = detail::kLanczosCoef[0];
    const double t = x + detail::kLanczosG + 0.5;
    for (std::size_t i = 1; i < detail::kLanczosCoef.size(); ++i) a += detail::kLanczosCoef[i] / (x + static_cast<double>(i));
    return 0.5 * std::log(2.0 * pi) + (x + 0.5) * std::log(t) - t + std::log(a);
}

/// Γ(x) for x > 0 (overflows to +inf above x ≈ 171).
inline double gamma_fn(double x) {
    using std::numbers::pi;
    if (x < 0.5) return pi / (std::sin(pi * x) * gamma_fn(1.0 - x));
    x -= 1.0;
    double a = detail::kLanczosCoef[0];
    const double t = x + detail::kLanczosG + 0.5;
    for (std::size_t i = 1; i < detail::kLanczosCoef.size(); ++i) a += detail::kLanczosCoef[i] / (x + static_cast<double>(i));
    return std::sqrt(2.0 * pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

}  // namespace hfd
