#pragma once

// Iterated-logarithm scalars: sign + level + magnitude.
//   level 0: mag = |x|
//   level 1: mag = ln|x|
//   level 2: mag = ln ln|x|
// Values are always kept in canonical form (lowest level that fits).

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "hfd/errors.hpp"

namespace hfd {

class TowerScalar {
public:
    static constexpr double kLevel0Max = 1e15;
    static constexpr double kLevel0Min = 1e-300;
    static constexpr double kLevel1Max = 1e15;
    static constexpr double kLnLevel0Max = 34.538776394910684;   // ln 1e15
    static constexpr double kLnLevel0Min = -690.77552789821368;  // ln 1e-300
    static constexpr double kLnLevel1Max = 34.538776394910684;   // ln 1e15

    /// Zero.
    constexpr TowerScalar() = default;

    static TowerScalar normalize(int sign, int level, double mag);
    static TowerScalar zero() { return {}; }
    static TowerScalar one() { return from_double(1.0); }
    static TowerScalar from_double(double x);
    /// sign * exp(ln_abs)
    static TowerScalar from_log(double ln_abs, int sign = 1) { return normalize(sign, 1, ln_abs); }
    /// sign * exp(exp(lnln_abs))
    static TowerScalar from_loglog(double lnln_abs, int sign = 1) { return normalize(sign, 2, lnln_abs); }

    int sign() const { return sign_; }
    int level() const { return level_; }
    double mag() const { return mag_; }
    bool is_zero() const { return sign_ == 0; }

    /// Nearest double (may be +-inf or 0 outside the double range).
    double to_double() const;
    /// ln|x| as a double (+inf when it does not fit).
    double log_abs() const;

    TowerScalar abs() const {
        TowerScalar r = *this;
        if (r.sign_ < 0) r.sign_ = 1;
        return r;
    }
    TowerScalar operator-() const {
        TowerScalar r = *this;
        r.sign_ = -r.sign_;
        return r;
    }

    /// Bitwise identity of the representation.
    bool same_as(const TowerScalar& o) const { return sign_ == o.sign_ && level_ == o.level_ && mag_ == o.mag_; }

private:
    constexpr TowerScalar(int s, int l, double m) : sign_(s), level_(l), mag_(m) {}
    int sign_ = 0;
    int level_ = 0;
    double mag_ = 0.0;
};

/// Result of an addition that may hit cancellation between level >= 1 values.
struct AddResult {
    TowerScalar value;
    bool approximate_zero = false;  ///< operands indistinguishable at representation precision
    TowerScalar error_bound;        ///< absolute bound on the true result when approximate_zero
};

TowerScalar tower_log(const TowerScalar& x);
TowerScalar tower_exp(const TowerScalar& y);
TowerScalar tower_pow(const TowerScalar& a, const TowerScalar& b);
AddResult add_checked(const TowerScalar& a, const TowerScalar& b);
int compare(const TowerScalar& a, const TowerScalar& b);
int compare_abs(const TowerScalar& a, const TowerScalar& b);

TowerScalar operator+(const TowerScalar& a, const TowerScalar& b);
TowerScalar operator-(const TowerScalar& a, const TowerScalar& b);
TowerScalar operator*(const TowerScalar& a, const TowerScalar& b);
TowerScalar operator/(const TowerScalar& a, const TowerScalar& b);

enum class Op { Add, Mul, Pow };
TowerScalar combine(Op op, const TowerScalar& a, const TowerScalar& b);

// ---------------------------------------------------------------------------

inline TowerScalar TowerScalar::normalize(int sign, int level, double mag) {
    if (level < 0 || level > 2) throw DomainError("tower level must be 0, 1 or 2");
    if (std::isnan(mag)) throw DomainError("NaN magnitude");
    if (!std::isfinite(mag)) throw OverflowError("magnitude not finite at level " + std::to_string(level));
    if (sign == 0) return {};
    int s = sign > 0 ? 1 : -1;
    if (level == 0) {
        if (mag < 0.0) {
            mag = -mag;
            s = -s;
        }
        if (mag == 0.0) return {};
        if (mag <= kLevel0Max && mag >= kLevel0Min) return {s, 0, mag};
        level = 1;
        mag = std::log(mag);
    }
    if (level == 1) {
        if (mag > kLevel1Max) return {s, 2, std::log(mag)};
        if (mag >= kLnLevel0Min && mag <= kLnLevel0Max) return {s, 0, std::exp(mag)};
        return {s, 1, mag};
    }
    if (mag > kLnLevel1Max) return {s, 2, mag};
    const double m1 = std::exp(mag);
    if (m1 >= kLnLevel0Min && m1 <= kLnLevel0Max) return {s, 0, std::exp(m1)};
    return {s, 1, m1};
}

inline TowerScalar TowerScalar::from_double(double x) {
    if (std::isnan(x)) throw DomainError("NaN");
    if (!std::isfinite(x)) throw OverflowError("infinite double");
    if (x == 0.0) return {};
    return normalize(x > 0 ? 1 : -1, 0, std::abs(x));
}

inline double TowerScalar::to_double() const {
    if (sign_ == 0) return 0.0;
    double v = 0.0;
    switch (level_) {
        case 0: v = mag_; break;
        case 1: v = std::exp(mag_); break;
        default: v = std::numeric_limits<double>::infinity(); break;
    }
    return sign_ * v;
}

inline double TowerScalar::log_abs() const {
    if (sign_ == 0) return -std::numeric_limits<double>::infinity();
    switch (level_) {
        case 0: return std::log(mag_);
        case 1: return mag_;
        default: return std::exp(mag_);
    }
}

inline int compare_abs(const TowerScalar& a, const TowerScalar& b) {
    if (a.is_zero() || b.is_zero()) return (a.is_zero() ? 0 : 1) - (b.is_zero() ? 0 : 1);
    if (a.level() == b.level()) return (a.mag() > b.mag()) - (a.mag() < b.mag());
    // Canonical forms: a level-2 value exceeds every level-0/1 value; a level-1
    // value is either above every level-0 value (mag > 0) or below it.
    auto rank = [](const TowerScalar& x) {
        if (x.level() == 2) return 2;
        if (x.level() == 1) return x.mag() > 0 ? 1 : -1;
        return 0;
    };
    const int ra = rank(a), rb = rank(b);
    if (ra != rb) return ra > rb ? 1 : -1;
    return (a.mag() > b.mag()) - (a.mag() < b.mag());
}

inline int compare(const TowerScalar& a, const TowerScalar& b) {
    if (a.sign() != b.sign()) return a.sign() < b.sign() ? -1 : 1;
    if (a.is_zero()) return 0;
    const int c = compare_abs(a, b);
    return a.sign() > 0 ? c : -c;
}

inline bool operator==(const TowerScalar& a, const TowerScalar& b) { return compare(a, b) == 0; }
inline bool operator!=(const TowerScalar& a, const TowerScalar& b) { return compare(a, b) != 0; }
inline bool operator<(const TowerScalar& a, const TowerScalar& b) { return compare(a, b) < 0; }
inline bool operator>(const TowerScalar& a, const TowerScalar& b) { return compare(a, b) > 0; }
inline bool operator<=(const TowerScalar& a, const TowerScalar& b) { return compare(a, b) <= 0; }
inline bool operator>=(const TowerScalar& a, const TowerScalar& b) { return compare(a, b) >= 0; }

inline TowerScalar tower_log(const TowerScalar& x) {
    if (x.sign() <= 0) throw DomainError("log of a non-positive tower value");
    switch (x.level()) {
        case 0: return TowerScalar::from_double(std::log(x.mag()));
        case 1: return TowerScalar::from_double(x.mag());
        default: return TowerScalar::normalize(1, 1, x.mag());
    }
}

inline TowerScalar tower_exp(const TowerScalar& y) {
    if (y.is_zero()) return TowerScalar::one();
    switch (y.level()) {
        case 0: return TowerScalar::normalize(1, 1, y.sign() * y.mag());
        case 1: {
            if (y.sign() > 0) return TowerScalar::normalize(1, 2, y.mag());
            const double v = std::exp(y.mag());
            if (!std::isfinite(v)) throw OverflowError("exp underflows below the level-1 range");
            return TowerScalar::normalize(1, 1, -v);
        }
        default: {
            if (y.sign() < 0) throw OverflowError("exp underflows below the level-1 range");
            const double v = std::exp(y.mag());
            if (!std::isfinite(v)) throw OverflowError("value needs level > 2");
            return TowerScalar::normalize(1, 2, v);
        }
    }
}

namespace detail {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

// Absolute uncertainty of ln|x| implied by rounding of the stored magnitude.
inline TowerScalar log_uncertainty(const TowerScalar& x) {
    switch (x.level()) {
        case 0: return TowerScalar::from_double(2.0 * kEps);
        case 1: return TowerScalar::from_double(2.0 * kEps * std::max(1.0, std::abs(x.mag())));
        default: return TowerScalar::from_log(std::log(2.0 * kEps * x.mag()) + x.mag());
    }
}

// exp(D) for D <= 0 as a double (0 on underflow).
inline double ratio_from_log(const TowerScalar& D) {
    if (D.is_zero()) return 1.0;
    if (D.level() == 0) return std::exp(D.sign() * D.mag());
    if (D.sign() > 0) return std::numeric_limits<double>::infinity();
    if (D.level() == 2 || D.mag() > 7.0) return 0.0;
    return std::exp(-std::exp(D.mag()));
}

}  // namespace detail

inline AddResult add_checked(const TowerScalar& a_in, const TowerScalar& b_in) {
    if (a_in.is_zero()) return {b_in, false, {}};
    if (b_in.is_zero()) return {a_in, false, {}};
    if (a_in.level() == 0 && b_in.level() == 0) {
        const double s = a_in.sign() * a_in.mag() + b_in.sign() * b_in.mag();
        return {TowerScalar::from_double(s), false, {}};
    }
    TowerScalar a = a_in, b = b_in;
    if (compare_abs(a, b) < 0) std::swap(a, b);
    if (a.level() == 0) {
        // b is below the level-0 range: plain double addition (b may be
        // subnormal or flush to zero) avoids an exp/log round trip on a
        const double s = a.sign() * a.mag() + b.to_double();
        return {TowerScalar::from_double(s), false, {}};
    }
    const TowerScalar La = tower_log(a.abs());
    const TowerScalar Lb = tower_log(b.abs());
    const TowerScalar D = add_checked(Lb, -La).value;  // <= 0
    const bool opposite = a.sign() != b.sign();
    if (opposite) {
        const TowerScalar unc = TowerScalar::from_double(4.0) *
                                add_checked(detail::log_uncertainty(a), detail::log_uncertainty(b)).value;
        if (compare_abs(D, unc) <= 0) {
            // |a| - |b| is below what the stored magnitudes can resolve.
            const TowerScalar bound = tower_exp(add_checked(La, tower_log(unc)).value);
            return {TowerScalar::zero(), true, bound};
        }
    }
    const double r = detail::ratio_from_log(D);
    const double corr = opposite ? std::log1p(-r) : std::log1p(r);
    const TowerScalar L = corr == 0.0 ? La : add_checked(La, TowerScalar::from_double(corr)).value;
    TowerScalar out = tower_exp(L);
    return {a.sign() < 0 ? -out : out, false, {}};
}

inline TowerScalar operator+(const TowerScalar& a, const TowerScalar& b) { return add_checked(a, b).value; }
inline TowerScalar operator-(const TowerScalar& a, const TowerScalar& b) { return add_checked(a, -b).value; }

inline TowerScalar operator*(const TowerScalar& a, const TowerScalar& b) {
    if (a.is_zero() || b.is_zero()) return {};
    const int s = a.sign() * b.sign();
    if (a.level() == 0 && b.level() == 0) {
        const double p = a.mag() * b.mag();
        if (p >= TowerScalar::kLevel0Min) return TowerScalar::normalize(s, 0, p);
    }
    const TowerScalar out = tower_exp(tower_log(a.abs()) + tower_log(b.abs()));
    return s < 0 ? -out : out;
}

inline TowerScalar operator/(const TowerScalar& a, const TowerScalar& b) {
    if (b.is_zero()) throw DomainError("division by zero");
    if (a.is_zero()) return {};
    const int s = a.sign() * b.sign();
    if (a.level() == 0 && b.level() == 0) {
        const double q = a.mag() / b.mag();
        if (q >= TowerScalar::kLevel0Min && std::isfinite(q)) return TowerScalar::normalize(s, 0, q);
    }
    const TowerScalar out = tower_exp(tower_log(a.abs()) - tower_log(b.abs()));
    return s < 0 ? -out : out;
}

inline TowerScalar& operator+=(TowerScalar& a, const TowerScalar& b) { return a = a + b; }
inline TowerScalar& operator*=(TowerScalar& a, const TowerScalar& b) { return a = a * b; }

inline TowerScalar tower_pow(const TowerScalar& a, const TowerScalar& b) {
    if (b.is_zero()) return TowerScalar::one();
    if (a.is_zero()) {
        if (b.sign() > 0) return {};
        throw DomainError("zero to a non-positive power");
    }
    int s = 1;
    if (a.sign() < 0) {
        const double e = b.to_double();
        if (b.level() != 0 || std::floor(e) != e || std::abs(e) > 9007199254740992.0)
            throw DomainError("negative base to a non-integer power");
        if (std::fmod(std::abs(e), 2.0) == 1.0) s = -1;
    }
    const TowerScalar out = tower_exp(b * tower_log(a.abs()));
    return s < 0 ? -out : out;
}

inline TowerScalar tower_pow(const TowerScalar& a, double b) { return tower_pow(a, TowerScalar::from_double(b)); }

inline TowerScalar tower_sqrt(const TowerScalar& a) { return tower_pow(a, 0.5); }

inline TowerScalar tower_max(const TowerScalar& a, const TowerScalar& b) { return a < b ? b : a; }
inline TowerScalar tower_min(const TowerScalar& a, const TowerScalar& b) { return b < a ? b : a; }

inline TowerScalar combine(Op op, const TowerScalar& a, const TowerScalar& b) {
    switch (op) {
        case Op::Add: return a + b;
        case Op::Mul: return a * b;
        case Op::Pow: return tower_pow(a, b);
    }
    return {};
}

/// Convenience: tower value from a double.
inline TowerScalar tw(double x) { return TowerScalar::from_double(x); }

/// Human-readable form, e.g. "1.5e+03", "exp(-1.2e+186)", "exp(exp(428.6))".
inline std::string to_string(const TowerScalar& x) {
    char buf[64];
    const char* sg = x.sign() < 0 ? "-" : "";
    switch (x.level()) {
        case 0: std::snprintf(buf, sizeof buf, "%s%.15g", sg, x.mag()); break;
        case 1: std::snprintf(buf, sizeof buf, "%sexp(%.15g)", sg, x.mag()); break;
        default: std::snprintf(buf, sizeof buf, "%sexp(exp(%.15g))", sg, x.mag()); break;
    }
    return buf;
}

}  // namespace hfd
