#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "rational.hpp"

namespace zakbench {

using cplx = std::complex<double>;

/// |z|^2 evaluated as re*re + im*im in that order. Used everywhere a squared
/// modulus enters a norm so that unit-modulus phases contribute exactly 1.
inline double norm2(const cplx& z) noexcept { return z.real() * z.real() + z.imag() * z.imag(); }

namespace detail {

// Adjusts (c, s) so that c*c + s*s rounds to exactly 1. The larger component
// is kept within a couple of ulps; the smaller one is re-derived from it and
// searched in a small ulp neighbourhood.
inline void snap_unit_modulus(double& c, double& s) noexcept {
    constexpr int kReach = 6;
    auto defect = [](double a, double b) { return a * a + b * b - 1.0; };
    if (defect(c, s) == 0.0) return;
    const bool c_major = std::abs(c) >= std::abs(s);
    double& major = c_major ? c : s;
    double& minor = c_major ? s : c;
    const double minor_sign = minor < 0 ? -1.0 : 1.0;
    double best_major = major, best_minor = minor, best = std::abs(defect(major, minor));
    for (int dm = -2; dm <= 2; ++dm) {
        double mm = major;
        for (int k = 0; k < std::abs(dm); ++k) mm = std::nextafter(mm, dm < 0 ? 0.0 : 2.0 * mm);
        const double base = minor_sign * std::sqrt((1.0 - std::abs(mm)) * (1.0 + std::abs(mm)));
        for (int dn = -kReach; dn <= kReach; ++dn) {
            double nn = base;
            for (int k = 0; k < std::abs(dn); ++k) nn = std::nextafter(nn, dn < 0 ? -2.0 : 2.0);
            const double d = std::abs(defect(mm, nn));
            const double drift = std::abs(nn - minor) + std::abs(mm - major);
            const double best_drift = std::abs(best_minor - minor) + std::abs(best_major - major);
            if (d < best || (d == best && drift < best_drift)) {
                best = d;
                best_major = mm;
                best_minor = nn;
            }
        }
    }
    // Tiny angles would need a large correction of the minor component; keep
    // the plain rounding there.
    if (std::abs(best_minor - minor) + std::abs(best_major - major) > 1e-14) return;
    major = best_major;
    minor = best_minor;
}

}  // namespace detail

/// e^{2 pi i r} for an exact rational r. The result depends only on r mod 1,
/// is exact at multiples of 1/4, satisfies unit_phase(-r) == conj(unit_phase(r))
/// bit for bit, and has norm2() == 1 exactly unless that would cost more than
/// 1e-14 of accuracy (only for denominators far beyond grid sizes used here).
inline cplx unit_phase(const Rational& r) {
    Rational t = r.frac();
    const std::int64_t p = t.num(), q = t.den();
    if (p == 0) return {1.0, 0.0};
    if (4 * p == q) return {0.0, 1.0};
    if (2 * p == q) return {-1.0, 0.0};
    if (4 * p == 3 * q) return {0.0, -1.0};
    // Fold into the upper half plane, evaluate, conjugate back.
    const bool lower = 2 * p > q;
    const std::int64_t pp = lower ? q - p : p;
    const long double angle = 2.0L * std::numbers::pi_v<long double> * static_cast<long double>(pp) /
                              static_cast<long double>(q);
    double c = static_cast<double>(std::cos(angle));
    double s = static_cast<double>(std::sin(angle));
    detail::snap_unit_modulus(c, s);
    return lower ? cplx(c, -s) : cplx(c, s);
}

/// e^{2 pi i x} for real x; used only where the argument is not a grid rational.
inline cplx unit_phase(double x) noexcept {
    const double a = 2.0 * std::numbers::pi * (x - std::floor(x));
    return {std::cos(a), std::sin(a)};
}

/// Table of e^{2 pi i k / n}, k = 0..n-1, built from unit_phase so that every
/// lookup of a grid phase is bit-identical wherever it occurs.
class PhaseTable {
public:
    explicit PhaseTable(std::int64_t n) : n_(n), values_(static_cast<std::size_t>(n)) {
        require(n >= 1, "phase table size must be positive");
        for (std::int64_t k = 0; k < n; ++k) values_[static_cast<std::size_t>(k)] = unit_phase(Rational(k, n));
    }

    std::int64_t size() const noexcept { return n_; }

    /// e^{2 pi i k / n} for any integer k.
    const cplx& operator()(std::int64_t k) const noexcept {
        std::int64_t r = k % n_;
        if (r < 0) r += n_;
        return values_[static_cast<std::size_t>(r)];
    }

private:
    std::int64_t n_;
    std::vector<cplx> values_;
};

}  // namespace zakbench
