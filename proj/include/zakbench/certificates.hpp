#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "hgrid.hpp"
#include "rational.hpp"
#include "window.hpp"

namespace zakbench {

namespace detail {

// Steps of a multiplier grid needed to move by (u, eta).
inline std::pair<std::int64_t, std::int64_t> hgrid_steps(const HGrid& h, const TimeFrequencyShift& shift) {
    const Rational su = shift.u * Rational(h.p1() * h.nx());
    const Rational se = shift.eta * Rational(h.p2() * h.nl());
    if (!su.is_integer() || !se.is_integer())
        fail("shift not grid-aligned: " + shift.str() + " is not a multiple of the multiplier grid steps (" +
             h.x_step().str() + ", " + h.omega_step().str() + ")");
    return {su.num(), se.num()};
}

}  // namespace detail

/// max over [0, 1) x [0, 1) at the multiplier's resolution of
/// |prod_{r=0}^{R-1} h(x + r u, omega + r eta) - e^{2 pi i sign (M1 x + M2 omega)}|.
inline double h_product_check(const HGrid& h, std::int64_t R, const TimeFrequencyShift& shift, std::int64_t m1,
                              std::int64_t m2, int sign) {
    require(R >= 1, "R must be a positive integer");
    require(sign == 1 || sign == -1, "sign must be +1 or -1");
    const auto [su, se] = detail::hgrid_steps(h, shift);
    const std::int64_t nx = h.p1() * h.nx(), nl = h.p2() * h.nl();
    double worst = 0.0;
    for (std::int64_t j = 0; j < nx; ++j) {
        for (std::int64_t m = 0; m < nl; ++m) {
            cplx prod{1.0, 0.0};
            for (std::int64_t r = 0; r < R; ++r) prod *= h.at(j + r * su, m + r * se);
            const Rational arg = Rational(sign) * (Rational(m1 * j, nx) + Rational(m2 * m, nl));
            worst = std::max(worst, std::abs(prod - unit_phase(arg)));
        }
    }
    return worst;
}

struct WindingNumbers {
    std::int64_t q1 = 0;
    std::int64_t q2 = 0;
    /// distance of the raw turn counts from the nearest integers
    double rounding_defect = 0.0;
};

namespace detail {

struct PhaseWalk {
    double turns = 0.0;
    double largest_step = 0.0;
    std::int64_t worst_index = 0;
};

// Sum of principal phase steps around one period, in turns.
template <class Value>
PhaseWalk walk_phase(std::int64_t count, Value&& value) {
    PhaseWalk walk;
    double total = 0.0;
    for (std::int64_t i = 0; i < count; ++i) {
        const double step = std::arg(value(i + 1) / value(i));
        if (std::abs(step) > walk.largest_step) {
            walk.largest_step = std::abs(step);
            walk.worst_index = i;
        }
        total += step;
    }
    walk.turns = total / (2.0 * std::numbers::pi);
    return walk;
}

}  // namespace detail

/// q1 = (arg h(0, w) - arg h(1/P1, w)) / 2pi and q2 = (arg h(x, 0) - arg h(x, 1/P2)) / 2pi
/// along continuously unwrapped paths. Every row and column must agree.
inline WindingNumbers winding_numbers(const HGrid& h) {
    constexpr double kZeroLevel = 1e-8;
    constexpr double kStepLimit = 0.9 * std::numbers::pi;
    constexpr double kRoundingLimit = 0.01;
    const double top = h.max_modulus();
    if (!(top > 0.0)) fail_numerical("zero crossing: multiplier vanishes identically");
    for (std::int64_t j = 0; j < h.nx(); ++j)
        for (std::int64_t m = 0; m < h.nl(); ++m)
            if (std::abs(h.stored(j, m)) < kZeroLevel * top)
                fail_numerical("zero crossing: |h| below threshold at (x, omega) = (" + (h.x_step() * Rational(j)).str() + ", " +
                     (h.omega_step() * Rational(m)).str() + ")");

    WindingNumbers out;
    auto settle = [&](const detail::PhaseWalk& walk, const std::string& where, bool along_x, std::int64_t fixed,
                      std::optional<std::int64_t>& agreed) {
        if (walk.largest_step >= kStepLimit) {
            const Rational x = along_x ? h.x_step() * Rational(walk.worst_index) : h.x_step() * Rational(fixed);
            const Rational w = along_x ? h.omega_step() * Rational(fixed) : h.omega_step() * Rational(walk.worst_index);
            fail_numerical("phase aliasing: phase step of " + std::to_string(walk.largest_step / std::numbers::pi) +
                 " pi along " + where + " at (x, omega) = (" + x.str() + ", " + w.str() + ")");
        }
        const double raw = -walk.turns;
        const double rounded = std::round(raw);
        out.rounding_defect = std::max(out.rounding_defect, std::abs(raw - rounded));
        if (out.rounding_defect > kRoundingLimit)
            fail_numerical("phase aliasing: winding count " + std::to_string(raw) + " along " + where + " is not near an integer");
        const auto n = static_cast<std::int64_t>(rounded);
        if (agreed && *agreed != n)
            fail_numerical("phase aliasing: winding numbers differ between paths along " + where + " (" +
                 std::to_string(*agreed) + " vs " + std::to_string(n) + ")");
        agreed = n;
    };

    std::optional<std::int64_t> q1, q2;
    for (std::int64_t m = 0; m < h.nl(); ++m)
        settle(detail::walk_phase(h.nx(), [&](std::int64_t i) { return h.at(i, m); }), "x", true, m, q1);
    for (std::int64_t j = 0; j < h.nx(); ++j)
        settle(detail::walk_phase(h.nl(), [&](std::int64_t i) { return h.at(j, i); }), "omega", false, j, q2);
    out.q1 = *q1;
    out.q2 = *q2;
    return out;
}

struct DivisibilityCertificate {
    std::int64_t R = 1, p1 = 1, p2 = 1, m1 = 0, m2 = 0;
    int sign = 1;
    double product_defect = 0.0;
    bool product_holds = false;
    std::int64_t q1 = 0, q2 = 0;
    double rounding_defect = 0.0;
    /// R P1 q1 + sign M1 and R P2 q2 + sign M2
    std::int64_t identity_x = 0, identity_omega = 0;
    /// whether R P1 | M1 and R P2 | M2, i.e. whether any winding pair could close the identities
    bool integer_solvable = false;
    bool pass = false;
    std::string reason;
};

/// Integer-level certificate of the divisibility R P1 | M1, R P2 | M2 forced on
/// a continuous nonvanishing multiplier whose R-fold product is a pure
/// exponential. Winding failures propagate as errors; a failed product
/// identity is reported as a failing certificate.
inline DivisibilityCertificate divisibility_certificate(const HGrid& h, std::int64_t R, const TimeFrequencyShift& shift,
                                                        std::int64_t m1, std::int64_t m2, int sign) {
    constexpr double kProductLimit = 1e-8;
    DivisibilityCertificate c;
    c.R = R;
    c.p1 = h.p1();
    c.p2 = h.p2();
    c.m1 = m1;
    c.m2 = m2;
    c.sign = sign;
    c.integer_solvable = m1 % (R * h.p1()) == 0 && m2 % (R * h.p2()) == 0;
    c.product_defect = h_product_check(h, R, shift, m1, m2, sign);
    c.product_holds = c.product_defect <= kProductLimit;

    const WindingNumbers w = winding_numbers(h);
    c.q1 = w.q1;
    c.q2 = w.q2;
    c.rounding_defect = w.rounding_defect;
    c.identity_x = R * h.p1() * w.q1 + sign * m1;
    c.identity_omega = R * h.p2() * w.q2 + sign * m2;

    if (!c.product_holds) {
        c.pass = false;
        c.reason = "product identity fails (defect " + std::to_string(c.product_defect) + ")";
        if (!c.integer_solvable) c.reason += "; no integer winding pair can satisfy the divisibility identities";
    } else {
        c.pass = c.identity_x == 0 && c.identity_omega == 0;
        c.reason = c.pass ? "integer identities hold" : "integer identities violated";
    }
    return c;
}

}  // namespace zakbench
