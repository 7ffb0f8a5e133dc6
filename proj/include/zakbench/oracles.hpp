#pragma once

// Reference computations that avoid the ZakGrid, the ZZ field and the SVD
// path. Zak values are summed directly from window samples with libm
// exponentials; the membership residual is recomputed either as a weighted
// variance of branch ratios (Q = 1) or through normal equations (Q >= 2).

#include <cmath>
#include <numbers>
#include <vector>

#include "error.hpp"
#include "rational.hpp"
#include "window.hpp"

namespace zakbench::oracle {

/// sum_k f(x + k) e^{-2 pi i k omega} at x = j / N.
inline cplx zak_direct(const SampledWindow& w, std::int64_t j, double omega) {
    const std::int64_t n = w.rate();
    std::int64_t k = (w.start() - j) / n - 1;
    cplx acc{0.0, 0.0};
    for (; j + k * n < w.end(); ++k) {
        const cplx f = w.at_index(j + k * n);
        if (f == cplx{0.0, 0.0}) continue;
        acc += f * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) * omega);
    }
    return acc;
}

struct OracleGrid {
    std::int64_t x_per_unit;  // x points per unit length
    std::int64_t omega_points;
};

namespace detail {

inline double window_norm(const SampledWindow& w) { return std::sqrt(w.energy()); }

// Shared bookkeeping: for every (x, omega) on [0, 1/P) x [0, 1) collect the
// P right-hand sides and the Q columns, then hand them to `point`.
template <class PointResidual>
double integrate(const SampledWindow& w, std::int64_t q_count, std::int64_t p_count, const TimeFrequencyShift& s,
                 OracleGrid g, PointResidual&& point) {
    const std::int64_t n = w.rate();
    require(g.x_per_unit % p_count == 0 && n % g.x_per_unit == 0, "oracle grid must divide the sample grid");
    const Rational du = s.u * Rational(n);
    require(du.is_integer(), "oracle shift must be grid-aligned");
    require(n % q_count == 0, "oracle lattice must divide the sample grid");
    const std::int64_t stride = n / g.x_per_unit;
    const double eta = s.eta.to_double();
    double total = 0.0;
    std::vector<cplx> b(static_cast<std::size_t>(p_count));
    std::vector<std::vector<cplx>> cols(static_cast<std::size_t>(q_count), std::vector<cplx>(b.size()));
    for (std::int64_t jx = 0; jx < g.x_per_unit / p_count; ++jx) {
        const std::int64_t j = jx * stride;
        for (std::int64_t m = 0; m < g.omega_points; ++m) {
            const double omega = static_cast<double>(m) / static_cast<double>(g.omega_points);
            for (std::int64_t p = 0; p < p_count; ++p) {
                const std::int64_t jp = j + p * n / p_count;
                const double x = static_cast<double>(jp) / static_cast<double>(n);
                b[static_cast<std::size_t>(p)] = std::polar(1.0, 2.0 * std::numbers::pi * eta * x) *
                                                 zak_direct(w, jp - du.num(), omega - eta);
                for (std::int64_t q = 0; q < q_count; ++q)
                    cols[static_cast<std::size_t>(q)][static_cast<std::size_t>(p)] =
                        zak_direct(w, jp - q * n / q_count, omega);
            }
            total += point(cols, b);
        }
    }
    const double area = 1.0 / (static_cast<double>(g.x_per_unit) * static_cast<double>(g.omega_points));
    return std::sqrt(total * area) / window_norm(w);
}

}  // namespace detail

/// Q = 1 residual: at each point minimise sum_p w_p^2 |b_p / Z_p - m|^2 over a
/// single complex m, with w_p = |Z_p|; points where every Z_p vanishes keep
/// the full right-hand-side energy.
inline double weighted_variance_residual(const SampledWindow& w, std::int64_t p_count, const TimeFrequencyShift& s,
                                         OracleGrid g) {
    const double level = 1e-12 * detail::window_norm(w);
    return detail::integrate(w, 1, p_count, s, g, [&](const auto& cols, const std::vector<cplx>& b) {
        const auto& z = cols[0];
        double largest = 0.0;
        for (const auto& v : z) largest = std::max(largest, std::abs(v));
        double out = 0.0;
        if (largest <= level) {
            for (const auto& v : b) out += std::norm(v);
            return out;
        }
        cplx mean{0.0, 0.0};
        double weight = 0.0;
        for (std::size_t p = 0; p < b.size(); ++p) {
            const double w2 = std::norm(z[p]);
            if (w2 == 0.0) {
                out += std::norm(b[p]);
                continue;
            }
            mean += w2 * (b[p] / z[p]);
            weight += w2;
        }
        mean /= weight;
        for (std::size_t p = 0; p < b.size(); ++p) {
            const double w2 = std::norm(z[p]);
            if (w2 != 0.0) out += w2 * std::norm(b[p] / z[p] - mean);
        }
        return out;
    });
}

/// General Q residual through the Q x Q normal equations, solved by Gaussian
/// elimination with partial pivoting. Meant for full-rank fixtures.
inline double normal_equations_residual(const SampledWindow& w, std::int64_t q_count, std::int64_t p_count,
                                        const TimeFrequencyShift& s, OracleGrid g) {
    return detail::integrate(w, q_count, p_count, s, g, [&](const auto& cols, const std::vector<cplx>& b) {
        const auto qn = static_cast<std::size_t>(q_count);
        std::vector<std::vector<cplx>> a(qn, std::vector<cplx>(qn + 1));
        for (std::size_t r = 0; r < qn; ++r) {
            for (std::size_t c = 0; c < qn; ++c)
                for (std::size_t p = 0; p < b.size(); ++p) a[r][c] += std::conj(cols[r][p]) * cols[c][p];
            for (std::size_t p = 0; p < b.size(); ++p) a[r][qn] += std::conj(cols[r][p]) * b[p];
        }
        for (std::size_t c = 0; c < qn; ++c) {
            std::size_t pivot = c;
            for (std::size_t r = c + 1; r < qn; ++r)
                if (std::abs(a[r][c]) > std::abs(a[pivot][c])) pivot = r;
            std::swap(a[c], a[pivot]);
            if (std::abs(a[c][c]) == 0.0) continue;
            for (std::size_t r = 0; r < qn; ++r) {
                if (r == c) continue;
                const cplx f = a[r][c] / a[c][c];
                for (std::size_t k = c; k <= qn; ++k) a[r][k] -= f * a[c][k];
            }
        }
        double out = 0.0;
        for (std::size_t p = 0; p < b.size(); ++p) {
            cplx fit{0.0, 0.0};
            for (std::size_t q = 0; q < qn; ++q)
                if (std::abs(a[q][q]) != 0.0) fit += cols[q][p] * (a[q][qn] / a[q][q]);
            out += std::norm(fit - b[p]);
        }
        return out;
    });
}

}  // namespace zakbench::oracle
