#pragma once

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "error.hpp"
#include "gabor.hpp"
#include "hgrid.hpp"
#include "parallel.hpp"
#include "rational.hpp"
#include "window.hpp"
#include "zak.hpp"

namespace zakbench {

struct InvarianceReport {
    TimeFrequencyShift shift;
    RationalLattice lattice;
    double tolerance = 1e-6;
    /// sqrt(sum cell-area * |Mh - b|^2) / |phi|
    double residual = 0.0;
    /// |Mh - b| per point of [0, 1/P) x [0, 1), stored as real parts.
    HGrid point_residual;
    /// h_q on [0, 1/P) x [0, 1), q = 0..Q-1.
    std::vector<HGrid> h;
    /// 1 where every entry of M vanished (relative to |phi|).
    std::vector<std::uint8_t> degenerate;
    std::int64_t degenerate_count = 0;
    bool member = false;
};

namespace detail {

inline void require_aligned_shift(const ZakGrid& grid, const TimeFrequencyShift& shift) {
    if (!(shift.u * Rational(grid.nx())).is_integer())
        fail("shift not grid-aligned: u*Nx must be an integer (u = " + shift.u.str() + ", Nx = " +
             std::to_string(grid.nx()) + "; Nx must be divisible by " + std::to_string(shift.u.den()) + ")");
    if (!(shift.eta * Rational(grid.nl())).is_integer())
        fail("shift not grid-aligned: eta*L must be an integer (eta = " + shift.eta.str() + ", L = " +
             std::to_string(grid.nl()) + "; L must be divisible by " + std::to_string(shift.eta.den()) + ")");
}

}  // namespace detail

/// Decides whether pi(u, eta) phi lies in the Gabor space of phi over the
/// lattice by solving, at every (x0, omega0) of [0, 1/P) x [0, 1),
///
///   sum_q h_q Zphi(x0 + p/P - q/Q, omega0) = e^{2 pi i eta (x0 + p/P)} Zphi(x0 + p/P - u, omega0 - eta)
///
/// for p = 0..P-1 in the least-squares sense.
inline InvarianceReport invariance_test(const ZakGrid& grid, const RationalLattice& lattice,
                                        const TimeFrequencyShift& shift, double tol = 1e-6) {
    const std::int64_t need = std::lcm(lattice.p, lattice.q);
    if (grid.nx() % need != 0)
        fail("Nx = " + std::to_string(grid.nx()) + " must be divisible by lcm(P, Q) = " + std::to_string(need));
    detail::require_aligned_shift(grid, shift);
    require(tol >= 0.0, "tolerance must be nonnegative");

    const std::int64_t nx_total = grid.nx(), nl = grid.nl(), q_count = lattice.q, p_count = lattice.p;
    const std::int64_t nx = nx_total / p_count;
    const std::int64_t step_p = nx_total / p_count, step_q = nx_total / q_count;
    const std::int64_t du = (shift.u * Rational(nx_total)).num();
    const std::int64_t de = (shift.eta * Rational(nl)).num();
    const double norm_phi = std::sqrt(grid.energy());
    require(norm_phi > 0.0, "zero-energy window");
    const double degenerate_level = 1e-12 * norm_phi;

    // e^{2 pi i eta k / Nx} for k in [0, Nx)
    std::vector<cplx> modulation(static_cast<std::size_t>(nx_total), cplx{1.0, 0.0});
    if (shift.eta != Rational(0))
        for (std::int64_t k = 0; k < nx_total; ++k)
            modulation[static_cast<std::size_t>(k)] = unit_phase(shift.eta * Rational(k, nx_total));

    const auto points = static_cast<std::size_t>(nx * nl);
    std::vector<std::vector<cplx>> h(static_cast<std::size_t>(q_count), std::vector<cplx>(points));
    std::vector<cplx> point_residual(points);
    std::vector<double> squared(points, 0.0);
    std::vector<std::uint8_t> degenerate(points, 0);

    parallel_for(static_cast<std::size_t>(nx), [&](std::size_t jj) {
        const auto j = static_cast<std::int64_t>(jj);
        MatrixXc m(p_count, q_count);
        VectorXc b(p_count);
        Eigen::JacobiSVD<MatrixXc> svd(p_count, q_count, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(1e-12);
        for (std::int64_t w = 0; w < nl; ++w) {
            double largest = 0.0;
            for (std::int64_t p = 0; p < p_count; ++p) {
                const std::int64_t row = j + p * step_p;
                for (std::int64_t q = 0; q < q_count; ++q) {
                    m(p, q) = grid.at(row - q * step_q, w);
                    largest = std::max(largest, std::abs(m(p, q)));
                }
                b(p) = modulation[static_cast<std::size_t>(row)] * grid.at(row - du, w - de);
            }
            const std::size_t idx = jj * static_cast<std::size_t>(nl) + static_cast<std::size_t>(w);
            double r2 = 0.0;
            if (largest <= degenerate_level) {
                degenerate[idx] = 1;
                r2 = b.squaredNorm();
                for (auto& hq : h) hq[idx] = cplx{0.0, 0.0};
            } else {
                svd.compute(m);
                const VectorXc sol = svd.solve(b);
                r2 = (m * sol - b).squaredNorm();
                for (std::int64_t q = 0; q < q_count; ++q) h[static_cast<std::size_t>(q)][idx] = sol(q);
            }
            squared[idx] = r2;
            point_residual[idx] = cplx{std::sqrt(r2), 0.0};
        }
    });

    // Fixed-order reduction: rows in x order, each row in omega order.
    double total = 0.0;
    for (std::int64_t j = 0; j < nx; ++j) {
        double row = 0.0;
        for (std::int64_t w = 0; w < nl; ++w) row += squared[static_cast<std::size_t>(j * nl + w)];
        total += row;
    }
    const double area = 1.0 / (static_cast<double>(nx_total) * static_cast<double>(nl));

    InvarianceReport r{shift, lattice, tol, std::sqrt(total * area) / norm_phi,
                       HGrid(p_count, 1, nx, nl, std::move(point_residual)), {}, std::move(degenerate), 0, false};
    for (auto& hq : h) r.h.emplace_back(p_count, 1, nx, nl, std::move(hq));
    r.degenerate_count = std::count(r.degenerate.begin(), r.degenerate.end(), std::uint8_t{1});
    r.member = r.residual <= tol;
    return r;
}

}  // namespace zakbench
