#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "hgrid.hpp"
#include "parallel.hpp"
#include "rational.hpp"
#include "zak.hpp"

namespace zakbench {

using MatrixXc = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXc = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

/// The canonical rational lattice (1/Q) Z x P Z with gcd(P, Q) = 1.
struct RationalLattice {
    std::int64_t q = 1;
    std::int64_t p = 1;

    RationalLattice() = default;
    RationalLattice(std::int64_t q_, std::int64_t p_) : q(q_), p(p_) {
        require(q >= 1 && p >= 1, "lattice parameters Q and P must be positive");
        require(std::gcd(q, p) == 1, "lattice requires gcd(P, Q) = 1 (got Q = " + std::to_string(q) +
                                         ", P = " + std::to_string(p) + ")");
    }

    Rational density() const { return Rational(q, p); }
    bool contains(const Rational& u, const Rational& eta) const {
        return (u * Rational(q)).is_integer() && (eta / Rational(p)).is_integer();
    }

    friend bool operator==(const RationalLattice&, const RationalLattice&) = default;
};

struct GridPoint {
    Rational x;
    Rational omega;
};

/// Q x P Zibulski-Zeevi matrices Phi[q][p] = Z phi(x - q/Q - p/P, omega) for
/// (x, omega) on the grid of [0, 1/P) x [0, 1).
class ZZField {
public:
    ZZField(RationalLattice lattice, std::int64_t nx_total, std::int64_t nl, std::vector<cplx> entries)
        : lattice_(lattice), nx_total_(nx_total), nl_(nl), entries_(std::move(entries)) {
        require(entries_.size() == static_cast<std::size_t>(points() * lattice_.q * lattice_.p),
                "Zibulski-Zeevi field entry count mismatch");
    }

    const RationalLattice& lattice() const noexcept { return lattice_; }
    /// x points per unit length of the underlying Zak grid.
    std::int64_t nx_total() const noexcept { return nx_total_; }
    /// x points in [0, 1/P).
    std::int64_t nx() const noexcept { return nx_total_ / lattice_.p; }
    std::int64_t nl() const noexcept { return nl_; }
    std::int64_t points() const noexcept { return nx() * nl_; }
    GridPoint point(std::int64_t j, std::int64_t m) const { return {Rational(j, nx_total_), Rational(m, nl_)}; }

    /// Matrix at x = j / Nx, omega = m / L (0 <= j < Nx / P).
    Eigen::Map<const MatrixXc> matrix(std::int64_t j, std::int64_t m) const {
        const std::size_t offset = static_cast<std::size_t>((j * nl_ + m) * lattice_.q * lattice_.p);
        return Eigen::Map<const MatrixXc>(entries_.data() + offset, lattice_.q, lattice_.p);
    }

    std::span<const cplx> entries() const noexcept { return entries_; }

private:
    RationalLattice lattice_;
    std::int64_t nx_total_;
    std::int64_t nl_;
    std::vector<cplx> entries_;  // column-major Q x P blocks, point-major
};

/// Populates the field by exact quasiperiodic lookups into the Zak grid.
inline ZZField zz_field(const ZakGrid& grid, const RationalLattice& lattice) {
    const std::int64_t need = std::lcm(lattice.p, lattice.q);
    if (grid.nx() % need != 0)
        fail("Nx = " + std::to_string(grid.nx()) + " must be divisible by lcm(P, Q) = " + std::to_string(need));
    const std::int64_t nx = grid.nx() / lattice.p, nl = grid.nl(), q = lattice.q, p = lattice.p;
    const std::int64_t step_q = grid.nx() / q, step_p = grid.nx() / p;
    std::vector<cplx> entries(static_cast<std::size_t>(nx * nl * q * p));
    parallel_for(static_cast<std::size_t>(nx), [&](std::size_t jj) {
        const auto j = static_cast<std::int64_t>(jj);
        for (std::int64_t m = 0; m < nl; ++m) {
            cplx* block = entries.data() + static_cast<std::size_t>((j * nl + m) * q * p);
            for (std::int64_t c = 0; c < p; ++c)
                for (std::int64_t r = 0; r < q; ++r) block[c * q + r] = grid.at(j - r * step_q - c * step_p, m);
        }
    });
    return ZZField(lattice, grid.nx(), nl, std::move(entries));
}

/// Essential bounds of the field realised as grid extrema of the squared
/// extreme singular values.
struct SpectralBounds {
    double lower = 0.0;        // A = min sigma_min^2
    double upper = 0.0;        // B = max sigma_max^2
    GridPoint argmin;
    GridPoint argmax;
    double rank_margin = 0.0;  // min sigma_min
};

namespace detail {

// Singular values in decreasing order; the Q-th one is zero when Q > P.
inline Eigen::VectorXd singular_values(const Eigen::Ref<const MatrixXc>& m) {
    Eigen::JacobiSVD<MatrixXc> svd(m);
    return svd.singularValues();
}

inline double smallest_row_singular_value(const Eigen::VectorXd& s, std::int64_t rows) {
    return s.size() < rows ? 0.0 : s(rows - 1);
}

}  // namespace detail

inline SpectralBounds riesz_bounds(const ZZField& field) {
    const std::int64_t nx = field.nx(), nl = field.nl(), q = field.lattice().q;
    struct RowExtrema {
        double lo = std::numeric_limits<double>::infinity(), hi = -1.0;
        std::int64_t lo_m = 0, hi_m = 0;
    };
    std::vector<RowExtrema> rows(static_cast<std::size_t>(nx));
    parallel_for(rows.size(), [&](std::size_t jj) {
        const auto j = static_cast<std::int64_t>(jj);
        RowExtrema e;
        for (std::int64_t m = 0; m < nl; ++m) {
            const Eigen::VectorXd s = detail::singular_values(field.matrix(j, m));
            const double smin = detail::smallest_row_singular_value(s, q);
            const double smax = s.size() > 0 ? s(0) : 0.0;
            if (smin < e.lo) { e.lo = smin; e.lo_m = m; }
            if (smax > e.hi) { e.hi = smax; e.hi_m = m; }
        }
        rows[jj] = e;
    });
    SpectralBounds b;
    double lo = std::numeric_limits<double>::infinity(), hi = -1.0;
    for (std::int64_t j = 0; j < nx; ++j) {
        const auto& e = rows[static_cast<std::size_t>(j)];
        if (e.lo < lo) { lo = e.lo; b.argmin = field.point(j, e.lo_m); }
        if (e.hi > hi) { hi = e.hi; b.argmax = field.point(j, e.hi_m); }
    }
    b.rank_margin = lo;
    b.lower = lo * lo;
    b.upper = hi * hi;
    return b;
}

/// Canonical dual field Psi = S^{-1} Phi with S = Phi Phi^*.
inline ZZField dual_field(const ZZField& field, double rank_tolerance = 1e-8) {
    const std::int64_t nx = field.nx(), nl = field.nl(), q = field.lattice().q, p = field.lattice().p;
    std::vector<cplx> entries(field.entries().size());
    std::vector<std::optional<GridPoint>> deficient(static_cast<std::size_t>(nx));
    parallel_for(static_cast<std::size_t>(nx), [&](std::size_t jj) {
        const auto j = static_cast<std::int64_t>(jj);
        for (std::int64_t m = 0; m < nl; ++m) {
            const auto phi = field.matrix(j, m);
            const Eigen::VectorXd s = detail::singular_values(phi);
            if (detail::smallest_row_singular_value(s, q) <= rank_tolerance) {
                if (!deficient[jj]) deficient[jj] = field.point(j, m);
                continue;
            }
            const MatrixXc frame = phi * phi.adjoint();
            const MatrixXc psi = frame.llt().solve(MatrixXc(phi));
            Eigen::Map<MatrixXc>(entries.data() + static_cast<std::size_t>((j * nl + m) * q * p), q, p) = psi;
        }
    });
    for (const auto& d : deficient)
        if (d) fail_numerical("rank deficiency: Zibulski-Zeevi matrix loses full row rank at (x, omega) = (" + d->x.str() +
                    ", " + d->omega.str() + ")");
    return ZZField(field.lattice(), field.nx_total(), nl, std::move(entries));
}

/// max over the grid of the Frobenius norm of Phi Psi^* - I.
inline double reproducing_defect(const ZZField& field, const ZZField& dual) {
    const std::int64_t nx = field.nx(), nl = field.nl(), q = field.lattice().q;
    std::vector<double> worst(static_cast<std::size_t>(nx), 0.0);
    parallel_for(worst.size(), [&](std::size_t jj) {
        const auto j = static_cast<std::int64_t>(jj);
        for (std::int64_t m = 0; m < nl; ++m) {
            const MatrixXc e = field.matrix(j, m) * dual.matrix(j, m).adjoint() - MatrixXc::Identity(q, q);
            worst[jj] = std::max(worst[jj], e.norm());
        }
    });
    double w = 0.0;
    for (double v : worst) w = std::max(w, v);
    return w;
}

}  // namespace zakbench
