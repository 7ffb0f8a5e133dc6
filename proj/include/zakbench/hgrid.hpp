#pragma once

#include <algorithm>
#include <functional>
#include <ostream>
#include <vector>

#include "error.hpp"
#include "phase.hpp"
#include "rational.hpp"
#include "zak.hpp"

namespace zakbench {

/// A multiplier sampled on [0, 1/P1) x [0, 1/P2) and extended periodically
/// with periods 1/P1 in x and 1/P2 in omega. Sample (j, m) sits at
/// x = j / (P1 nx), omega = m / (P2 nl).
class HGrid {
public:
    HGrid(std::int64_t p1, std::int64_t p2, std::int64_t nx, std::int64_t nl, std::vector<cplx> values)
        : p1_(p1), p2_(p2), nx_(nx), nl_(nl), values_(std::move(values)) {
        require(p1_ >= 1 && p2_ >= 1, "multiplier periods must be positive");
        require(nx_ >= 1 && nl_ >= 1, "multiplier resolutions must be positive");
        require(values_.size() == static_cast<std::size_t>(nx_ * nl_), "multiplier value count mismatch");
    }

    /// Samples f(x, omega) on the grid of an HGrid with the given shape.
    static HGrid sample(std::int64_t p1, std::int64_t p2, std::int64_t nx, std::int64_t nl,
                        const std::function<cplx(const Rational&, const Rational&)>& f) {
        std::vector<cplx> v(static_cast<std::size_t>(nx * nl));
        for (std::int64_t j = 0; j < nx; ++j)
            for (std::int64_t m = 0; m < nl; ++m)
                v[static_cast<std::size_t>(j * nl + m)] = f(Rational(j, p1 * nx), Rational(m, p2 * nl));
        return {p1, p2, nx, nl, std::move(v)};
    }

    std::int64_t p1() const noexcept { return p1_; }
    std::int64_t p2() const noexcept { return p2_; }
    std::int64_t nx() const noexcept { return nx_; }
    std::int64_t nl() const noexcept { return nl_; }
    Rational x_step() const { return Rational(1, p1_ * nx_); }
    Rational omega_step() const { return Rational(1, p2_ * nl_); }
    std::span<const cplx> values() const noexcept { return values_; }

    const cplx& stored(std::int64_t j, std::int64_t m) const noexcept {
        return values_[static_cast<std::size_t>(j * nl_ + m)];
    }

    /// Periodic accessor for arbitrary integer indices.
    const cplx& at(std::int64_t j, std::int64_t m) const noexcept {
        std::int64_t jj = j % nx_, mm = m % nl_;
        if (jj < 0) jj += nx_;
        if (mm < 0) mm += nl_;
        return stored(jj, mm);
    }

    cplx at(const Rational& x, const Rational& omega) const {
        std::int64_t j = 0, m = 0;
        if (!grid_index(x, p1_ * nx_, j) || !grid_index(omega, p2_ * nl_, m))
            fail("query not on multiplier grid: (" + x.str() + ", " + omega.str() + ")");
        return at(j, m);
    }

    double min_modulus() const noexcept {
        double v = std::abs(values_.front());
        for (const auto& z : values_) v = std::min(v, std::abs(z));
        return v;
    }

    double max_modulus() const noexcept {
        double v = 0.0;
        for (const auto& z : values_) v = std::max(v, std::abs(z));
        return v;
    }

    HGrid map(const std::function<cplx(const cplx&)>& f) const {
        std::vector<cplx> v(values_.size());
        std::transform(values_.begin(), values_.end(), v.begin(), f);
        return {p1_, p2_, nx_, nl_, std::move(v)};
    }

private:
    std::int64_t p1_, p2_, nx_, nl_;
    std::vector<cplx> values_;
};

inline void write_csv(std::ostream& os, const HGrid& h) {
    write_grid_csv(os, h.nx(), h.x_step(), h.nl(), h.omega_step(),
                   [&](std::int64_t j, std::int64_t m) { return h.stored(j, m); });
}

/// Fourier coefficients of h(x, omega) = sum c[k][l] e^{2 pi i (P1 l x + P2 k omega)}
/// on the index box [k_lo, k_hi] x [l_lo, l_hi].
struct CoefficientTable {
    std::int64_t p1 = 1, p2 = 1;
    std::int64_t k_lo = 0, k_hi = 0, l_lo = 0, l_hi = 0;
    std::vector<cplx> c;  // row-major in k, then l
    /// partial_l1[r] = sum of |c| over max(|k|, |l|) <= r within the box.
    std::vector<double> partial_l1;
    /// Fraction of the multiplier's mean square carried by the outermost ring of the box.
    double boundary_energy_fraction = 0.0;
    bool aliasing_warning = false;

    std::int64_t k_count() const noexcept { return k_hi - k_lo + 1; }
    std::int64_t l_count() const noexcept { return l_hi - l_lo + 1; }
    const cplx& at(std::int64_t k, std::int64_t l) const {
        require(k >= k_lo && k <= k_hi && l >= l_lo && l <= l_hi, "coefficient index outside the box");
        return c[static_cast<std::size_t>((k - k_lo) * l_count() + (l - l_lo))];
    }
};

struct IndexBox {
    std::int64_t k_lo, k_hi, l_lo, l_hi;

    /// Centred box |k| <= radius_k, |l| <= radius_l.
    static IndexBox centred(std::int64_t radius_k, std::int64_t radius_l) {
        return {-radius_k, radius_k, -radius_l, radius_l};
    }

    /// The complete set of DFT indices of an nx-by-nl multiplier grid.
    static IndexBox full(const HGrid& h) {
        return {-(h.nl() / 2), (h.nl() - 1) / 2, -(h.nx() / 2), (h.nx() - 1) / 2};
    }
};

/// 2-D discrete Fourier coefficients of a sampled multiplier. The box may not
/// exceed the grid in either direction, otherwise distinct indices would alias.
inline CoefficientTable coefficients_from_h(const HGrid& h, const IndexBox& box) {
    require(box.k_lo <= box.k_hi && box.l_lo <= box.l_hi, "empty coefficient box");
    if (box.k_hi - box.k_lo + 1 > h.nl() || box.l_hi - box.l_lo + 1 > h.nx())
        fail("coefficient box larger than the multiplier grid (" + std::to_string(h.nx()) + " x " +
             std::to_string(h.nl()) + " samples); refine the grid or shrink the box");
    CoefficientTable t;
    t.p1 = h.p1();
    t.p2 = h.p2();
    t.k_lo = box.k_lo;
    t.k_hi = box.k_hi;
    t.l_lo = box.l_lo;
    t.l_hi = box.l_hi;
    const std::int64_t nx = h.nx(), nl = h.nl(), kc = t.k_count(), lc = t.l_count();
    const PhaseTable tx(nx), tw(nl);

    // Stage 1: transform along omega for every x row.
    std::vector<cplx> partial(static_cast<std::size_t>(nx * kc));
    parallel_for(static_cast<std::size_t>(nx), [&](std::size_t jj) {
        const auto j = static_cast<std::int64_t>(jj);
        for (std::int64_t k = box.k_lo; k <= box.k_hi; ++k) {
            cplx acc{0.0, 0.0};
            for (std::int64_t m = 0; m < nl; ++m) acc += h.stored(j, m) * tw(-k * m);
            partial[static_cast<std::size_t>(j * kc + (k - box.k_lo))] = acc / static_cast<double>(nl);
        }
    });
    // Stage 2: transform along x.
    t.c.assign(static_cast<std::size_t>(kc * lc), cplx{0.0, 0.0});
    parallel_for(static_cast<std::size_t>(kc), [&](std::size_t kk) {
        for (std::int64_t l = box.l_lo; l <= box.l_hi; ++l) {
            cplx acc{0.0, 0.0};
            for (std::int64_t j = 0; j < nx; ++j)
                acc += partial[static_cast<std::size_t>(j * kc) + kk] * tx(-l * j);
            t.c[kk * static_cast<std::size_t>(lc) + static_cast<std::size_t>(l - box.l_lo)] = acc / static_cast<double>(nx);
        }
    });

    const std::int64_t r_max = std::max({-box.k_lo, box.k_hi, -box.l_lo, box.l_hi, std::int64_t{0}});
    std::vector<double> ring(static_cast<std::size_t>(r_max + 1), 0.0);
    for (std::int64_t k = box.k_lo; k <= box.k_hi; ++k)
        for (std::int64_t l = box.l_lo; l <= box.l_hi; ++l)
            ring[static_cast<std::size_t>(std::max(std::abs(k), std::abs(l)))] += std::abs(t.at(k, l));
    t.partial_l1.resize(ring.size());
    double run = 0.0;
    for (std::size_t r = 0; r < ring.size(); ++r) t.partial_l1[r] = (run += ring[r]);

    double total = 0.0;
    for (const auto& z : h.values()) total += norm2(z);
    total /= static_cast<double>(nx * nl);
    double boundary = 0.0;
    for (std::int64_t k = box.k_lo; k <= box.k_hi; ++k)
        for (std::int64_t l = box.l_lo; l <= box.l_hi; ++l)
            if (k == box.k_lo || k == box.k_hi || l == box.l_lo || l == box.l_hi) boundary += norm2(t.at(k, l));
    t.boundary_energy_fraction = total > 0.0 ? boundary / total : 0.0;
    t.aliasing_warning = t.boundary_energy_fraction > 1e-6;
    return t;
}

/// Evaluates the coefficient table back onto an nx-by-nl multiplier grid.
inline HGrid resynthesize(const CoefficientTable& t, std::int64_t nx, std::int64_t nl) {
    const PhaseTable tx(nx), tw(nl);
    const std::int64_t kc = t.k_count(), lc = t.l_count();
    // Stage 1: sum over l for every (x row, k).
    std::vector<cplx> partial(static_cast<std::size_t>(nx * kc));
    parallel_for(static_cast<std::size_t>(nx), [&](std::size_t jj) {
        const auto j = static_cast<std::int64_t>(jj);
        for (std::int64_t kk = 0; kk < kc; ++kk) {
            cplx acc{0.0, 0.0};
            for (std::int64_t ll = 0; ll < lc; ++ll)
                acc += t.c[static_cast<std::size_t>(kk * lc + ll)] * tx((t.l_lo + ll) * j);
            partial[static_cast<std::size_t>(j * kc + kk)] = acc;
        }
    });
    std::vector<cplx> v(static_cast<std::size_t>(nx * nl));
    parallel_for(static_cast<std::size_t>(nx), [&](std::size_t jj) {
        const auto j = static_cast<std::int64_t>(jj);
        for (std::int64_t m = 0; m < nl; ++m) {
            cplx acc{0.0, 0.0};
            for (std::int64_t kk = 0; kk < kc; ++kk)
                acc += partial[static_cast<std::size_t>(j * kc + kk)] * tw((t.k_lo + kk) * m);
            v[static_cast<std::size_t>(j * nl + m)] = acc;
        }
    });
    return {t.p1, t.p2, nx, nl, std::move(v)};
}

}  // namespace zakbench
