#pragma once

#include <cstdio>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "error.hpp"
#include "parallel.hpp"
#include "phase.hpp"
#include "rational.hpp"
#include "window.hpp"

namespace zakbench {

/// Discrete Zak transform on the unit square, x = j / Nx, omega = m / L.
///
/// values(j, m) = sum_{k = k_min}^{k_max} f(j/Nx + k) e^{-2 pi i k m / L}
///
/// The grid is immutable. Off-square values come from the quasiperiodic
/// accessor, which applies e^{2 pi i n omega} for the removed integer part n
/// of x using the same phase table as the forward sum.
class ZakGrid {
public:
    ZakGrid(std::int64_t nx, std::int64_t nl, std::int64_t k_min, std::int64_t k_max, std::vector<cplx> values)
        : nx_(nx), nl_(nl), k_min_(k_min), k_max_(k_max), values_(std::move(values)),
          phases_(std::make_shared<PhaseTable>(nl)) {
        require(nx_ >= 1 && nl_ >= 1, "Zak grid resolutions must be positive");
        require(k_min_ <= k_max_, "empty period range");
        require(values_.size() == static_cast<std::size_t>(nx_ * nl_), "Zak grid value count mismatch");
    }

    std::int64_t nx() const noexcept { return nx_; }
    std::int64_t nl() const noexcept { return nl_; }
    std::int64_t k_min() const noexcept { return k_min_; }
    std::int64_t k_max() const noexcept { return k_max_; }
    std::int64_t period_span() const noexcept { return k_max_ - k_min_ + 1; }
    const PhaseTable& phases() const noexcept { return *phases_; }
    std::span<const cplx> values() const noexcept { return values_; }

    /// Stored value for 0 <= j < Nx, 0 <= m < L.
    const cplx& stored(std::int64_t j, std::int64_t m) const noexcept {
        return values_[static_cast<std::size_t>(j * nl_ + m)];
    }

    /// Zf(j/Nx, m/L) for arbitrary integers j and m.
    cplx at(std::int64_t j, std::int64_t m) const noexcept {
        std::int64_t n = j / nx_, r = j % nx_;
        if (r < 0) { r += nx_; --n; }
        std::int64_t mm = m % nl_;
        if (mm < 0) mm += nl_;
        const cplx& v = stored(r, mm);
        if (n == 0) return v;
        return (*phases_)(n * mm) * v;
    }

    /// Quasiperiodic lookup at exact grid rationals.
    cplx lookup(const Rational& x, const Rational& omega) const {
        std::int64_t j = 0, m = 0;
        if (!grid_index(x, nx_, j) || !grid_index(omega, nl_, m))
            fail("query not on grid: (" + x.str() + ", " + omega.str() + ") with Nx = " + std::to_string(nx_) +
                 ", L = " + std::to_string(nl_));
        return at(j, m);
    }

    /// (1/(Nx L)) sum |values|^2, rows accumulated in order.
    double energy() const noexcept {
        double acc = 0.0;
        for (std::int64_t j = 0; j < nx_; ++j) {
            double row = 0.0;
            for (std::int64_t m = 0; m < nl_; ++m) row += norm2(stored(j, m));
            acc += row;
        }
        return acc / static_cast<double>(nl_) / static_cast<double>(nx_);
    }

private:
    std::int64_t nx_, nl_, k_min_, k_max_;
    std::vector<cplx> values_;
    std::shared_ptr<const PhaseTable> phases_;
};

namespace detail {

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace detail

/// Exact finite Zak sum over the unit translates carrying samples.
inline ZakGrid zak(const SampledWindow& w, std::int64_t nl) {
    require(nl >= 1, "omega resolution must be positive");
    const std::int64_t nx = w.rate();
    const std::int64_t k_min = detail::floor_div(w.start(), nx);
    const std::int64_t k_max = detail::floor_div(w.end() - 1, nx);
    const std::int64_t span = k_max - k_min + 1;
    if (span > nl)
        fail("omega resolution below support span: L = " + std::to_string(nl) + " but the support covers " +
             std::to_string(span) + " unit periods");
    const PhaseTable table(nl);
    std::vector<cplx> values(static_cast<std::size_t>(nx * nl));
    parallel_for(static_cast<std::size_t>(nx), [&](std::size_t jj) {
        const auto j = static_cast<std::int64_t>(jj);
        std::vector<cplx> column(static_cast<std::size_t>(span));
        for (std::int64_t k = k_min; k <= k_max; ++k) column[static_cast<std::size_t>(k - k_min)] = w.at_index(j + k * nx);
        for (std::int64_t m = 0; m < nl; ++m) {
            cplx acc{0.0, 0.0};
            for (std::int64_t k = k_min; k <= k_max; ++k) {
                const cplx& f = column[static_cast<std::size_t>(k - k_min)];
                if (f == cplx{0.0, 0.0}) continue;
                acc += f * table(-k * m);
            }
            values[static_cast<std::size_t>(j * nl + m)] = acc;
        }
    });
    return ZakGrid(nx, nl, k_min, k_max, std::move(values));
}

/// f(x + k) = (1/L) sum_m Z(x, m/L) e^{2 pi i k m / L} for k in the grid's
/// period range. The result covers whole periods; see trimmed() for support.
inline SampledWindow zak_invert(const ZakGrid& grid, std::string label = {}) {
    const std::int64_t nx = grid.nx(), nl = grid.nl();
    if (grid.period_span() > nl)
        fail("aliasing: period range spans " + std::to_string(grid.period_span()) + " periods but L = " +
             std::to_string(nl));
    const std::int64_t span = grid.period_span();
    std::vector<cplx> out(static_cast<std::size_t>(span * nx));
    const PhaseTable& table = grid.phases();
    parallel_for(static_cast<std::size_t>(nx), [&](std::size_t jj) {
        const auto j = static_cast<std::int64_t>(jj);
        for (std::int64_t k = grid.k_min(); k <= grid.k_max(); ++k) {
            cplx acc{0.0, 0.0};
            for (std::int64_t m = 0; m < nl; ++m) acc += grid.stored(j, m) * table(k * m);
            out[static_cast<std::size_t>((k - grid.k_min()) * nx + j)] = acc / static_cast<double>(nl);
        }
    });
    return {nx, grid.k_min() * nx, std::move(out), std::move(label)};
}

struct ZakDiagnostics {
    double window_energy = 0.0;
    double grid_energy = 0.0;
    /// |grid energy - window energy| / window energy
    double unitarity_defect = 0.0;
    /// max over the grid of |Z(pi(u,eta) w)(x,w) - e^{2 pi i eta x} Zw(x - u, w - eta)|
    double covariance_defect = 0.0;
};

/// Checks the discrete Parseval identity and the covariance of the Zak
/// transform under a grid-aligned time-frequency shift.
inline ZakDiagnostics validate_zak(const SampledWindow& w, const ZakGrid& grid, const TimeFrequencyShift& shift) {
    require(grid.nx() == w.rate(), "Zak grid does not match the window's sample rate");
    const Rational du = shift.u * Rational(grid.nx());
    const Rational de = shift.eta * Rational(grid.nl());
    if (!du.is_integer())
        fail("shift not grid-aligned: u*Nx must be an integer (u = " + shift.u.str() + ", Nx = " +
             std::to_string(grid.nx()) + ")");
    if (!de.is_integer())
        fail("shift not grid-aligned: eta*L must be an integer (eta = " + shift.eta.str() + ", L = " +
             std::to_string(grid.nl()) + ")");

    ZakDiagnostics d;
    d.window_energy = w.energy();
    d.grid_energy = grid.energy();
    require(d.window_energy > 0.0, "zero-energy window");
    d.unitarity_defect = std::abs(d.grid_energy - d.window_energy) / d.window_energy;

    const ZakGrid shifted = zak(tf_shift(w, shift), grid.nl());
    const std::int64_t nx = grid.nx(), nl = grid.nl();
    std::vector<double> row_worst(static_cast<std::size_t>(nx), 0.0);
    parallel_for(static_cast<std::size_t>(nx), [&](std::size_t jj) {
        const auto j = static_cast<std::int64_t>(jj);
        const cplx modulation = shift.eta == Rational(0) ? cplx{1.0, 0.0} : unit_phase(shift.eta * Rational(j, nx));
        double worst = 0.0;
        for (std::int64_t m = 0; m < nl; ++m) {
            cplx expected = grid.at(j - du.num(), m - de.num());
            if (shift.eta != Rational(0)) expected = modulation * expected;
            worst = std::max(worst, std::abs(shifted.stored(j, m) - expected));
        }
        row_worst[jj] = worst;
    });
    for (double r : row_worst) d.covariance_defect = std::max(d.covariance_defect, r);
    return d;
}

/// Writes `x,omega,re,im` rows in x-major order with exact rational
/// coordinates and 17 significant digits.
template <class Accessor>
void write_grid_csv(std::ostream& os, std::int64_t x_count, const Rational& x_step, std::int64_t w_count,
                    const Rational& w_step, Accessor&& value) {
    os << "x,omega,re,im\n";
    char buf[96];
    for (std::int64_t j = 0; j < x_count; ++j) {
        const std::string xs = (x_step * Rational(j)).str();
        for (std::int64_t m = 0; m < w_count; ++m) {
            const cplx v = value(j, m);
            std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", v.real(), v.imag());
            os << xs << ',' << (w_step * Rational(m)).str() << buf;
        }
    }
}

inline void write_csv(std::ostream& os, const ZakGrid& grid) {
    write_grid_csv(os, grid.nx(), Rational(1, grid.nx()), grid.nl(), Rational(1, grid.nl()),
                   [&](std::int64_t j, std::int64_t m) { return grid.stored(j, m); });
}

}  // namespace zakbench
