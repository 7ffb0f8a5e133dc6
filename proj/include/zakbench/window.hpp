#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "phase.hpp"
#include "rational.hpp"

namespace zakbench {

/// A finitely supported signal on the grid x = j / N. Sample i of the stored
/// range sits at x = (start + i) / N; everything outside is zero.
class SampledWindow {
public:
    SampledWindow(std::int64_t rate, std::int64_t start, std::vector<cplx> samples, std::string label = {})
        : rate_(rate), start_(start), samples_(std::move(samples)), label_(std::move(label)) {
        require(rate_ >= 1, "sample rate must be a positive integer");
        require(!samples_.empty(), "window needs at least one sample");
        for (const auto& s : samples_)
            require(std::isfinite(s.real()) && std::isfinite(s.imag()), "window amplitudes must be finite");
    }

    std::int64_t rate() const noexcept { return rate_; }
    std::int64_t start() const noexcept { return start_; }
    /// One past the last stored grid index.
    std::int64_t end() const noexcept { return start_ + static_cast<std::int64_t>(samples_.size()); }
    std::size_t size() const noexcept { return samples_.size(); }
    std::span<const cplx> samples() const noexcept { return samples_; }
    const std::string& label() const noexcept { return label_; }

    /// Sample at global grid index j (x = j / N), zero outside the stored range.
    cplx at_index(std::int64_t j) const noexcept {
        if (j < start_ || j >= end()) return {0.0, 0.0};
        return samples_[static_cast<std::size_t>(j - start_)];
    }

    /// Sample at an exact grid position.
    cplx value_at(const Rational& x) const {
        std::int64_t j = 0;
        if (!grid_index(x, rate_, j)) fail("position " + x.str() + " is not on the 1/" + std::to_string(rate_) + " grid");
        return at_index(j);
    }

    Rational position(std::size_t i) const { return Rational(start_ + static_cast<std::int64_t>(i), rate_); }

    /// (1/N) * sum |w_j|^2, accumulated in index order.
    double energy() const noexcept {
        double acc = 0.0;
        for (const auto& s : samples_) acc += norm2(s);
        return acc / static_cast<double>(rate_);
    }

    SampledWindow scaled(cplx factor) const {
        std::vector<cplx> out(samples_.begin(), samples_.end());
        for (auto& s : out) s *= factor;
        return {rate_, start_, std::move(out), label_};
    }

    SampledWindow with_label(std::string label) const { return {rate_, start_, samples_, std::move(label)}; }

private:
    std::int64_t rate_;
    std::int64_t start_;
    std::vector<cplx> samples_;
    std::string label_;
};

/// pi(u, eta) = M_eta T_u with exact rational coordinates.
struct TimeFrequencyShift {
    Rational u;
    Rational eta;

    friend bool operator==(const TimeFrequencyShift&, const TimeFrequencyShift&) = default;
    std::string str() const { return "(" + u.str() + ", " + eta.str() + ")"; }
};

/// Max |a - b| over the union of both grids; rates must agree.
inline double max_abs_difference(const SampledWindow& a, const SampledWindow& b) {
    require(a.rate() == b.rate(), "cannot compare windows sampled at different rates");
    const std::int64_t lo = std::min(a.start(), b.start()), hi = std::max(a.end(), b.end());
    double worst = 0.0;
    for (std::int64_t j = lo; j < hi; ++j) worst = std::max(worst, std::abs(a.at_index(j) - b.at_index(j)));
    return worst;
}

/// (pi(u, eta) w)(x) = e^{2 pi i eta x} w(x - u) on the window's own grid.
inline SampledWindow tf_shift(const SampledWindow& w, const TimeFrequencyShift& shift) {
    const Rational steps = shift.u * Rational(w.rate());
    if (!steps.is_integer())
        fail("shift not grid-aligned: u*N must be an integer (u = " + shift.u.str() + ", N = " +
             std::to_string(w.rate()) + "; N must be divisible by " + std::to_string(shift.u.den()) + ")");
    const std::int64_t new_start = w.start() + steps.num();
    std::vector<cplx> out(w.samples().begin(), w.samples().end());
    if (shift.eta != Rational(0)) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            const Rational x(new_start + static_cast<std::int64_t>(i), w.rate());
            out[i] = unit_phase(shift.eta * x) * out[i];
        }
    }
    return {w.rate(), new_start, std::move(out), w.label()};
}

}  // namespace zakbench
