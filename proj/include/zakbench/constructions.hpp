#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "error.hpp"
#include "gabor.hpp"
#include "hgrid.hpp"
#include "phase.hpp"
#include "rational.hpp"
#include "window.hpp"
#include "zak.hpp"

namespace zakbench {

// ---------------------------------------------------------------------------
// Window specifications

/// value on the half-open interval [a, b)
struct Piece {
    Rational a, b;
    cplx value;
    friend bool operator==(const Piece&, const Piece&) = default;
};

struct PiecewiseShape {
    std::vector<Piece> pieces;
    friend bool operator==(const PiecewiseShape&, const PiecewiseShape&) = default;
};

/// amplitude * exp(-pi (x / width)^2) on |x| <= cutoff
struct GaussianShape {
    double width = 1.0;
    double amplitude = 1.0;
    Rational cutoff{8};
    friend bool operator==(const GaussianShape&, const GaussianShape&) = default;
};

/// amplitude * B_order(x / scale), B_1 = indicator of [0, 1), B_n = B_{n-1} * B_1
struct BSplineShape {
    int order = 2;
    Rational scale{1};
    double amplitude = 1.0;
    friend bool operator==(const BSplineShape&, const BSplineShape&) = default;
};

/// The smooth multiplier construction; L is the omega resolution used for inversion.
struct Example2Shape {
    double eps = 0.3;
    int sign = -1;
    std::int64_t nl = 64;
    friend bool operator==(const Example2Shape&, const Example2Shape&) = default;
};

struct RawShape {
    std::int64_t rate = 1;
    std::int64_t start = 0;
    std::vector<cplx> samples;
    friend bool operator==(const RawShape&, const RawShape&) = default;
};

struct WindowSpec {
    std::variant<PiecewiseShape, GaussianShape, BSplineShape, Example2Shape, RawShape> shape;
    std::int64_t n = 720;
    std::string label;
    friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

inline const char* variant_name(const WindowSpec& spec) {
    static constexpr const char* names[] = {"piecewise", "gaussian", "bspline", "example2", "raw"};
    return names[spec.shape.index()];
}

namespace detail {

inline void require_rate_multiple(std::int64_t n, std::int64_t d, const std::string& what) {
    if (n % d != 0)
        fail("N = " + std::to_string(n) + " is not divisible by " + std::to_string(d) + " (" + what + ")");
}

inline double bspline_value(int order, double x) {
    if (x < 0.0 || x >= static_cast<double>(order)) return 0.0;
    if (order == 1) return 1.0;
    double acc = 0.0, binom = 1.0, fact = 1.0;
    for (int k = 1; k < order; ++k) fact *= k;
    for (int k = 0; k <= order && k <= static_cast<int>(std::floor(x)); ++k) {
        const double term = binom * std::pow(x - k, order - 1);
        acc += (k % 2 == 0) ? term : -term;
        binom = binom * (order - k) / (k + 1);
    }
    return acc / fact;
}

}  // namespace detail

inline SampledWindow sample_piecewise(const PiecewiseShape& shape, std::int64_t n, std::string label = {}) {
    require(!shape.pieces.empty(), "piecewise window needs at least one interval");
    std::int64_t lo = 0, hi = 0;
    bool first = true;
    for (const auto& p : shape.pieces) {
        require(p.a < p.b, "piecewise interval [" + p.a.str() + ", " + p.b.str() + ") is empty");
        for (const Rational& e : {p.a, p.b})
            if (!(e * Rational(n)).is_integer())
                detail::require_rate_multiple(n, e.den(), "breakpoint " + e.str() + " must lie on the grid");
        const std::int64_t a = (p.a * Rational(n)).num(), b = (p.b * Rational(n)).num();
        lo = first ? a : std::min(lo, a);
        hi = first ? b : std::max(hi, b);
        first = false;
    }
    std::vector<cplx> v(static_cast<std::size_t>(hi - lo), cplx{0.0, 0.0});
    for (const auto& p : shape.pieces) {
        const std::int64_t a = (p.a * Rational(n)).num(), b = (p.b * Rational(n)).num();
        for (std::int64_t j = a; j < b; ++j) v[static_cast<std::size_t>(j - lo)] += p.value;
    }
    return {n, lo, std::move(v), std::move(label)};
}

inline SampledWindow sample_gaussian(const GaussianShape& g, std::int64_t n, std::string label = {}) {
    require(g.width > 0.0 && std::isfinite(g.width), "gaussian width must be positive");
    require(g.cutoff > Rational(0), "gaussian cutoff must be positive");
    const std::int64_t reach = (g.cutoff * Rational(n)).floor();
    std::vector<cplx> v(static_cast<std::size_t>(2 * reach + 1));
    for (std::int64_t j = -reach; j <= reach; ++j) {
        const double x = static_cast<double>(j) / static_cast<double>(n) / g.width;
        v[static_cast<std::size_t>(j + reach)] = g.amplitude * std::exp(-std::numbers::pi * x * x);
    }
    return {n, -reach, std::move(v), std::move(label)};
}

/// Largest sample magnitude dropped by truncating a Gaussian at its cutoff.
inline double gaussian_tail_bound(const GaussianShape& g) {
    const double c = g.cutoff.to_double() / g.width;
    return std::abs(g.amplitude) * std::exp(-std::numbers::pi * c * c);
}

inline SampledWindow sample_bspline(const BSplineShape& s, std::int64_t n, std::string label = {}) {
    require(s.order >= 1 && s.order <= 12, "B-spline order must lie in [1, 12]");
    require(s.scale > Rational(0), "B-spline scale must be positive");
    const Rational span = s.scale * Rational(s.order) * Rational(n);
    const std::int64_t count = span.is_integer() ? span.num() : span.floor() + 1;
    std::vector<cplx> v(static_cast<std::size_t>(count));
    const double inv = 1.0 / (s.scale.to_double() * static_cast<double>(n));
    for (std::int64_t j = 0; j < count; ++j)
        v[static_cast<std::size_t>(j)] = s.amplitude * detail::bspline_value(s.order, static_cast<double>(j) * inv);
    return {n, 0, std::move(v), std::move(label)};
}

// ---------------------------------------------------------------------------
// Standard control windows

inline SampledWindow indicator_window(const Rational& a, const Rational& b, std::int64_t n) {
    return sample_piecewise({{{a, b, cplx{1.0, 0.0}}}}, n, "indicator[" + a.str() + "," + b.str() + ")");
}

/// exp(-pi (x/width)^2) truncated at |x| <= 8 width; the normalized variant has unit L2 norm.
inline SampledWindow gaussian_window(double width, std::int64_t n, bool normalized = false) {
    GaussianShape g;
    g.width = width;
    g.amplitude = normalized ? std::pow(2.0, 0.25) / std::sqrt(width) : 1.0;
    g.cutoff = Rational(static_cast<std::int64_t>(std::llround(8.0 * width * 1024.0)), 1024);
    return sample_gaussian(g, n, normalized ? "gaussian(normalized)" : "gaussian");
}

inline SampledWindow bspline_window(int order, std::int64_t n) {
    return sample_bspline({order, Rational(1), 1.0}, n, "bspline" + std::to_string(order));
}

// ---------------------------------------------------------------------------
// First example: piecewise-constant windows on sixths

inline PiecewiseShape example1_shape() {
    return {{{Rational(-5, 6), Rational(-2, 3), cplx{0.5, 0.0}},
             {Rational(0), Rational(1, 6), cplx{2.0, 0.0}},
             {Rational(1, 3), Rational(1, 2), cplx{2.0, 0.0}},
             {Rational(1, 2), Rational(1), cplx{1.0, 0.0}}}};
}

inline PiecewiseShape example1_corrected_shape() {
    return {{{Rational(1, 6), Rational(1, 3), cplx{2.0, 0.0}},
             {Rational(1, 2), Rational(1), cplx{1.0, 0.0}},
             {Rational(1), Rational(7, 6), cplx{0.5, 0.0}},
             {Rational(4, 3), Rational(3, 2), cplx{0.5, 0.0}}}};
}

/// 1/2 on [-5/6, -2/3), 2 on [0, 1/6) and [1/3, 1/2), 1 on [1/2, 1).
inline SampledWindow example1_window(std::int64_t n) {
    detail::require_rate_multiple(n, 6, "the window has breakpoints at multiples of 1/6");
    return sample_piecewise(example1_shape(), n, "example1");
}

/// h* = 2 on even sixth-cells and e^{sign 2 pi i omega}/2 on odd ones, sampled on [0, 1/3) x [0, 1).
inline HGrid example1_corrected_multiplier(std::int64_t n, std::int64_t nl, int sign = -1) {
    detail::require_rate_multiple(n, 6, "the multiplier has breakpoints at multiples of 1/6");
    return HGrid::sample(3, 1, n / 3, nl, [&](const Rational& x, const Rational& w) {
        const std::int64_t cell = (x * Rational(6)).floor();
        return cell % 2 == 0 ? cplx{2.0, 0.0} : 0.5 * unit_phase(Rational(sign) * w);
    });
}

struct CorrectedExample1 {
    SampledWindow window;
    HGrid h;
};

inline CorrectedExample1 example1_corrected(std::int64_t n, std::int64_t nl) {
    detail::require_rate_multiple(n, 6, "the window has breakpoints at multiples of 1/6");
    return {sample_piecewise(example1_corrected_shape(), n, "example1-corrected"),
            example1_corrected_multiplier(n, nl)};
}

// ---------------------------------------------------------------------------
// Builder for windows characterised by conditions (S), (Q), (P)

/// scale * e^{2 pi i power omega}
struct CellValue {
    cplx scale{1.0, 0.0};
    std::int64_t omega_power = 0;
    friend bool operator==(const CellValue&, const CellValue&) = default;
};

/// Values on the uniform cells [k/n, (k+1)/n) of [0, 1).
struct CellTable {
    std::vector<CellValue> cells;
    friend bool operator==(const CellTable&, const CellTable&) = default;
};

/// u(x) on [0, 1/2) and e^{sign 2 pi i omega} / u(x - 1/2) on [1/2, 1), u = exp(eps sin 6 pi x).
struct SmoothMultiplier {
    double eps = 0.3;
    friend bool operator==(const SmoothMultiplier&, const SmoothMultiplier&) = default;
};

/// v(x) = exp(-1 / ((x - 1/2)(1 - x))) on (1/2, 1), zero elsewhere.
struct BumpSeed {
    friend bool operator==(const BumpSeed&, const BumpSeed&) = default;
};

struct SQPSpec {
    std::int64_t R = 2;
    std::int64_t P = 3;
    std::variant<CellTable, SmoothMultiplier> h;
    /// only its values on [(R-1)/R, 1) are used
    std::variant<CellTable, BumpSeed> seed;
    int sign = -1;
    friend bool operator==(const SQPSpec&, const SQPSpec&) = default;
};

inline double example2_u(double eps, double x) { return std::exp(eps * std::sin(6.0 * std::numbers::pi * x)); }

inline double example2_v(double x) {
    if (x <= 0.5 || x >= 1.0) return 0.0;
    return std::exp(-1.0 / ((x - 0.5) * (1.0 - x)));
}

namespace detail {

// u at an exact grid position; sin(6 pi x) is read off the unit-modulus phase
// table so that u(x) u(x + 1/6) = 1 up to one rounding of exp.
inline double example2_u_exact(double eps, const Rational& x) {
    return std::exp(eps * unit_phase(Rational(3) * x).imag());
}

inline cplx eval_cells(const CellTable& t, const Rational& x, const Rational& w) {
    const Rational xf = x.frac();
    const std::int64_t cell = (xf * Rational(static_cast<std::int64_t>(t.cells.size()))).floor();
    const CellValue& c = t.cells[static_cast<std::size_t>(cell)];
    return c.omega_power == 0 ? c.scale : c.scale * unit_phase(Rational(c.omega_power) * w);
}

inline void require_cells_on_grid(const CellTable& t, std::int64_t nx, const char* what) {
    require(!t.cells.empty(), std::string(what) + " cell table is empty");
    if (nx % static_cast<std::int64_t>(t.cells.size()) != 0)
        fail("Nx = " + std::to_string(nx) + " is not divisible by " + std::to_string(t.cells.size()) + " (" + what +
             " cell breakpoints must lie on the grid)");
}

}  // namespace detail

inline cplx evaluate_multiplier(const SQPSpec& spec, const Rational& x, const Rational& w) {
    if (const auto* t = std::get_if<CellTable>(&spec.h)) return detail::eval_cells(*t, x, w);
    const double eps = std::get<SmoothMultiplier>(spec.h).eps;
    const Rational xf = x.frac();
    if (xf < Rational(1, 2)) return {detail::example2_u_exact(eps, xf), 0.0};
    return unit_phase(Rational(spec.sign) * w) / detail::example2_u_exact(eps, xf - Rational(1, 2));
}

inline cplx evaluate_seed(const SQPSpec& spec, const Rational& x, const Rational& w) {
    if (const auto* t = std::get_if<CellTable>(&spec.seed)) return detail::eval_cells(*t, x, w);
    return {example2_v(x.to_double()), 0.0};
}

struct SQPConstruction {
    ZakGrid F;
    SampledWindow window;
    /// h on [0, 1) x [0, 1) with P1 = 1
    HGrid h;
};

/// Drops leading and trailing samples with modulus at most `threshold`.
inline SampledWindow trimmed(const SampledWindow& w, double threshold = 1e-13) {
    const auto s = w.samples();
    std::size_t a = 0, b = s.size();
    while (a < b && std::abs(s[a]) <= threshold) ++a;
    while (b > a && std::abs(s[b - 1]) <= threshold) --b;
    if (a == b) return {w.rate(), w.start(), {cplx{0.0, 0.0}}, w.label()};
    return {w.rate(), w.start() + static_cast<std::int64_t>(a), std::vector<cplx>(s.begin() + a, s.begin() + b), w.label()};
}

/// Fills F on [(R-1)/R, 1) from the seed, extends it downward by
/// F(x, w) = h(x + 1/R, w) F(x + 1/R, w) and inverts the Zak transform.
inline SQPConstruction construct_from_sqp(const SQPSpec& spec, std::int64_t nx, std::int64_t nl) {
    require(spec.R >= 1 && spec.P >= 1, "R and P must be positive integers");
    require(spec.sign == 1 || spec.sign == -1, "sign must be +1 or -1");
    require(nl >= 1, "omega resolution must be positive");
    if (nx % spec.R != 0)
        fail("Nx = " + std::to_string(nx) + " is not divisible by R = " + std::to_string(spec.R));
    if (const auto* t = std::get_if<CellTable>(&spec.h)) detail::require_cells_on_grid(*t, nx, "multiplier");
    if (const auto* t = std::get_if<CellTable>(&spec.seed)) detail::require_cells_on_grid(*t, nx, "seed");
    if (std::holds_alternative<SmoothMultiplier>(spec.h)) {
        const double eps = std::get<SmoothMultiplier>(spec.h).eps;
        require(eps != 0.0 && std::abs(eps) <= std::numbers::ln2, "eps must satisfy 0 < |eps| <= ln 2");
        if (nx % 2 != 0) fail("Nx = " + std::to_string(nx) + " is not divisible by 2 (multiplier breakpoint at 1/2)");
    }

    HGrid h = HGrid::sample(1, 1, nx, nl, [&](const Rational& x, const Rational& w) {
        return evaluate_multiplier(spec, x, w);
    });
    const std::int64_t stride = nx / spec.R;
    std::vector<cplx> f(static_cast<std::size_t>(nx * nl));
    for (std::int64_t j = nx - stride; j < nx; ++j)
        for (std::int64_t m = 0; m < nl; ++m)
            f[static_cast<std::size_t>(j * nl + m)] = evaluate_seed(spec, Rational(j, nx), Rational(m, nl));
    for (std::int64_t j = nx - stride - 1; j >= 0; --j)
        for (std::int64_t m = 0; m < nl; ++m)
            f[static_cast<std::size_t>(j * nl + m)] =
                h.stored(j + stride, m) * f[static_cast<std::size_t>((j + stride) * nl + m)];

    const std::int64_t k_min = -(nl / 2);
    ZakGrid F(nx, nl, k_min, k_min + nl - 1, std::move(f));
    SampledWindow w = trimmed(zak_invert(F, "sqp"));
    return {std::move(F), std::move(w), std::move(h)};
}

struct SQPDefects {
    double s = 0.0;  // max |F(x - 1/R, w) - h(x, w) F(x, w)| on [1/R, 1)
    double q = 0.0;  // max |prod_r h(x + r/R, w) - e^{sign 2 pi i w}| on supp F within [0, 1/P)
    double p = 0.0;  // max |h(x + 1/P, w) - h(x, w)|
};

inline SQPDefects sqp_check(const ZakGrid& F, const HGrid& h, std::int64_t R, std::int64_t P, int sign) {
    require(R >= 1 && P >= 1, "R and P must be positive integers");
    require(sign == 1 || sign == -1, "sign must be +1 or -1");
    const std::int64_t nx = F.nx(), nl = F.nl();
    if (h.p1() * h.nx() != nx || h.p2() * h.nl() != nl)
        fail("multiplier grid is not aligned with the Zak grid");
    if (nx % R != 0) fail("Nx = " + std::to_string(nx) + " is not divisible by R = " + std::to_string(R));
    if (nx % P != 0) fail("Nx = " + std::to_string(nx) + " is not divisible by P = " + std::to_string(P));
    const std::int64_t sr = nx / R, sp = nx / P;
    const PhaseTable phases(nl);

    SQPDefects d;
    for (std::int64_t j = sr; j < nx; ++j)
        for (std::int64_t m = 0; m < nl; ++m)
            d.s = std::max(d.s, std::abs(F.at(j - sr, m) - h.at(j, m) * F.stored(j, m)));
    for (std::int64_t j = 0; j < sp; ++j)
        for (std::int64_t m = 0; m < nl; ++m) {
            if (F.stored(j, m) == cplx{0.0, 0.0}) continue;
            cplx prod{1.0, 0.0};
            for (std::int64_t r = 0; r < R; ++r) prod *= h.at(j + r * sr, m);
            d.q = std::max(d.q, std::abs(prod - phases(sign * m)));
        }
    for (std::int64_t j = 0; j < nx; ++j)
        for (std::int64_t m = 0; m < nl; ++m) d.p = std::max(d.p, std::abs(h.at(j + sp, m) - h.at(j, m)));
    return d;
}

/// The corrected first example as a builder input: R = 2, P = 3, seed 1 on [1/2, 1).
inline SQPSpec example1_sqp(int sign = -1) {
    SQPSpec s;
    s.R = 2;
    s.P = 3;
    s.sign = sign;
    CellTable h;
    for (int k = 0; k < 6; ++k)
        h.cells.push_back(k % 2 == 0 ? CellValue{cplx{2.0, 0.0}, 0} : CellValue{cplx{0.5, 0.0}, sign});
    s.h = h;
    s.seed = CellTable{{CellValue{cplx{1.0, 0.0}, 0}}};
    return s;
}

inline SQPSpec example2_sqp(double eps, int sign = -1) {
    SQPSpec s;
    s.R = 2;
    s.P = 3;
    s.sign = sign;
    s.h = SmoothMultiplier{eps};
    s.seed = BumpSeed{};
    return s;
}

struct Example2 {
    SampledWindow window;
    ZakGrid F;
    HGrid h;
    std::function<double(double)> u;
    std::function<double(double)> v;
};

inline Example2 example2_window(double eps, std::int64_t n, std::int64_t nl = 64, int sign = -1) {
    require(eps != 0.0 && std::abs(eps) <= std::numbers::ln2, "eps must satisfy 0 < |eps| <= ln 2");
    detail::require_rate_multiple(n, 6, "the multiplier is built on sixths");
    auto built = construct_from_sqp(example2_sqp(eps, sign), n, nl);
    return {built.window.with_label("example2"), std::move(built.F), std::move(built.h),
            [eps](double x) { return example2_u(eps, x); }, [](double x) { return example2_v(x); }};
}

// ---------------------------------------------------------------------------
// Realisation, support, smoothness

inline SampledWindow realize(const WindowSpec& spec) {
    require(spec.n >= 1, "N must be a positive integer");
    return std::visit(
        [&](const auto& s) -> SampledWindow {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, PiecewiseShape>) return sample_piecewise(s, spec.n, spec.label);
            else if constexpr (std::is_same_v<T, GaussianShape>) return sample_gaussian(s, spec.n, spec.label);
            else if constexpr (std::is_same_v<T, BSplineShape>) return sample_bspline(s, spec.n, spec.label);
            else if constexpr (std::is_same_v<T, Example2Shape>)
                return example2_window(s.eps, spec.n, s.nl, s.sign).window.with_label(spec.label);
            else return SampledWindow(s.rate, s.start, s.samples, spec.label);
        },
        spec.shape);
}

struct Support {
    Rational lo, hi;
    bool empty = true;
};

/// Smallest grid interval containing every sample with modulus above the threshold.
inline Support measured_support(const SampledWindow& w, double threshold = 1e-13) {
    Support s;
    const auto v = w.samples();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) <= threshold) continue;
        if (s.empty) s.lo = w.position(i);
        s.hi = w.position(i);
        s.empty = false;
    }
    return s;
}

/// |D^k w(b+) - D^k w(b-)| for k = 0..max_order, with forward difference
/// quotients from the samples at and right of b and backward ones from the
/// samples left of b.
inline std::vector<double> difference_jumps(const SampledWindow& w, const Rational& b, int max_order = 3) {
    std::int64_t jb = 0;
    if (!grid_index(b, w.rate(), jb)) fail("point " + b.str() + " is not on the window's grid");
    const double step = 1.0 / static_cast<double>(w.rate());
    std::vector<double> out;
    std::vector<cplx> right(static_cast<std::size_t>(max_order + 1)), left(right.size());
    for (int i = 0; i <= max_order; ++i) {
        right[static_cast<std::size_t>(i)] = w.at_index(jb + i);
        left[static_cast<std::size_t>(i)] = w.at_index(jb - 1 - i);
    }
    double scale = 1.0;
    for (int k = 0; k <= max_order; ++k) {
        out.push_back(std::abs(right[0] - left[0]) / scale);
        for (int i = 0; i + k < max_order; ++i) {
            right[static_cast<std::size_t>(i)] = right[static_cast<std::size_t>(i + 1)] - right[static_cast<std::size_t>(i)];
            left[static_cast<std::size_t>(i)] = left[static_cast<std::size_t>(i)] - left[static_cast<std::size_t>(i + 1)];
        }
        scale *= step;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dilation normalisation of separable lattices

struct Normalized {
    WindowSpec spec;
    RationalLattice lattice;
    Rational a;
};

/// Maps G(g, alpha Z x beta Z) with alpha beta = P/Q to G(D_a g, (1/Q) Z x P Z)
/// where (D_a f)(x) = a^{-1/2} f(x / a) and a = 1 / (Q alpha).
inline Normalized dilate_normalize(const WindowSpec& spec, const Rational& alpha, const Rational& beta) {
    require(alpha > Rational(0) && beta > Rational(0), "alpha and beta must be positive rationals");
    const Rational density = alpha * beta;
    const RationalLattice lattice(density.den(), density.num());
    const Rational a = Rational(1) / (Rational(lattice.q) * alpha);
    const double gain = 1.0 / std::sqrt(a.to_double());

    Normalized out{spec, lattice, a};
    if (a == Rational(1)) return out;
    std::visit(
        [&](auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, PiecewiseShape>) {
                for (auto& p : s.pieces) {
                    p.a = p.a * a;
                    p.b = p.b * a;
                    p.value *= gain;
                }
            } else if constexpr (std::is_same_v<T, GaussianShape>) {
                s.width *= a.to_double();
                s.amplitude *= gain;
                s.cutoff = s.cutoff * a;
            } else if constexpr (std::is_same_v<T, BSplineShape>) {
                s.scale = s.scale * a;
                s.amplitude *= gain;
            } else if constexpr (std::is_same_v<T, Example2Shape>) {
                fail("dilation is not available for the example2 variant; its lattice is already canonical");
            } else {
                const Rational rate = Rational(s.rate) / a;
                if (!rate.is_integer())
                    fail("raw window rate " + std::to_string(s.rate) + " divided by a = " + a.str() +
                         " is not an integer");
                s.rate = rate.num();
                for (auto& v : s.samples) v *= gain;
            }
        },
        out.spec.shape);
    return out;
}

}  // namespace zakbench
