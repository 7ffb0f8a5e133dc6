#include <gtest/gtest.h>

#include <zakbench/constructions.hpp>
#include <zakbench/invariance.hpp>
#include <zakbench/oracles.hpp>

using namespace zakbench;

namespace {
constexpr std::int64_t kN = 720;
constexpr std::int64_t kL = 64;
}  // namespace

TEST(ZakDirect, AgreesWithGrid) {
    for (const SampledWindow& w : {example1_window(kN), gaussian_window(1.0, kN), bspline_window(3, kN)}) {
        const ZakGrid g = zak(w, kL);
        double worst = 0.0;
        for (std::int64_t j = 0; j < kN; j += 7)
            for (std::int64_t m = 0; m < kL; m += 3)
                worst = std::max(worst, std::abs(oracle::zak_direct(w, j, static_cast<double>(m) / kL) - g.stored(j, m)));
        EXPECT_LE(worst, 1e-12) << w.label();
    }
}

TEST(ZakDirect, IndicesOutsideTheUnitInterval) {
    const SampledWindow w = example1_window(kN);
    const ZakGrid g = zak(w, kL);
    for (const std::int64_t j : {std::int64_t{-900}, std::int64_t{-1}, kN, 2 * kN + 5})
        EXPECT_LE(std::abs(oracle::zak_direct(w, j, 0.25) - g.at(j, kL / 4)), 1e-14);
}

TEST(Oracle, DisplayedExample1) {
    const double r = oracle::weighted_variance_residual(example1_window(kN), 3, {Rational(1, 2), Rational(0)}, {36, 16});
    EXPECT_NEAR(r, 4.0 / 9.0, 1e-12);
}

TEST(Oracle, TwoRoutesAgreeForQEqualsOne) {
    const SampledWindow w = gaussian_window(1.0, kN);
    for (const TimeFrequencyShift s : {TimeFrequencyShift{Rational(1, 2), Rational(0)},
                                       TimeFrequencyShift{Rational(1, 6), Rational(1, 4)}}) {
        const double a = oracle::weighted_variance_residual(w, 3, s, {72, 16});
        const double b = oracle::normal_equations_residual(w, 1, 3, s, {72, 16});
        EXPECT_NEAR(a, b, 1e-10) << s.str();
    }
}

TEST(Oracle, MatchesPipelineForQEqualsTwo) {
    const SampledWindow w = gaussian_window(0.5, kN);
    const TimeFrequencyShift s{Rational(1, 4), Rational(0)};
    const double pipeline = invariance_test(zak(w, kL), RationalLattice(2, 3), s).residual;
    EXPECT_NEAR(oracle::normal_equations_residual(w, 2, 3, s, {kN, kL}), pipeline, 1e-8);
}

TEST(Oracle, GridMustDivideSamples) {
    const SampledWindow w = example1_window(kN);
    EXPECT_THROW((void)oracle::weighted_variance_residual(w, 3, {Rational(1, 2), Rational(0)}, {35, 16}), Error);
    EXPECT_THROW((void)oracle::weighted_variance_residual(w, 3, {Rational(1, 7), Rational(0)}, {36, 16}), Error);
}
