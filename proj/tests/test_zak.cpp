#include <gtest/gtest.h>

#include <sstream>

#include <zakbench/constructions.hpp>
#include <zakbench/window.hpp>
#include <zakbench/zak.hpp>

using namespace zakbench;

namespace {

constexpr std::int64_t kN = 720;
constexpr std::int64_t kL = 64;

double relative_roundtrip(const SampledWindow& w, std::int64_t nl) {
    const SampledWindow back = zak_invert(zak(w, nl));
    double peak = 0.0;
    for (const auto& s : w.samples()) peak = std::max(peak, std::abs(s));
    return max_abs_difference(w, back) / peak;
}

}  // namespace

TEST(SampledWindow, RejectsBadInput) {
    EXPECT_THROW(SampledWindow(0, 0, {cplx{1.0, 0.0}}), Error);
    EXPECT_THROW(SampledWindow(4, 0, {}), Error);
    EXPECT_THROW(SampledWindow(4, 0, {cplx{std::nan(""), 0.0}}), Error);
}

TEST(SampledWindow, ValueAtExactPositions) {
    const SampledWindow w = example1_window(kN);
    EXPECT_EQ(w.value_at(Rational(-3, 4)), cplx(0.5, 0.0));
    EXPECT_EQ(w.value_at(Rational(1, 12)), cplx(2.0, 0.0));
    EXPECT_EQ(w.value_at(Rational(1, 4)), cplx(0.0, 0.0));
    EXPECT_EQ(w.value_at(Rational(1, 2)), cplx(1.0, 0.0));
    EXPECT_EQ(w.value_at(Rational(1)), cplx(0.0, 0.0));
    EXPECT_THROW((void)w.value_at(Rational(1, 7)), Error);
}

TEST(TfShift, TranslatesAndModulates) {
    const SampledWindow w = indicator_window(Rational(0), Rational(1), 12);
    const SampledWindow s = tf_shift(w, {Rational(1, 3), Rational(1, 4)});
    EXPECT_EQ(s.start(), 4);
    for (std::int64_t j = 4; j < 16; ++j) EXPECT_EQ(s.at_index(j), unit_phase(Rational(j, 48)));
}

TEST(TfShift, MisalignedShiftNamesTheDivisor) {
    const SampledWindow w = example1_window(kN);
    try {
        (void)tf_shift(w, {Rational(1, 7), Rational(0)});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::precondition);
        EXPECT_NE(std::string(e.what()).find("divisible by 7"), std::string::npos);
    }
}

// pi(u2, eta2) pi(u1, eta1) = e^{-2 pi i eta1 u2} pi(u1 + u2, eta1 + eta2)
TEST(TfShift, CompositionPhase) {
    const SampledWindow w = example1_window(kN);
    const TimeFrequencyShift s1{Rational(1, 6), Rational(1, 3)}, s2{Rational(-1, 2), Rational(5, 4)};
    const SampledWindow twice = tf_shift(tf_shift(w, s1), s2);
    const SampledWindow once = tf_shift(w, {s1.u + s2.u, s1.eta + s2.eta});
    const cplx phase = unit_phase(-(s1.eta * s2.u));
    EXPECT_LE(max_abs_difference(twice, once.scaled(phase)), 1e-13);
    // The opposite ordering of the factors is visibly different here.
    EXPECT_GT(max_abs_difference(twice, once.scaled(unit_phase(-(s2.eta * s1.u)))), 0.1);
}

TEST(Zak, IndicatorIsOneEverywhere) {
    const ZakGrid g = zak(indicator_window(Rational(0), Rational(1), 12), 8);
    for (std::int64_t j = 0; j < 12; ++j)
        for (std::int64_t m = 0; m < 8; ++m) EXPECT_EQ(g.stored(j, m), cplx(1.0, 0.0));
    EXPECT_EQ(g.k_min(), 0);
    EXPECT_EQ(g.k_max(), 0);
}

TEST(Zak, Example1ValuesByCell) {
    const ZakGrid g = zak(example1_window(kN), kL);
    // On [1/6, 1/3) only the translate by -1 contributes: (1/2) e^{2 pi i omega}.
    const Rational x(1, 4);
    for (std::int64_t m = 0; m < kL; ++m) {
        const Rational w(m, kL);
        EXPECT_EQ(g.lookup(x, w), 0.5 * unit_phase(w));
        EXPECT_EQ(g.lookup(Rational(3, 4), w), cplx(1.0, 0.0));
    }
    EXPECT_EQ(g.lookup(Rational(1, 12), Rational(0)), cplx(2.0, 0.0));
}

TEST(Zak, Quasiperiodicity) {
    const ZakGrid g = zak(example1_window(kN), kL);
    for (std::int64_t j = 0; j < kN; j += 37)
        for (std::int64_t m = 0; m < kL; m += 5) {
            EXPECT_EQ(g.at(j + kN, m), g.phases()(m) * g.at(j, m));
            EXPECT_EQ(g.at(j - 2 * kN, m), g.phases()(-2 * m) * g.at(j, m));
            EXPECT_EQ(g.at(j, m + kL), g.at(j, m));
        }
}

TEST(Zak, LookupOffGridFails) {
    const ZakGrid g = zak(example1_window(kN), kL);
    EXPECT_THROW((void)g.lookup(Rational(1, 7), Rational(0)), Error);
    EXPECT_THROW((void)g.lookup(Rational(0), Rational(1, 3)), Error);
}

TEST(Zak, OmegaResolutionBelowSupportSpan) {
    const SampledWindow w = gaussian_window(1.0, 48);
    try {
        (void)zak(w, 8);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("omega resolution below support span"), std::string::npos);
    }
}

TEST(Zak, UnitarityExactForPiecewiseConstant) {
    for (const SampledWindow& w : {indicator_window(Rational(0), Rational(1), kN), example1_window(kN),
                                   example1_corrected(kN, kL).window}) {
        const auto d = validate_zak(w, zak(w, kL), {Rational(1, 2), Rational(0)});
        EXPECT_EQ(d.unitarity_defect, 0.0) << w.label();
        EXPECT_EQ(d.covariance_defect, 0.0) << w.label();
    }
}

TEST(Zak, GaussianDefectsWithinBound) {
    const SampledWindow w = gaussian_window(1.0, kN);
    const ZakGrid g = zak(w, kL);
    for (const TimeFrequencyShift s : {TimeFrequencyShift{Rational(1, 2), Rational(0)},
                                       TimeFrequencyShift{Rational(-1, 3), Rational(1, 4)},
                                       TimeFrequencyShift{Rational(0), Rational(3, 64)}}) {
        const auto d = validate_zak(w, g, s);
        EXPECT_LE(d.unitarity_defect, 1e-10);
        EXPECT_LE(d.covariance_defect, 1e-10);
    }
}

TEST(Zak, ValidateRejectsMisalignedShift) {
    const SampledWindow w = example1_window(kN);
    const ZakGrid g = zak(w, kL);
    EXPECT_THROW((void)validate_zak(w, g, {Rational(1, 7), Rational(0)}), Error);
    EXPECT_THROW((void)validate_zak(w, g, {Rational(0), Rational(1, 3)}), Error);
}

TEST(ZakInvert, RoundTripIsBitExactForSinglePeriodDyadicData) {
    const SampledWindow w = indicator_window(Rational(0), Rational(1), kN);
    EXPECT_EQ(max_abs_difference(w, zak_invert(zak(w, kL))), 0.0);
}

TEST(ZakInvert, RoundTripOnFixtures) {
    EXPECT_LE(relative_roundtrip(example1_window(kN), kL), 1e-12);
    EXPECT_LE(relative_roundtrip(example1_corrected(kN, kL).window, kL), 1e-12);
    EXPECT_LE(relative_roundtrip(gaussian_window(1.0, kN), kL), 1e-12);
    EXPECT_LE(relative_roundtrip(bspline_window(3, 120), 16), 1e-12);
}

TEST(ZakInvert, AliasingIsReported) {
    const ZakGrid g(4, 2, -1, 1, std::vector<cplx>(8));
    EXPECT_THROW((void)zak_invert(g), Error);
}

TEST(ZakCsv, HeaderAndExactCoordinates) {
    const ZakGrid g = zak(indicator_window(Rational(0), Rational(1), 4), 2);
    std::ostringstream os;
    write_csv(os, g);
    const std::string text = os.str();
    EXPECT_EQ(text.rfind("x,omega,re,im\n0/1,0/1,1,0\n0/1,1/2,1,0\n1/4,0/1,", 0), 0u);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 9);
}
