#include <gtest/gtest.h>

#include <zakbench/phase.hpp>
#include <zakbench/rational.hpp>

using namespace zakbench;

TEST(Rational, KeepsLowestTerms) {
    const Rational r(6, -8);
    EXPECT_EQ(r.num(), -3);
    EXPECT_EQ(r.den(), 4);
    EXPECT_EQ(r.str(), "-3/4");
}

TEST(Rational, Arithmetic) {
    EXPECT_EQ(Rational(1, 2) + Rational(1, 3), Rational(5, 6));
    EXPECT_EQ(Rational(1, 2) - Rational(2, 3), Rational(-1, 6));
    EXPECT_EQ(Rational(3, 4) * Rational(2, 9), Rational(1, 6));
    EXPECT_EQ(Rational(3, 4) / Rational(3, 2), Rational(1, 2));
    EXPECT_LT(Rational(1, 3), Rational(1, 2));
    EXPECT_GT(Rational(-1, 3), Rational(-1, 2));
}

TEST(Rational, FloorAndFrac) {
    EXPECT_EQ(Rational(-1, 3).floor(), -1);
    EXPECT_EQ(Rational(-1, 3).frac(), Rational(2, 3));
    EXPECT_EQ(Rational(7, 3).floor(), 2);
    EXPECT_EQ(Rational(-3).frac(), Rational(0));
}

TEST(Rational, Parse) {
    EXPECT_EQ(Rational::parse("3/2"), Rational(3, 2));
    EXPECT_EQ(Rational::parse("-1/6"), Rational(-1, 6));
    EXPECT_EQ(Rational::parse("4"), Rational(4));
    EXPECT_EQ(Rational::parse("1.5"), Rational(3, 2));
    EXPECT_EQ(Rational::parse("-0.25"), Rational(-1, 4));
    EXPECT_EQ(Rational::parse("+2/4"), Rational(1, 2));
}

TEST(Rational, ParseErrorsArePreconditions) {
    for (const char* bad : {"", "1/0", "a/3", "1/2/3", "1.x", "--1"}) {
        try {
            (void)Rational::parse(bad);
            ADD_FAILURE() << "accepted '" << bad << "'";
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::precondition) << bad;
        }
    }
}

TEST(Rational, OverflowIsReported) {
    const Rational big(INT64_MAX / 2 + 1);
    EXPECT_THROW((void)(big * Rational(4)), Error);
    EXPECT_THROW((void)(Rational(1) / Rational(0)), Error);
}

TEST(Rational, GridIndex) {
    std::int64_t j = 0;
    EXPECT_TRUE(grid_index(Rational(-5, 6), 720, j));
    EXPECT_EQ(j, -600);
    EXPECT_FALSE(grid_index(Rational(1, 7), 720, j));
    EXPECT_EQ(lcm_of({6, 3, 4}), 12);
}

TEST(UnitPhase, ExactAtQuarterTurns) {
    EXPECT_EQ(unit_phase(Rational(0)), cplx(1.0, 0.0));
    EXPECT_EQ(unit_phase(Rational(1, 4)), cplx(0.0, 1.0));
    EXPECT_EQ(unit_phase(Rational(1, 2)), cplx(-1.0, 0.0));
    EXPECT_EQ(unit_phase(Rational(-1, 4)), cplx(0.0, -1.0));
    EXPECT_EQ(unit_phase(Rational(7, 2)), cplx(-1.0, 0.0));
}

TEST(UnitPhase, ConjugateSymmetricAndUnitModulus) {
    for (std::int64_t q : {3, 6, 7, 64, 720, 2880}) {
        for (std::int64_t p = 0; p < q; ++p) {
            const cplx z = unit_phase(Rational(p, q));
            EXPECT_EQ(unit_phase(Rational(-p, q)), std::conj(z));
            EXPECT_EQ(unit_phase(Rational(p + 5 * q, q)), z);
            EXPECT_EQ(norm2(z), 1.0) << p << "/" << q;
            const long double a = 2.0L * std::numbers::pi_v<long double> * static_cast<long double>(p) / static_cast<long double>(q);
            EXPECT_NEAR(z.real(), static_cast<double>(std::cos(a)), 1e-14);
            EXPECT_NEAR(z.imag(), static_cast<double>(std::sin(a)), 1e-14);
        }
    }
}

TEST(PhaseTable, MatchesUnitPhaseForAnyInteger) {
    const PhaseTable t(64);
    EXPECT_EQ(t.size(), 64);
    for (std::int64_t k = -200; k <= 200; ++k) EXPECT_EQ(t(k), unit_phase(Rational(k, 64)));
    EXPECT_THROW(PhaseTable(0), Error);
}
