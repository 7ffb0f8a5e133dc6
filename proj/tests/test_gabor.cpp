#include <gtest/gtest.h>

#include <zakbench/constructions.hpp>
#include <zakbench/gabor.hpp>

using namespace zakbench;

namespace {
constexpr std::int64_t kN = 720;
constexpr std::int64_t kL = 64;
}  // namespace

TEST(RationalLattice, RequiresCoprimeParameters) {
    EXPECT_THROW(RationalLattice(2, 4), Error);
    EXPECT_THROW(RationalLattice(0, 1), Error);
    const RationalLattice l(2, 3);
    EXPECT_EQ(l.density(), Rational(2, 3));
    EXPECT_TRUE(l.contains(Rational(1, 2), Rational(3)));
    EXPECT_FALSE(l.contains(Rational(1, 3), Rational(0)));
    EXPECT_FALSE(l.contains(Rational(0), Rational(1)));
}

TEST(ZZField, EntriesAreShiftedZakValues) {
    const ZakGrid g = zak(example1_window(kN), kL);
    const ZZField f = zz_field(g, RationalLattice(2, 3));
    EXPECT_EQ(f.nx(), kN / 3);
    for (std::int64_t j = 0; j < f.nx(); j += 17)
        for (std::int64_t m = 0; m < kL; m += 9) {
            const auto mat = f.matrix(j, m);
            for (std::int64_t q = 0; q < 2; ++q)
                for (std::int64_t p = 0; p < 3; ++p)
                    EXPECT_EQ(mat(q, p), g.at(j - q * kN / 2 - p * kN / 3, m));
        }
}

TEST(ZZField, ResolutionMustBeDivisibleByLcm) {
    const ZakGrid g = zak(indicator_window(Rational(0), Rational(1), 10), 4);
    try {
        (void)zz_field(g, RationalLattice(1, 3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(std::string(e.what()), "Nx = 10 must be divisible by lcm(P, Q) = 3");
    }
}

TEST(RieszBounds, IndicatorIsOrthonormal) {
    const auto b = riesz_bounds(zz_field(zak(indicator_window(Rational(0), Rational(1), 60), 8), RationalLattice(1, 1)));
    EXPECT_DOUBLE_EQ(b.lower, 1.0);
    EXPECT_DOUBLE_EQ(b.upper, 1.0);
}

TEST(RieszBounds, Example1OnThirdLattice) {
    const auto b = riesz_bounds(zz_field(zak(example1_window(kN), kL), RationalLattice(1, 3)));
    EXPECT_NEAR(b.lower, 2.25, 1e-9);
    EXPECT_NEAR(b.upper, 9.0, 1e-9);
    EXPECT_NEAR(b.rank_margin, 1.5, 1e-9);
}

TEST(RieszBounds, OvercompleteLatticeHasZeroLowerBound) {
    const auto b = riesz_bounds(zz_field(zak(indicator_window(Rational(0), Rational(1), 60), 8), RationalLattice(2, 1)));
    EXPECT_EQ(b.lower, 0.0);
}

TEST(DualField, ReproducesIdentity) {
    const ZZField f = zz_field(zak(gaussian_window(1.0, 360), 32), RationalLattice(2, 3));
    const ZZField d = dual_field(f);
    EXPECT_LE(reproducing_defect(f, d), 1e-10);
}

TEST(DualField, RankDeficiencyIsNumericalError) {
    const ZZField f = zz_field(zak(indicator_window(Rational(0), Rational(1), 60), 8), RationalLattice(2, 1));
    try {
        (void)dual_field(f);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::numerical);
        EXPECT_NE(std::string(e.what()).find("rank deficiency"), std::string::npos);
    }
}
