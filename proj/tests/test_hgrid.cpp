#include <gtest/gtest.h>

#include <sstream>

#include <zakbench/acceptance.hpp>
#include <zakbench/hgrid.hpp>

using namespace zakbench;
using acceptance::exponential_multiplier;

TEST(HGrid, PeriodicAccess) {
    const HGrid h = exponential_multiplier(3, 2, 1, 1, 8, 4);
    EXPECT_EQ(h.x_step(), Rational(1, 24));
    EXPECT_EQ(h.omega_step(), Rational(1, 8));
    EXPECT_EQ(h.at(-1, 0), h.stored(7, 0));
    EXPECT_EQ(h.at(9, -5), h.stored(1, 3));
    EXPECT_EQ(h.at(Rational(1, 3), Rational(1, 2)), h.stored(0, 0));
    EXPECT_THROW((void)h.at(Rational(1, 25), Rational(0)), Error);
}

TEST(HGrid, ShapeIsChecked) {
    EXPECT_THROW(HGrid(1, 1, 2, 2, std::vector<cplx>(3)), Error);
    EXPECT_THROW(HGrid(0, 1, 1, 1, std::vector<cplx>(1)), Error);
}

TEST(Coefficients, SingleExponentialHasOneCoefficient) {
    const HGrid h = exponential_multiplier(3, 1, 2, -1, 16, 16);
    const auto t = coefficients_from_h(h, IndexBox::centred(4, 4));
    for (std::int64_t k = -4; k <= 4; ++k)
        for (std::int64_t l = -4; l <= 4; ++l)
            EXPECT_NEAR(std::abs(t.at(k, l) - (k == -1 && l == 2 ? cplx{1.0, 0.0} : cplx{0.0, 0.0})), 0.0, 1e-14);
    EXPECT_NEAR(t.partial_l1.back(), 1.0, 1e-13);
    EXPECT_NEAR(t.partial_l1[1], 0.0, 1e-13);
    EXPECT_FALSE(t.aliasing_warning);
}

TEST(Coefficients, BoxLargerThanGridIsRejected) {
    const HGrid h = exponential_multiplier(1, 1, 1, 0, 8, 8);
    EXPECT_THROW((void)coefficients_from_h(h, IndexBox::centred(4, 4)), Error);
    EXPECT_THROW((void)coefficients_from_h(h, {2, 1, 0, 0}), Error);
}

TEST(Coefficients, BoundaryEnergyRaisesAliasingWarning) {
    const HGrid h = exponential_multiplier(1, 1, 3, 0, 8, 8);
    const auto t = coefficients_from_h(h, IndexBox::centred(3, 3));
    EXPECT_TRUE(t.aliasing_warning);
    EXPECT_NEAR(t.boundary_energy_fraction, 1.0, 1e-12);
}

TEST(Coefficients, ResynthesisFromFullBox) {
    const HGrid h = acceptance::exponential_multiplier(3, 1, 1, 0, 24, 16).map([](const cplx& z) {
        return z + 0.25 * z * z + cplx{0.5, -0.125};
    });
    const auto t = coefficients_from_h(h, IndexBox::full(h));
    const HGrid back = resynthesize(t, h.nx(), h.nl());
    double worst = 0.0;
    for (std::int64_t j = 0; j < h.nx(); ++j)
        for (std::int64_t m = 0; m < h.nl(); ++m) worst = std::max(worst, std::abs(back.stored(j, m) - h.stored(j, m)));
    EXPECT_LE(worst, 1e-10);
    EXPECT_EQ(back.p1(), 3);
}

TEST(HGridCsv, UsesMultiplierCoordinates) {
    const HGrid h = exponential_multiplier(3, 1, 0, 0, 2, 2);
    std::ostringstream os;
    write_csv(os, h);
    EXPECT_EQ(os.str(), "x,omega,re,im\n0/1,0/1,1,0\n0/1,1/2,1,0\n1/6,0/1,1,0\n1/6,1/2,1,0\n");
}
