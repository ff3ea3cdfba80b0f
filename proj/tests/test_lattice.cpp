#include <numbers>

#include <gtest/gtest.h>

#include "noon/lattice.hpp"

using namespace noon;
using namespace noon::lattice;

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
const double kSet1Omega = two_pi * 37.078e3;
}  // namespace

TEST(Anisotropy, LimitsAndMonotonicity) {
    EXPECT_NEAR(anisotropy_f(1.0), 0.0, 1e-15);
    EXPECT_NEAR(anisotropy_f(1e-4), 1.0, 1e-3);
    EXPECT_NEAR(anisotropy_f(1e4), -2.0, 1e-3);
    double prev = 2.0;
    for (double k = 0.05; k < 20.0; k *= 1.07) {
        const double f = anisotropy_f(k);
        EXPECT_LT(f, prev) << "kappa=" << k;
        prev = f;
    }
    EXPECT_THROW(anisotropy_f(0.0), ValidationError);
}

TEST(Anisotropy, ContinuousAcrossSeriesSwitch) {
    // the series is used for |1 - kappa^2| < 0.05
    for (double k2 : {0.95, 1.05}) {
        const double lo = anisotropy_f(std::sqrt(k2 - 1e-9));
        const double hi = anisotropy_f(std::sqrt(k2 + 1e-9));
        EXPECT_NEAR(lo, hi, 1e-9);
    }
    EXPECT_NEAR(anisotropy_f(std::sqrt(1.464)), -0.156072, 1e-6);
}

TEST(Erfcx, MatchesDefinition) {
    for (double x : {0.0, 0.5, 2.0, 10.0, 24.9}) EXPECT_NEAR(erfcx(x), std::exp(x * x) * std::erfc(x), 1e-12 * erfcx(x));
    EXPECT_NEAR(erfcx(30.0), 0.018795888861416751, 1e-13);
    EXPECT_NEAR(erfcx(25.0 - 1e-12), erfcx(25.0), 1e-12);
}

TEST(Kernel, OriginValue) {
    const double k2e = 1.464 * 3e14;
    EXPECT_NEAR(dipolar_kernel(0.0, k2e), 4.0 / 3.0 * std::sqrt(k2e / std::numbers::pi), 1e-6);
    EXPECT_NEAR(dipolar_kernel(1e-3, k2e), dipolar_kernel(0.0, k2e), 1e-2);
}

TEST(Trap, GeometryInvariants) {
    auto t = TrapParameters::dy164();
    EXPECT_NEAR(t.spacing(), 266e-9, 1e-15);
    EXPECT_GT(t.delta(), 1.0);
    EXPECT_NEAR(t.delta(), 1.014338, 1e-6);
    EXPECT_NEAR(t.layer_spacing(), t.wavelength, 1e-15);
    EXPECT_GT(eta(t, kSet1Omega), 0.0);
    auto bad = t;
    bad.w0 = 1e-6;
    EXPECT_THROW(bad.validate(), ValidationError);
    bad = t;
    bad.kappa2 = -1.0;
    EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(Onsite, NoInteractionsNoCoupling) {
    auto t = TrapParameters::dy164(0.0);
    t.magnetic_moment = 0.0;
    EXPECT_EQ(onsite_coupling(t, kSet1Omega).total, 0.0);
}

TEST(Onsite, CalibratedValueAtPublishedRoot) {
    const auto u = onsite_coupling(TrapParameters::dy164(), kSet1Omega);
    EXPECT_NEAR(u.total, 161.282, 161.282 * 0.02);
    EXPECT_NEAR(calibrate_anisotropy(TrapParameters::dy164(), kSet1Omega, 161.282), kCalibratedAnisotropy, 1e-5);
}

TEST(Onsite, PrefactorScaling) {
    auto t = TrapParameters::dy164();
    const double w = kSet1Omega;
    const double sq = onsite_coupling(t, 2 * w).total / onsite_coupling(t, w).total;
    EXPECT_NEAR(sq, std::pow(2.0, 1.5), 1e-12);
    t.reading = PrefactorReading::literal;
    EXPECT_NEAR(onsite_coupling(t, 2 * w).total / onsite_coupling(t, w).total, 8.0, 1e-12);
}

TEST(Offsite, SquareSymmetryAndFalloff) {
    auto t = TrapParameters::dy164();
    const auto nn = offsite_coupling(t, kSet1Omega, Pair::nearest);
    const auto again = offsite_coupling_at(t, kSet1Omega, t.spacing() / t.delta());
    EXPECT_NEAR(nn.value, again.value, 1e-12 * std::abs(nn.value));
    const auto diag = offsite_coupling(t, kSet1Omega, Pair::diagonal);
    EXPECT_LT(std::abs(diag.value), std::abs(nn.value));
    EXPECT_LT(nn.tail_bound, 1e-6 * std::abs(nn.value));
}

TEST(Offsite, ZeroDistanceRecoversOnsiteDipolarTerm) {
    auto t = TrapParameters::dy164();
    const double limit = offsite_coupling_at(t, kSet1Omega, 0.0).value;
    const double onsite = onsite_dipolar_standard(t, kSet1Omega);
    EXPECT_NEAR(limit, onsite, 0.005 * std::abs(onsite));
}

TEST(Root, Set1) {
    const auto r = solve_integrability(TrapParameters::dy164(-21.0), two_pi * 20e3, two_pi * 60e3);
    EXPECT_NEAR(r.omega_r, kSet1Omega, 0.01 * kSet1Omega);
    EXPECT_NEAR(r.U0, 161.282, 161.282 * 0.02);
    EXPECT_LT(std::abs(r.U0 - r.U13) / r.U0, 1e-6);
    EXPECT_NEAR(r.U(), 75.876, 75.876 * 0.02);
}

TEST(Root, Set2) {
    const auto r = solve_integrability(TrapParameters::dy164(-20.85), two_pi * 20e3, two_pi * 60e3);
    EXPECT_NEAR(r.omega_r, two_pi * 31.610e3, two_pi * 31.610e3 * 0.01);
}

TEST(Root, NoCrossing) {
    EXPECT_THROW(solve_integrability(TrapParameters::dy164(100.0), two_pi * 30e3, two_pi * 31e3), ValidationError);
    EXPECT_THROW(solve_integrability(TrapParameters::dy164(), two_pi * 31e3, two_pi * 30e3), ValidationError);
}

TEST(Root, StandardAnisotropyHasNoRoot) {
    auto t = TrapParameters::dy164();
    t.anisotropy_override.reset();
    EXPECT_LT(onsite_coupling(t, kSet1Omega).total, 0.0);
    EXPECT_THROW(solve_integrability(t, two_pi * 20e3, two_pi * 60e3), ValidationError);
}

TEST(Recoil, Dy164) {
    auto t = TrapParameters::dy164();
    EXPECT_NEAR(recoil_energy(t), 26.894e3, 26.894e3 * 0.005);
    auto heavy = t;
    heavy.mass_u *= 2.0;
    EXPECT_NEAR(recoil_energy(heavy), recoil_energy(t) / 2.0, 1e-9);
}

TEST(Fields, DisplacementSigns) {
    auto t = TrapParameters::dy164();
    const double v0 = lattice_depth(t, kSet1Omega);
    const auto f = field_strengths(t, v0, 0.2e-6, -0.2e-6);
    EXPECT_NEAR(f.mu, 20.870, 20.870 * 0.05);
    EXPECT_EQ(f.nu, 0.0);
    const auto g = field_strengths(t, v0, 0.2e-6, 0.2e-6);
    EXPECT_EQ(g.mu, 0.0);
    EXPECT_GT(g.nu, 0.0);
    const auto z = field_strengths(t, v0, 0.0, 0.0);
    EXPECT_EQ(z.mu, 0.0);
    EXPECT_EQ(z.nu, 0.0);
    EXPECT_THROW(field_strengths(t, v0, 6e-6, 0.0), ValidationError);
}

TEST(Report, ChainFeedsModel) {
    const auto r = physical_report(TrapParameters::dy164(), 24.886, 0.2e-6, -0.2e-6);
    EXPECT_TRUE(r.model.integrable());
    EXPECT_NEAR(r.model.band_coupling(), 75.876, 75.876 * 0.02);
    EXPECT_NEAR(std::abs(r.fields.mu), 20.870, 20.870 * 0.05);
    EXPECT_GT(r.lattice_depth_over_recoil, 17.0);
    EXPECT_LT(r.lattice_depth_over_recoil, 20.0);
}
