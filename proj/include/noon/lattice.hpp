#pragma once

// Dy-164 four-well plaquette: trap frequencies, on-site and dipolar
// inter-site couplings, the integrability root U0 = U13 and the field
// strengths produced by displacing the plaquette beam.
//
// Inputs are SI. Every coupling leaves this header as X/hbar in rad/s; the
// conversion happens only in `to_rate`.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/roots.hpp>

#include "noon/errors.hpp"
#include "noon/model.hpp"

namespace noon::lattice {

// CODATA 2018
inline constexpr double kHbar = 1.054571817e-34;        // J s
inline constexpr double kMu0 = 1.25663706212e-6;        // N A^-2
inline constexpr double kBohrMagneton = 9.2740100783e-24;  // J/T
inline constexpr double kBohrRadius = 5.29177210903e-11;   // m
inline constexpr double kAtomicMass = 1.66053906660e-27;   // kg

inline constexpr double kDy164MassU = 163.929174751;
inline constexpr double kDyMagneticMoment = 9.93;  // Bohr magnetons

/// Anisotropy value that reproduces U0/hbar = 161.282 at omega_r = 2pi x 37.078 kHz, a = -21 a0.
inline constexpr double kCalibratedAnisotropy = -0.164830;

/// Reading of the on-site prefactor. `square_root` uses kappa (eta/pi)^{3/2},
/// the Gaussian overlap integral; `literal` uses kappa eta^3 / pi^3 as printed,
/// which is not an energy and is kept only for comparison.
enum class PrefactorReading { square_root, literal };

enum class Pair { nearest, diagonal };

struct TrapParameters {
    double wavelength = 532e-9;  // m
    double w0 = 50e-6;           // lattice beam waist, m
    double w1 = 1.0e-6;          // plaquette beam waist, m
    double w2 = 50e-6;           // crossing beam waist, m
    double w_b = 5.0e-6;         // displaced beam waist, m
    double alpha = std::numbers::pi / 3.0;  // crossing angle, rad
    double v1_over_v0 = 1.0;
    double v2_over_v0 = 9.0;
    double vb_over_v0 = 5e-3;
    double scattering_length = -21.0;  // units of a0
    double mass_u = kDy164MassU;
    double magnetic_moment = kDyMagneticMoment;  // units of muB
    double kappa2 = 1.464;                       // omega_z / omega_r
    std::optional<double> anisotropy_override;   // f(kappa) used by the on-site term
    PrefactorReading reading = PrefactorReading::square_root;

    static TrapParameters dy164(double a_over_a0 = -21.0) {
        TrapParameters t;
        t.scattering_length = a_over_a0;
        t.anisotropy_override = kCalibratedAnisotropy;
        return t;
    }

    void validate() const {
        if (!(wavelength > 0.0)) throw ValidationError("wavelength must be positive");
        if (!(kappa2 > 0.0)) throw ValidationError("kappa^2 must be positive");
        if (!(mass_u > 0.0)) throw ValidationError("mass must be positive");
        if (!(w1 > 0.0) || !(w_b > 0.0)) throw ValidationError("beam waists must be positive");
        if (!(w0 > 10.0 * wavelength)) throw ValidationError("lattice beam waist w0 must be much larger than the wavelength");
        if (!(alpha > 0.0 && alpha < std::numbers::pi)) throw ValidationError("crossing angle must lie in (0, pi)");
        if (magnetic_moment < 0.0) throw ValidationError("magnetic moment must be non-negative");
    }

    double mass() const { return mass_u * kAtomicMass; }
    double spacing() const { return wavelength / 2.0; }
    double wave_number() const { return 2.0 * std::numbers::pi / wavelength; }
    double kappa() const { return std::sqrt(kappa2); }
    /// Distance between horizontal layers, lambda / (2 sin(alpha/2)).
    double layer_spacing() const { return wavelength / (2.0 * std::sin(alpha / 2.0)); }
    double contact_g() const { return 4.0 * std::numbers::pi * kHbar * kHbar * scattering_length * kBohrRadius / mass(); }
    double c_dd() const {
        const double mu = magnetic_moment * kBohrMagneton;
        return kMu0 * mu * mu;
    }
    /// delta = 1 + 2 V1 / (V0 k^2 w1^2).
    double delta() const {
        const double k = wave_number();
        return 1.0 + 2.0 * v1_over_v0 / (k * k * w1 * w1);
    }
    double distance(Pair p) const {
        return p == Pair::nearest ? spacing() / delta() : spacing() * std::numbers::sqrt2 / delta();
    }
};

inline double to_rate(double energy_joule) { return energy_joule / kHbar; }

/// eta = m omega_r / (2 hbar), 1/m^2.
inline double eta(const TrapParameters& t, double omega_r) { return t.mass() * omega_r / (2.0 * kHbar); }

/// Lattice depth V0 (J) giving radial frequency omega_r.
inline double lattice_depth(const TrapParameters& t, double omega_r) {
    const double k = t.wave_number();
    return t.mass() * omega_r * omega_r / (2.0 * (k * k + 2.0 * t.v1_over_v0 / (t.w1 * t.w1)));
}

/// Transverse frequency from the crossing beams at the depth set by omega_r.
inline double omega_z(const TrapParameters& t, double omega_r) {
    const double v0 = lattice_depth(t, omega_r);
    const double d = t.layer_spacing();
    const double r1 = std::numbers::pi * t.w1 * t.w1 / t.wavelength;
    const double v1 = t.v1_over_v0 * v0;
    const double v2 = t.v2_over_v0 * v0;
    return std::sqrt(2.0 / t.mass() * (std::numbers::pi * std::numbers::pi * v2 / (d * d) + v1 / (r1 * r1)));
}

/// Recoil energy E_R / hbar = hbar k^2 / (2 m), rad/s.
inline double recoil_energy(const TrapParameters& t) {
    if (!(t.wavelength > 0.0) || !(t.mass_u > 0.0)) throw ValidationError("wavelength and mass must be positive");
    const double k = t.wave_number();
    return kHbar * k * k / (2.0 * t.mass());
}

/// Dipolar anisotropy function of a cylindrically symmetric Gaussian cloud:
/// f(1) = 0, f(0+) = 1, f(inf) = -2, monotone decreasing.
inline double anisotropy_f(double kappa) {
    if (!(kappa > 0.0)) throw ValidationError("kappa must be positive");
    const double k2 = kappa * kappa;
    const double y = 1.0 - k2;
    if (std::abs(y) < 0.05) {
        // 6 sum_n y^n / ((2n+1)(2n+3))
        double sum = 0.0, yn = 1.0;
        for (int n = 1; n < 40; ++n) {
            yn *= y;
            sum += yn / ((2.0 * n + 1.0) * (2.0 * n + 3.0));
        }
        return 6.0 * sum;
    }
    double a;
    if (k2 < 1.0) {
        const double x = std::sqrt(y);
        a = std::atanh(x) / x;
    } else {
        const double x = std::sqrt(-y);
        a = std::atan(x) / x;
    }
    return ((1.0 + 2.0 * k2) - 3.0 * k2 * a) / y;
}

/// Scaled complementary error function exp(x^2) erfc(x), x >= 0.
inline double erfcx(double x) {
    if (x < 25.0) return std::exp(x * x) * boost::math::erfc(x);
    // asymptotic series, relative error below 1e-12 here
    const double inv = 1.0 / (2.0 * x * x);
    return (1.0 - inv * (1.0 - 3.0 * inv * (1.0 - 5.0 * inv * (1.0 - 7.0 * inv)))) / (x * std::sqrt(std::numbers::pi));
}

struct OnsiteCoupling {
    double contact;   // rad/s
    double dipolar;   // rad/s
    double total;     // rad/s
    double anisotropy;
};

inline double onsite_prefactor(const TrapParameters& t, double omega_r) {
    const double e = eta(t, omega_r);
    if (t.reading == PrefactorReading::literal) return t.kappa() * e * e * e / std::pow(std::numbers::pi, 3);
    return t.kappa() * std::pow(e / std::numbers::pi, 1.5);
}

/// U0 = prefactor (g - C_dd f(kappa) / 3).
inline OnsiteCoupling onsite_coupling(const TrapParameters& t, double omega_r) {
    if (!(omega_r > 0.0)) throw ValidationError("omega_r must be positive");
    const double f = t.anisotropy_override ? *t.anisotropy_override : anisotropy_f(t.kappa());
    const double pref = onsite_prefactor(t, omega_r);
    const double contact = to_rate(pref * t.contact_g());
    const double dip = to_rate(-pref * t.c_dd() * f / 3.0);
    return {contact, dip, contact + dip, f};
}

/// Kernel Z(r) of the momentum-space dipolar integral; Z(0) = (4/3) sqrt(kappa^2 eta / pi).
inline double dipolar_kernel(double r, double kappa2_eta) {
    const double s = std::sqrt(kappa2_eta);
    return 4.0 / 3.0 * std::sqrt(kappa2_eta / std::numbers::pi) - r * erfcx(r / (2.0 * s));
}

struct OffsiteCoupling {
    double value;       // rad/s
    double error;       // quadrature error estimate, rad/s
    double tail_bound;  // bound on the truncated tail, rad/s
};

/// U_1j = C_dd/(4 pi) int_0^inf dr r exp(-r^2/(4 eta)) J0(r d) Z(r), r a radial momentum.
inline OffsiteCoupling offsite_coupling_at(const TrapParameters& t, double omega_r, double distance) {
    if (!(omega_r > 0.0)) throw ValidationError("omega_r must be positive");
    if (distance < 0.0) throw ValidationError("distance must be non-negative");
    const double e = eta(t, omega_r);
    const double k2e = t.kappa2 * e;
    // exp(-R^2 / (4 eta)) = 1e-16
    const double cut = std::sqrt(4.0 * e * std::log(1e16));
    auto integrand = [&](double r) {
        return r * std::exp(-r * r / (4.0 * e)) * std::cyl_bessel_j(0.0, r * distance) * dipolar_kernel(r, k2e);
    };
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, cut, 20, 1e-12, &err);
    const double scale = to_rate(t.c_dd() / (4.0 * std::numbers::pi));
    // |Z| <= 2 sqrt(kappa^2 eta / pi) and |J0| <= 1 beyond the cutoff.
    const double tail = 2.0 * e * std::exp(-cut * cut / (4.0 * e)) * 2.0 * std::sqrt(k2e / std::numbers::pi);
    const OffsiteCoupling out{scale * v, std::abs(scale) * err, std::abs(scale) * tail};
    if (!(out.error + out.tail_bound <= 1e-4 * std::abs(out.value)))
        throw NumericalError("dipolar quadrature did not converge: error estimate " + std::to_string(out.error) +
                             " rad/s for value " + std::to_string(out.value));
    return out;
}

inline OffsiteCoupling offsite_coupling(const TrapParameters& t, double omega_r, Pair pair) {
    return offsite_coupling_at(t, omega_r, t.distance(pair));
}

/// Dipolar on-site term from the standard anisotropy function; equals the
/// d -> 0 limit of the inter-site integral.
inline double onsite_dipolar_standard(const TrapParameters& t, double omega_r) {
    TrapParameters s = t;
    s.anisotropy_override.reset();
    s.reading = PrefactorReading::square_root;
    return onsite_coupling(s, omega_r).dipolar;
}

struct IntegrabilityRoot {
    double omega_r;   // rad/s
    double U0;        // rad/s
    double U13;       // rad/s
    double U12;       // rad/s
    double residual;  // U0 - U13 - target, rad/s
    double target;
    int iterations;

    double U() const { return (U12 - U0) / 4.0; }
};

/// Solves U0(omega_r) - U13(omega_r) = target on [lo, hi] (rad/s). target = 0
/// is the integrability condition; a nonzero target gives the detuned points.
inline IntegrabilityRoot solve_integrability(const TrapParameters& t, double lo, double hi, double target = 0.0) {
    t.validate();
    if (!(lo > 0.0 && hi > lo)) throw ValidationError("bracket must satisfy 0 < lo < hi");
    auto g = [&](double w) { return onsite_coupling(t, w).total - offsite_coupling(t, w, Pair::diagonal).value - target; };
    const double glo = g(lo), ghi = g(hi);
    if (glo == 0.0 || ghi == 0.0) {
        const double w = glo == 0.0 ? lo : hi;
        return {w, onsite_coupling(t, w).total, offsite_coupling(t, w, Pair::diagonal).value,
                offsite_coupling(t, w, Pair::nearest).value, 0.0, target, 0};
    }
    if ((glo > 0.0) == (ghi > 0.0))
        throw ValidationError("no integrable point in bracket [" + std::to_string(lo / (2 * std::numbers::pi)) +
                              ", " + std::to_string(hi / (2 * std::numbers::pi)) + "] Hz");
    std::uintmax_t iters = 100;
    // 1e-9 relative tolerance on omega_r
    const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi, boost::math::tools::eps_tolerance<double>(30), iters);
    if (iters >= 100) throw NumericalError("integrability root search did not converge");
    const double w = 0.5 * (a + b);
    const double u0 = onsite_coupling(t, w).total;
    const double u13 = offsite_coupling(t, w, Pair::diagonal).value;
    const double u12 = offsite_coupling(t, w, Pair::nearest).value;
    return {w, u0, u13, u12, u0 - u13 - target, target, static_cast<int>(iters)};
}

/// f(kappa) that makes U0(omega_r) equal `u0_target` (rad/s). U0 is linear in f.
inline double calibrate_anisotropy(const TrapParameters& t, double omega_r, double u0_target) {
    const double pref = onsite_prefactor(t, omega_r);
    if (!(pref > 0.0) || !(t.c_dd() > 0.0)) throw ValidationError("calibration needs a dipolar atom and omega_r > 0");
    return 3.0 * (t.contact_g() - u0_target * kHbar / pref) / t.c_dd();
}

struct FieldStrengths {
    double mu;  // rad/s
    double nu;  // rad/s
};

/// mu, nu = 2 V_b l (dx -+ dy) / (w_b^2 delta) from displacing the plaquette beam.
inline FieldStrengths field_strengths(const TrapParameters& t, double v0, double dx, double dy) {
    if (!(std::abs(dx) < t.w_b) || !(std::abs(dy) < t.w_b))
        throw ValidationError("beam displacement must be smaller than the waist w_b");
    const double vb = t.vb_over_v0 * v0;
    const double scale = 2.0 * vb * t.spacing() / (t.w_b * t.w_b * t.delta());
    return {to_rate(scale * (dx - dy)), to_rate(scale * (dx + dy))};
}

struct PhysicalReport {
    TrapParameters trap;
    IntegrabilityRoot root;
    double eta;
    double delta;
    double omega_z;
    double implied_kappa2;
    double lattice_depth_over_recoil;
    double recoil;  // rad/s
    OnsiteCoupling onsite;
    double U;
    FieldStrengths fields;
    double dipolar_limit;      // d -> 0 of the inter-site integral, rad/s
    double dipolar_standard;   // on-site dipolar term with the standard f, rad/s
    ModelParameters model;     // J supplied by the caller
};

/// Root, couplings and fields for one trap, with J supplied as an input.
inline PhysicalReport physical_report(const TrapParameters& t, double J, double dx, double dy,
                                      double lo = 2 * std::numbers::pi * 20e3,
                                      double hi = 2 * std::numbers::pi * 60e3) {
    const auto root = solve_integrability(t, lo, hi);
    const double w = root.omega_r;
    const double v0 = lattice_depth(t, w);
    PhysicalReport r{t, root, eta(t, w), t.delta(), omega_z(t, w), omega_z(t, w) / w,
                     v0 / (kHbar * recoil_energy(t)), recoil_energy(t), onsite_coupling(t, w), root.U(),
                     field_strengths(t, v0, dx, dy), offsite_coupling_at(t, w, 0.0).value,
                     onsite_dipolar_standard(t, w), {}};
    // U13 = U0 at the root to the solver tolerance; the block is set exactly integrable.
    r.model = ModelParameters::integrable(root.U0, root.U(), J);
    return r;
}

}  // namespace noon::lattice
