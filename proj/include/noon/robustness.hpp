#pragma once

// Protocol fidelity when the integrability condition is missed by
// xi = U0 - U13, with and without alternating +xi / -xi pulses.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noon/dynamics.hpp"
#include "noon/errors.hpp"
#include "noon/lattice.hpp"
#include "noon/model.hpp"
#include "noon/protocols.hpp"

namespace noon {

/// exp(-i H_+ dt) and exp(-i H_- dt) alternated over `cycles` full cycles,
/// i.e. 2 * cycles slices of total / (2 cycles). start_sign picks the first slice.
inline QuantumState pulsed_evolve(const QuantumState& state, const HermitianOperator& h_plus,
                                  const HermitianOperator& h_minus, double total, int cycles, int start_sign = +1) {
    if (cycles < 1) throw ValidationError("pulse count must be at least 1");
    if (start_sign != 1 && start_sign != -1) throw ValidationError("start sign must be +1 or -1");
    const double dt = total / (2.0 * cycles);
    const auto& first = start_sign > 0 ? h_plus : h_minus;
    const auto& second = start_sign > 0 ? h_minus : h_plus;
    QuantumState s = state;
    for (int k = 0; k < cycles; ++k) {
        s = evolve(s, first, dt);
        s = evolve(s, second, dt);
    }
    return s;
}

enum class PulseMode { static_error, pulsed };
enum class ErrorSource { direct, physical };

struct RobustnessConfig {
    ProtocolConfig base;  // P theta is taken from here
    ProtocolKind protocol = ProtocolKind::I;
    std::vector<double> xi_over_j;
    int cycles = 100;
    PulseMode mode = PulseMode::pulsed;
    ErrorSource source = ErrorSource::direct;
    int start_sign = +1;
    // physical source only
    lattice::TrapParameters trap = lattice::TrapParameters::dy164();
    double displacement = 0.2e-6;  // |dx| = |dy|, m
    double omega_lo = 2 * std::numbers::pi * 20e3;
    double omega_hi = 2 * std::numbers::pi * 60e3;

    void validate() const {
        base.validate();
        if (cycles < 1) throw ValidationError("pulse count must be at least 1");
        if (start_sign != 1 && start_sign != -1) throw ValidationError("start sign must be +1 or -1");
        for (double x : xi_over_j)
            if (!std::isfinite(x) || x < 0.0) throw ValidationError("xi/J values must be finite and non-negative");
    }
};

struct RobustnessRow {
    double xi_over_j;
    double fidelity;                  // r = 0 branch (Protocol I) or the Protocol II output
    std::optional<double> fidelity_M;  // r = M branch, Protocol I only
    double t_m;
    double t_mu;
};

/// The two detuned parameterizations and the timing derived from their means.
struct DetunedPair {
    ModelParameters plus;
    ModelParameters minus;
    double mu_plus;
    double mu_minus;
    double t_m;
    double t_mu;
    double t_nu;
};

inline DetunedPair detuned_pair(const RobustnessConfig& cfg, double xi) {
    const auto& b = cfg.base;
    if (cfg.source == ErrorSource::direct) {
        auto plus = b.params;
        auto minus = b.params;
        plus.U13 += xi;
        plus.U24 += xi;
        minus.U13 -= xi;
        minus.U24 -= xi;
        return {plus, minus, b.mu, b.mu, b.t_m(), b.t_mu(), b.t_nu()};
    }
    // Re-solve the lattice for U0 - U13 = -xi (H+) and +xi (H-); J is held fixed.
    auto solve = [&](double target) {
        const auto root = lattice::solve_integrability(cfg.trap, cfg.omega_lo, cfg.omega_hi, target);
        const double v0 = lattice::lattice_depth(cfg.trap, root.omega_r);
        const auto f = lattice::field_strengths(cfg.trap, v0, cfg.displacement, -cfg.displacement);
        ModelParameters p = ModelParameters::integrable(root.U0, root.U(), b.params.J);
        p.U13 = p.U24 = root.U13;
        return std::pair{p, std::abs(f.mu)};
    };
    auto [plus, mu_plus] = solve(-xi);
    auto [minus, mu_minus] = solve(+xi);
    const double u_mean = 0.5 * (plus.band_coupling() + minus.band_coupling());
    const double mu_mean = 0.5 * (mu_plus + mu_minus);
    const int d = b.M - b.P;
    const double omega = b.params.J * b.params.J / (4.0 * u_mean * (d * d - 1));
    const double t_m = std::numbers::pi / (2.0 * omega);
    return {plus, minus, mu_plus, mu_minus, t_m, b.theta() / (2.0 * mu_mean), std::numbers::pi / (4.0 * b.M * mu_mean)};
}

/// Fidelity at one xi (rad/s). Pulses act only during the integrable
/// stretches; the field steps use the start-sign Hamiltonian.
inline RobustnessRow run_robustness_point(const RobustnessConfig& cfg, const BasisPtr& basis, double xi) {
    const auto& b = cfg.base;
    const auto pair = detuned_pair(cfg, xi);
    const auto h_plus = build_full_hamiltonian(pair.plus, basis);
    const bool is_static = cfg.mode == PulseMode::static_error;
    const auto h_minus = is_static ? h_plus : build_full_hamiltonian(pair.minus, basis);
    const bool plus_first = is_static || cfg.start_sign > 0;
    const auto& field_base = plus_first ? h_plus : h_minus;
    const double field_mu = plus_first ? pair.mu_plus : pair.mu_minus;

    auto integrable = [&](const QuantumState& s, double t) {
        if (is_static) return evolve(s, h_plus, t);
        return pulsed_evolve(s, h_plus, h_minus, t, cfg.cycles, cfg.start_sign);
    };
    const auto h_mu = field_base + build_field_term(basis, field_mu, 0.0);

    auto s = QuantumState::fock(basis, FockState{{b.M, b.P, 0, 0}});
    RobustnessRow row{xi / b.params.J, 0.0, std::nullopt, pair.t_m, pair.t_mu};
    if (cfg.protocol == ProtocolKind::I) {
        s = integrable(s, pair.t_m - pair.t_mu);
        s = evolve(s, h_mu, pair.t_mu);
        row.fidelity = fidelity(ideal_protocol1_output(b, basis, 0), project(s, Site(3), 0).post_state);
        row.fidelity_M = fidelity(ideal_protocol1_output(b, basis, b.M), project(s, Site(3), b.M).post_state);
    } else {
        const double nu = b.nu_sign * (plus_first ? pair.mu_plus : pair.mu_minus);
        const auto h_nu = field_base + build_field_term(basis, 0.0, nu);
        s = integrable(s, pair.t_m - pair.t_nu);
        s = evolve(s, h_nu, pair.t_nu);
        s = integrable(s, pair.t_m - pair.t_mu);
        s = evolve(s, h_mu, pair.t_mu);
        row.fidelity = fidelity(ideal_protocol2_output(b, basis), s);
    }
    return row;
}

inline std::vector<RobustnessRow> run_robustness(const RobustnessConfig& cfg) {
    cfg.validate();
    const auto basis = enumerate_basis(cfg.base.n_total());
    std::vector<RobustnessRow> rows;
    for (double x : cfg.xi_over_j) rows.push_back(run_robustness_point(cfg, basis, x * cfg.base.params.J));
    return rows;
}

}  // namespace noon
