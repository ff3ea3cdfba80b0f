#pragma once

// NOON-state generation on subsystem B (sites 2, 4) from |M, P, 0, 0>.
//
// Protocol I:  U(t_m - t_mu, 0, 0), U(t_mu, mu, 0), measure N3, post-select r in {0, M}.
// Protocol II: U(t_m - t_nu, 0, 0), U(t_nu, 0, nu), U(t_m - t_mu, 0, 0), U(t_mu, mu, 0).
//
// Both run either on the full Hamiltonian or in the idealized limit, where the
// integrable stretches use H_eff and the field steps become instantaneous
// phase gates.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "noon/dynamics.hpp"
#include "noon/errors.hpp"
#include "noon/fock.hpp"
#include "noon/model.hpp"
#include "noon/operator.hpp"

namespace noon {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Parameter presets

struct ParameterSet {
    std::string_view id;
    double U;   // (U12 - U0)/4, rad/s
    double J;   // rad/s
    double mu;  // rad/s; Protocol II uses nu = mu
    double U0;  // on-site coupling at the lattice integrability root, rad/s
    std::string_view note;

    ModelParameters model() const { return ModelParameters::integrable(U0, U, J); }
};

inline constexpr std::array<ParameterSet, 2> kPresets{{
    {"set1", 75.876, 24.886, 20.870, 161.282,
     "U/J ~ 3; lattice root a = -21 a0, omega_r = 2pi x 37.078 kHz"},
    {"set2", 76.519, 73.219, 15.168, 161.797,
     "U/J ~ 1; lattice root a = -20.85 a0, omega_r = 2pi x 31.610 kHz"},
}};

inline const ParameterSet& preset(std::string_view id) {
    for (const auto& p : kPresets)
        if (p.id == id) return p;
    throw ValidationError("unknown preset '" + std::string(id) + "' (expected set1 or set2)");
}

// ---------------------------------------------------------------------------
// Configuration

struct ProtocolConfig {
    int M = 4;
    int P = 11;
    ModelParameters params;  // integrable couplings, fields zero
    double mu = 0.0;
    double nu = 0.0;
    double p_theta = 0.0;  // encoded relative phase P*theta, radians
    // Orientation of the sites 1-3 pulse in Protocol II: the applied field is
    // nu_sign * nu (N1 - N3). The output phase is beta e^{i(P theta - nu_sign pi/2)}.
    int nu_sign = -1;
    std::optional<double> t_m_override;
    DerivedScales derived;

    int n_total() const { return M + P; }
    double theta() const { return p_theta / P; }
    double t_m() const { return t_m_override ? *t_m_override : derived.t_m; }
    double t_mu() const { return theta() / (2.0 * mu); }
    double t_nu() const { return std::numbers::pi / (4.0 * M * nu); }
    int beta() const { return derived.beta.value(); }

    ProtocolConfig with_p_theta(double value) const {
        ProtocolConfig c = *this;
        c.p_theta = value;
        c.validate();
        return c;
    }

    void validate() const {
        if (M < 0 || P < 0) throw ValidationError("M and P must be non-negative");
        if ((M + P) % 2 == 0) throw ValidationError("N = M + P must be odd");
        if (std::abs(M - P) < 2) throw ValidationError("|M - P| >= 2 is required (M != P)");
        if (!params.integrable()) throw ValidationError("protocol couplings must satisfy U13 = U24 = U0, U12 = U23 = U34 = U14");
        if (params.mu != 0.0 || params.nu != 0.0) throw ValidationError("base couplings must not carry fields");
        if (!(mu > 0.0)) throw ValidationError("mu must be positive");
        if (!(nu > 0.0)) throw ValidationError("nu must be positive");
        if (nu_sign != 1 && nu_sign != -1) throw ValidationError("nu_sign must be +1 or -1");
        if (!(p_theta >= 0.0)) throw ValidationError("P*theta must be non-negative");
        if (!(derived.t_m > 0.0)) throw ValidationError("t_m must be positive (requires U > 0)");
        if (t_m_override && !(*t_m_override > 0.0)) throw ValidationError("t_m override must be positive");
        if (!(t_mu() < t_m())) throw ValidationError("t_mu must be shorter than t_m");
        if (!(t_nu() < t_m())) throw ValidationError("t_nu must be shorter than t_m");
    }

    static ProtocolConfig make(int M, int P, const ModelParameters& params, double mu, double nu, double p_theta) {
        ProtocolConfig c;
        c.M = M;
        c.P = P;
        c.params = params;
        c.mu = mu;
        c.nu = nu;
        c.p_theta = p_theta;
        if ((M + P) % 2 == 0) throw ValidationError("N = M + P must be odd");
        c.derived = derive_scales(params, M, P);
        c.validate();
        return c;
    }

    static ProtocolConfig from_preset(std::string_view id, double p_theta = 0.0, int M = 4, int P = 11) {
        const auto& s = preset(id);
        return make(M, P, s.model(), s.mu, s.mu, p_theta);
    }
};

/// Grid of n points spanning [0, pi] inclusive.
inline std::vector<double> p_theta_grid(int n) {
    if (n < 1) throw ValidationError("grid needs at least one point");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) g[static_cast<std::size_t>(k)] = n == 1 ? 0.0 : std::numbers::pi * k / (n - 1);
    return g;
}

// ---------------------------------------------------------------------------
// Fidelity

/// |<a|b>|
inline double fidelity(const QuantumState& a, const QuantumState& b) { return std::abs(inner_product(a, b)); }

enum class NoonParity { symmetric, antisymmetric };

/// Target for a Protocol I outcome r: symmetric for r <= M/2, antisymmetric otherwise.
inline NoonParity target_parity(int r, int M) { return 2 * r <= M ? NoonParity::symmetric : NoonParity::antisymmetric; }

/// Fidelity of the reduced state of sites (2, 4) with the NOON state
/// c_P0 |P,0> + c_0P |0,P>, sqrt(<NOON|rho_B|NOON>).
inline double subsystem_b_fidelity(const QuantumState& state, int P, cplx c_p0, cplx c_0p) {
    const double nrm = std::sqrt(std::norm(c_p0) + std::norm(c_0p));
    c_p0 /= nrm;
    c_0p /= nrm;
    const auto& basis = state.basis();
    const int n = basis.particle_number();
    double acc = 0.0;
    for (int n1 = 0; n1 <= n - P; ++n1) {
        const int n3 = n - P - n1;
        const cplx left = state.amplitude(FockState{{n1, P, n3, 0}});
        const cplx right = state.amplitude(FockState{{n1, 0, n3, P}});
        acc += std::norm(std::conj(c_p0) * left + std::conj(c_0p) * right);
    }
    return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// Analytic states of the idealized limit

namespace detail {
inline QuantumState make_state(const BasisPtr& basis, std::initializer_list<std::pair<cplx, FockState>> terms) {
    std::vector<std::pair<cplx, FockState>> v(terms);
    return QuantumState::superposition(basis, v);
}
}  // namespace detail

enum class UberStage { pre_field, post_field };

/// Four-term uber-NOON state after step (i) (pre_field) or step (ii) (post_field).
inline QuantumState ideal_uber_noon(const ProtocolConfig& cfg, const BasisPtr& basis, UberStage stage) {
    const int M = cfg.M, P = cfg.P;
    const double b = cfg.beta();
    const cplx ph = stage == UberStage::pre_field ? cplx(1.0) : std::polar(1.0, cfg.p_theta);
    return detail::make_state(basis, {{b, FockState{{M, P, 0, 0}}},
                                      {ph, FockState{{M, 0, 0, P}}},
                                      {1.0, FockState{{0, P, M, 0}}},
                                      {-b * ph, FockState{{0, 0, M, P}}}});
}

/// Post-measurement NOON state of Protocol I for r = 0 or r = M.
inline QuantumState ideal_protocol1_output(const ProtocolConfig& cfg, const BasisPtr& basis, int r) {
    const int M = cfg.M, P = cfg.P;
    const double b = cfg.beta();
    const cplx ph = std::polar(1.0, cfg.p_theta);
    if (r == 0) return detail::make_state(basis, {{b, FockState{{M, P, 0, 0}}}, {ph, FockState{{M, 0, 0, P}}}});
    if (r == M) return detail::make_state(basis, {{1.0, FockState{{0, P, M, 0}}}, {-b * ph, FockState{{0, 0, M, P}}}});
    throw ValidationError("ideal Protocol I output is defined for r = 0 or r = M only");
}

inline QuantumState ideal_protocol1_target(const ProtocolConfig& cfg, const BasisPtr& basis, int r) {
    return ideal_protocol1_output(cfg, basis, target_parity(r, cfg.M) == NoonParity::symmetric ? 0 : cfg.M);
}

/// Upsilon = beta exp(i (P theta - nu_sign pi/2)).
inline cplx protocol2_phase(const ProtocolConfig& cfg) {
    return static_cast<double>(cfg.beta()) * std::polar(1.0, cfg.p_theta - cfg.nu_sign * std::numbers::pi / 2.0);
}

inline QuantumState ideal_protocol2_output(const ProtocolConfig& cfg, const BasisPtr& basis) {
    const int M = cfg.M, P = cfg.P;
    return detail::make_state(basis, {{1.0, FockState{{M, P, 0, 0}}}, {protocol2_phase(cfg), FockState{{M, 0, 0, P}}}});
}

/// The four idealized Protocol II intermediate states |Psi_1> .. |Psi_4>.
inline std::array<QuantumState, 4> ideal_protocol2_chain(const ProtocolConfig& cfg, const BasisPtr& basis) {
    const int M = cfg.M, P = cfg.P;
    const double b = cfg.beta();
    const cplx i_s = cfg.nu_sign > 0 ? cplx(0, 1) : cplx(0, -1);
    const cplx kick = b * std::polar(1.0, -cfg.nu_sign * std::numbers::pi / 2.0);
    return {ideal_uber_noon(cfg, basis, UberStage::pre_field),
            detail::make_state(basis, {{b, FockState{{M, P, 0, 0}}},
                                       {1.0, FockState{{M, 0, 0, P}}},
                                       {i_s, FockState{{0, P, M, 0}}},
                                       {-i_s * b, FockState{{0, 0, M, P}}}}),
            detail::make_state(basis, {{1.0, FockState{{M, P, 0, 0}}}, {kick, FockState{{M, 0, 0, P}}}}),
            ideal_protocol2_output(cfg, basis)};
}

// ---------------------------------------------------------------------------
// Propagation

enum class Execution { full, idealized };

/// Hamiltonians shared by every point of a P*theta sweep. Building this once
/// means each eigendecomposition is computed once per sweep.
struct ProtocolHamiltonians {
    Execution mode;
    BasisPtr basis;
    HermitianOperator integrable;  // H (full) or H_eff (idealized)
    std::optional<HermitianOperator> with_mu;
    std::optional<HermitianOperator> with_nu;

    static ProtocolHamiltonians build(const ProtocolConfig& cfg, Execution mode = Execution::full) {
        auto basis = enumerate_basis(cfg.n_total());
        if (mode == Execution::idealized) {
            return {mode, basis, build_effective_hamiltonian_charges(basis, cfg.n_total(), cfg.derived),
                    std::nullopt, std::nullopt};
        }
        auto h0 = build_full_hamiltonian(cfg.params, basis);
        auto hmu = h0 + build_field_term(basis, cfg.mu, 0.0);
        auto hnu = h0 + build_field_term(basis, 0.0, cfg.nu_sign * cfg.nu);
        return {mode, basis, std::move(h0), std::move(hmu), std::move(hnu)};
    }

    QuantumState initial_state(const ProtocolConfig& cfg) const {
        return QuantumState::fock(basis, FockState{{cfg.M, cfg.P, 0, 0}});
    }

    /// U(t, 0, 0); in the idealized limit the field intervals shrink to zero,
    /// so `full_interval` is used in place of t.
    QuantumState integrable_step(const QuantumState& s, double t, double full_interval) const {
        return evolve(s, integrable, mode == Execution::idealized ? full_interval : t);
    }

    QuantumState mu_step(const QuantumState& s, const ProtocolConfig& cfg) const {
        if (mode == Execution::idealized) {
            const double half = cfg.theta() / 2.0;
            return apply_diagonal_phase(s, [half](const FockState& f) { return half * (f.n[1] - f.n[3]); });
        }
        return evolve(s, *with_mu, cfg.t_mu());
    }

    QuantumState nu_step(const QuantumState& s, const ProtocolConfig& cfg) const {
        if (mode == Execution::idealized) {
            const double angle = cfg.nu_sign * std::numbers::pi / (4.0 * cfg.M);
            return apply_diagonal_phase(s, [angle](const FockState& f) { return angle * (f.n[0] - f.n[2]); });
        }
        return evolve(s, *with_nu, cfg.t_nu());
    }
};

struct ProtocolReport {
    QuantumState final_state;
    QuantumState ideal_state;
    double fidelity;
    std::optional<MeasurementRecord> measurement;  // Protocol I only
    double elapsed_model_time;
    bool postselected = true;
    double subsystem_fidelity = 0.0;
};

/// State just before the site-3 measurement of Protocol I.
inline QuantumState protocol1_pre_measurement(const ProtocolConfig& cfg, const ProtocolHamiltonians& h) {
    auto s = h.integrable_step(h.initial_state(cfg), cfg.t_m() - cfg.t_mu(), cfg.t_m());
    return h.mu_step(s, cfg);
}

namespace detail {
inline double protocol1_subsystem_fidelity(const ProtocolConfig& cfg, const QuantumState& post, int r) {
    const double b = cfg.beta();
    const cplx ph = std::polar(1.0, cfg.p_theta);
    if (target_parity(r, cfg.M) == NoonParity::symmetric) return subsystem_b_fidelity(post, cfg.P, b, ph);
    return subsystem_b_fidelity(post, cfg.P, 1.0, -b * ph);
}

inline ProtocolReport protocol1_branch(const ProtocolConfig& cfg, const ProtocolHamiltonians& h,
                                       const QuantumState& pre, int r) {
    auto rec = project(pre, Site(3), r);
    auto ideal = ideal_protocol1_target(cfg, h.basis, r);
    const double f = fidelity(ideal, rec.post_state);
    const double fb = protocol1_subsystem_fidelity(cfg, rec.post_state, r);
    QuantumState final_state = rec.post_state;
    return {std::move(final_state), std::move(ideal), f, std::move(rec), cfg.t_m(), r == 0 || r == cfg.M, fb};
}
}  // namespace detail

/// Protocol I, reporting the branch with site-3 outcome r. Outcomes other
/// than 0 and M are flagged as post-selection failures.
inline ProtocolReport run_protocol1(const ProtocolConfig& cfg, const ProtocolHamiltonians& h, int r) {
    return detail::protocol1_branch(cfg, h, protocol1_pre_measurement(cfg, h), r);
}

struct Protocol1Outcome {
    int r;
    double probability;
    double fidelity;             // |<ideal|Phi>|, zero off the post-selected outcomes
    double subsystem_fidelity;   // fidelity of the sites-(2,4) state with the NOON target
    NoonParity target;
    bool postselected;
};

/// Every site-3 outcome r = 0..M+P with nonzero probability.
inline std::vector<Protocol1Outcome> protocol1_outcomes(const ProtocolConfig& cfg, const ProtocolHamiltonians& h) {
    const auto pre = protocol1_pre_measurement(cfg, h);
    std::vector<Protocol1Outcome> out;
    for (const auto& [r, p] : measure_distribution(pre, Site(3))) {
        auto rep = detail::protocol1_branch(cfg, h, pre, r);
        out.push_back({r, p, rep.fidelity, rep.subsystem_fidelity, target_parity(r, cfg.M), rep.postselected});
    }
    return out;
}

inline QuantumState protocol2_final_state(const ProtocolConfig& cfg, const ProtocolHamiltonians& h) {
    auto s = h.integrable_step(h.initial_state(cfg), cfg.t_m() - cfg.t_nu(), cfg.t_m());
    s = h.nu_step(s, cfg);
    s = h.integrable_step(s, cfg.t_m() - cfg.t_mu(), cfg.t_m());
    return h.mu_step(s, cfg);
}

inline ProtocolReport run_protocol2(const ProtocolConfig& cfg, const ProtocolHamiltonians& h) {
    auto final_state = protocol2_final_state(cfg, h);
    auto ideal = ideal_protocol2_output(cfg, h.basis);
    const double f = fidelity(ideal, final_state);
    const double fb = subsystem_b_fidelity(final_state, cfg.P, 1.0, protocol2_phase(cfg));
    return {std::move(final_state), std::move(ideal), f, std::nullopt, 2.0 * cfg.t_m(), true, fb};
}

// ---------------------------------------------------------------------------
// Readout

enum class ReadoutLaw {
    half_cos2,     // cos^2(P theta / 2) / 2
    half_sin2,     // sin^2(P theta / 2) / 2
    shifted_sin2,  // sin^2(P theta / 2 - pi/4)
    shifted_cos2,  // cos^2(P theta / 2 - pi/4)
};

inline double readout_law(ReadoutLaw law, double p_theta) {
    const double h = p_theta / 2.0;
    const double q = h - std::numbers::pi / 4.0;
    switch (law) {
        case ReadoutLaw::half_cos2: return 0.5 * std::cos(h) * std::cos(h);
        case ReadoutLaw::half_sin2: return 0.5 * std::sin(h) * std::sin(h);
        case ReadoutLaw::shifted_sin2: return std::sin(q) * std::sin(q);
        case ReadoutLaw::shifted_cos2: return std::cos(q) * std::cos(q);
    }
    return 0.0;
}

enum class ProtocolKind { I, II };

struct ReadoutResult {
    ProtocolKind protocol;
    double branch_probability;  // step-(iii) probability for Protocol I, 1 for Protocol II
    std::vector<OutcomeProbability> conditional;  // site-3 distribution after U(t_m, 0, 0)
    double predicted_zero;  // analytic joint probability of readout 0
    double predicted_M;     // analytic joint probability of readout M

    double conditional_probability(int r) const {
        for (const auto& o : conditional)
            if (o.r == r) return o.probability;
        return 0.0;
    }
    double joint_probability(int r) const { return branch_probability * conditional_probability(r); }
};

/// Continues the protocol output under U(t_m, 0, 0) and measures site 3.
inline ReadoutResult run_readout(const ProtocolReport& report, const ProtocolConfig& cfg,
                                 const ProtocolHamiltonians& h) {
    const auto out = evolve(report.final_state, h.integrable, cfg.t_m());
    ReadoutResult res;
    res.conditional = measure_distribution(out, Site(3));
    if (report.measurement) {
        res.protocol = ProtocolKind::I;
        res.branch_probability = report.measurement->probability;
        res.predicted_zero = readout_law(ReadoutLaw::half_cos2, cfg.p_theta);
        res.predicted_M = readout_law(ReadoutLaw::half_sin2, cfg.p_theta);
    } else {
        res.protocol = ProtocolKind::II;
        res.branch_probability = 1.0;
        res.predicted_zero = readout_law(ReadoutLaw::shifted_sin2, cfg.p_theta);
        res.predicted_M = readout_law(ReadoutLaw::shifted_cos2, cfg.p_theta);
    }
    return res;
}

struct ReadoutSample {
    double p_theta;
    double probability;
};

/// Least-squares amplitude c minimizing sum (P - c law(P theta))^2.
inline double fit_readout_amplitude(std::span<const ReadoutSample> samples, ReadoutLaw law) {
    std::vector<double> distinct;
    double num = 0.0, den = 0.0;
    for (const auto& s : samples) {
        const double l = readout_law(law, s.p_theta);
        num += s.probability * l;
        den += l * l;
        if (std::find(distinct.begin(), distinct.end(), s.p_theta) == distinct.end()) distinct.push_back(s.p_theta);
    }
    if (den < 1e-300) throw ValidationError("readout fit is degenerate: the law vanishes on every sample");
    if (distinct.size() < 3) throw ValidationError("readout fit needs at least 3 distinct P*theta values");
    return num / den;
}

/// Readout samples of both protocols over a P*theta grid, grouped per law.
struct ReadoutSweep {
    std::vector<ReadoutSample> zero_after_I;  // P(0,0) and P(M,0): both branches, readout 0
    std::vector<ReadoutSample> M_after_I;     // P(0,M) and P(M,M)
    std::vector<ReadoutSample> zero_after_II;
    std::vector<ReadoutSample> M_after_II;

    double c00() const { return fit_readout_amplitude(zero_after_I, ReadoutLaw::half_cos2); }
    double cMM() const { return fit_readout_amplitude(M_after_I, ReadoutLaw::half_sin2); }
    double c0() const { return fit_readout_amplitude(zero_after_II, ReadoutLaw::shifted_sin2); }
    double cM() const { return fit_readout_amplitude(M_after_II, ReadoutLaw::shifted_cos2); }
};

inline ReadoutSweep readout_sweep(const ProtocolConfig& base, const ProtocolHamiltonians& h,
                                  std::span<const double> grid) {
    ReadoutSweep sweep;
    for (double pt : grid) {
        const auto cfg = base.with_p_theta(pt);
        const auto pre = protocol1_pre_measurement(cfg, h);
        for (int r : {0, cfg.M}) {
            const auto rep = detail::protocol1_branch(cfg, h, pre, r);
            const auto ro = run_readout(rep, cfg, h);
            sweep.zero_after_I.push_back({pt, ro.joint_probability(0)});
            sweep.M_after_I.push_back({pt, ro.joint_probability(cfg.M)});
        }
        const auto ro2 = run_readout(run_protocol2(cfg, h), cfg, h);
        sweep.zero_after_II.push_back({pt, ro2.joint_probability(0)});
        sweep.M_after_II.push_back({pt, ro2.joint_probability(cfg.M)});
    }
    return sweep;
}

}  // namespace noon
