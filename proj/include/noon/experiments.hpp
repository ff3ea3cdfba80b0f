#pragma once

// One function per experiment kind. Each returns a manifest and the data
// tables; the CLI only handles files and exit codes.

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "noon/config.hpp"
#include "noon/io.hpp"
#include "noon/lattice.hpp"
#include "noon/protocols.hpp"
#include "noon/robustness.hpp"
#include "noon/spectrum.hpp"

namespace noon::experiments {

using io::num;

struct Output {
    io::Manifest manifest;
    std::vector<std::pair<std::string, io::Table>> tables;
};

inline const std::vector<std::string>& kinds() {
    static const std::vector<std::string> k = {"spectrum", "evolve", "protocol1", "protocol2",
                                               "readout",  "physical", "robustness", "presets"};
    return k;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw ValidationError("grid needs at least one point");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
    return v;
}

namespace detail {

inline void echo_config(io::Manifest& m, const std::string& kind, const config::RawConfig& c) {
    m.set("experiment", kind);
    for (const auto& [k, v] : c.values()) m.set("config." + k, v);
}

inline void echo_protocol(io::Manifest& m, const ProtocolConfig& cfg) {
    m.set("M", cfg.M);
    m.set("P", cfg.P);
    m.set("N", cfg.n_total());
    m.set("U0", cfg.params.U0);
    m.set("U13", cfg.params.U13);
    m.set("U12", cfg.params.U12);
    m.set("U", cfg.params.band_coupling());
    m.set("J", cfg.params.J);
    m.set("mu", cfg.mu);
    m.set("nu", cfg.nu);
    m.set("nu_sign", cfg.nu_sign);
    m.set("Omega", cfg.derived.Omega);
    m.set("beta", cfg.beta());
    m.set("t_m", cfg.t_m());
    m.set("t_nu", cfg.t_nu());
    m.set("t_mu(P theta = pi)", std::numbers::pi / (2.0 * cfg.P * cfg.mu));
}

inline std::string parity_name(NoonParity p) { return p == NoonParity::symmetric ? "symmetric" : "antisymmetric"; }

inline std::string label(BandLabel b) { return "(" + std::to_string(b.M) + "," + std::to_string(b.P) + ")"; }

}  // namespace detail

inline Output spectrum(const config::RawConfig& c) {
    Output out;
    detail::echo_config(out.manifest, "spectrum", c);
    const auto model = config::resolve_model(c);
    const int n = c.integer("spectrum.N", c.integer("run.M", 4) + c.integer("run.P", 11));
    const int points = c.integer("spectrum.points", c.integer("run.grid", 41));
    const auto basis = enumerate_basis(n);
    const auto sweep_kind = c.str("spectrum.sweep", "u");
    SpectrumSweep sweep;
    auto tmpl = model.params;
    if (sweep_kind == "u") {
        const auto grid = linspace(c.real("spectrum.u_min", 0.0), c.real("spectrum.u_max", 20.0), points);
        sweep = sweep_spectrum(tmpl, grid, basis);
    } else if (sweep_kind == "mu") {
        const double u = c.real("spectrum.u_over_j", tmpl.band_coupling() / tmpl.J);
        const auto grid = linspace(c.real("spectrum.mu_min", 0.0), c.real("spectrum.mu_max", 1.0), points);
        sweep = sweep_spectrum_mu(tmpl, u, grid, basis);
    } else {
        throw ValidationError("spectrum.sweep must be u or mu");
    }
    out.manifest.set("N", n);
    out.manifest.set("basis_size", static_cast<int>(basis->size()));
    out.manifest.set("J", tmpl.J);
    out.manifest.set("energy_offset", "band constant C = (U0 + U12) N^2/4 - U0 N/2 subtracted");

    io::Table levels({"U_over_J", "mu_over_J", "eigenvalue_index", "E_over_J", "band_label"});
    io::Table bands({"U_over_J", "mu_over_J", "band", "levels", "low", "high", "gap_ratio_above", "resolved"});
    for (const auto& pt : sweep.points) {
        const auto a = partition_bands(pt.energies, n);
        std::vector<std::string> names(a.bands.size());
        for (std::size_t k = 0; k < a.bands.size(); ++k) {
            const bool below = k == 0 || a.boundaries[k - 1].resolved();
            const bool above = k + 1 == a.bands.size() || a.boundaries[k].resolved();
            names[k] = below && above ? detail::label(a.bands[k].label) : "unresolved";
            const std::string ratio = k + 1 < a.bands.size() ? num(a.boundaries[k].ratio()) : "";
            bands.add({num(pt.u_over_j), num(pt.mu_over_j), detail::label(a.bands[k].label),
                       num(static_cast<int>(a.bands[k].count)), num(a.bands[k].low), num(a.bands[k].high), ratio,
                       below && above ? "1" : "0"});
        }
        std::size_t band = 0;
        for (Eigen::Index i = 0; i < pt.energies.size(); ++i) {
            const auto idx = static_cast<std::size_t>(i);
            while (idx >= a.bands[band].first + a.bands[band].count) ++band;
            levels.add({num(pt.u_over_j), num(pt.mu_over_j), num(static_cast<int>(i)), num(pt.energies(i)), names[band]});
        }
    }
    out.tables.emplace_back("spectrum", std::move(levels));
    out.tables.emplace_back("bands", std::move(bands));
    return out;
}

inline Output evolve(const config::RawConfig& c) {
    Output out;
    detail::echo_config(out.manifest, "evolve", c);
    const auto cfg = config::protocol_config(c);
    detail::echo_protocol(out.manifest, cfg);
    const auto basis = enumerate_basis(cfg.n_total());
    const auto h_full = build_full_hamiltonian(cfg.params, basis);
    const auto h_eff = build_effective_hamiltonian_charges(basis, cfg.n_total(), cfg.derived);
    const auto psi0 = QuantumState::fock(basis, FockState{{cfg.M, cfg.P, 0, 0}});
    const auto times = linspace(0.0, c.real("evolve.t_max", cfg.t_m()), c.integer("evolve.steps", c.integer("run.grid", 65)));
    io::Table t({"t", "N1", "N2", "N3", "N4", "N1_eff", "N2_eff", "N3_eff", "N4_eff", "overlap_full_eff"});
    double worst = 0.0;
    for (double time : times) {
        const auto a = noon::evolve(psi0, h_full, time);
        const auto b = noon::evolve(psi0, h_eff, time);
        const double ov = std::abs(inner_product(a, b));
        worst = std::max(worst, 1.0 - ov);
        std::vector<std::string> row{num(time)};
        for (int s = 1; s <= 4; ++s) row.push_back(num(number_expectation(a, Site(s))));
        for (int s = 1; s <= 4; ++s) row.push_back(num(number_expectation(b, Site(s))));
        row.push_back(num(ov));
        t.add(std::move(row));
    }
    out.manifest.set("max_deficit_full_vs_eff", worst);
    out.tables.emplace_back("evolve", std::move(t));
    return out;
}

inline Output protocol1(const config::RawConfig& c) {
    Output out;
    detail::echo_config(out.manifest, "protocol1", c);
    const auto base = config::protocol_config(c);
    const auto mode = config::execution_mode(c);
    detail::echo_protocol(out.manifest, base);
    out.manifest.set("mode", mode == Execution::full ? "full" : "idealized");
    const auto h = ProtocolHamiltonians::build(base, mode);
    const auto grid = c.has("protocol.p_theta") && !c.has("run.grid") ? std::vector<double>{base.p_theta}
                                                                      : p_theta_grid(c.integer("run.grid", 64));
    io::Table t({"p_theta", "r", "probability", "fidelity", "subsystem_fidelity", "target", "postselected"});
    for (double pt : grid) {
        const auto cfg = base.with_p_theta(pt);
        for (const auto& o : protocol1_outcomes(cfg, h))
            t.add({num(pt), num(o.r), num(o.probability), num(o.fidelity), num(o.subsystem_fidelity),
                   detail::parity_name(o.target), o.postselected ? "1" : "0"});
    }
    out.tables.emplace_back("protocol1", std::move(t));
    return out;
}

inline Output protocol2(const config::RawConfig& c) {
    Output out;
    detail::echo_config(out.manifest, "protocol2", c);
    const auto base = config::protocol_config(c);
    const auto mode = config::execution_mode(c);
    detail::echo_protocol(out.manifest, base);
    out.manifest.set("mode", mode == Execution::full ? "full" : "idealized");
    const auto h = ProtocolHamiltonians::build(base, mode);
    io::Table t({"p_theta", "F_I_r0", "F_I_rM", "F_II"});
    for (double pt : p_theta_grid(c.integer("run.grid", 64))) {
        const auto cfg = base.with_p_theta(pt);
        const auto pre = protocol1_pre_measurement(cfg, h);
        const double f0 = fidelity(ideal_protocol1_output(cfg, h.basis, 0), project(pre, Site(3), 0).post_state);
        const double fm = fidelity(ideal_protocol1_output(cfg, h.basis, cfg.M), project(pre, Site(3), cfg.M).post_state);
        t.add({num(pt), num(f0), num(fm), num(run_protocol2(cfg, h).fidelity)});
    }
    out.tables.emplace_back("protocol2", std::move(t));
    return out;
}

inline Output readout(const config::RawConfig& c) {
    Output out;
    detail::echo_config(out.manifest, "readout", c);
    const auto base = config::protocol_config(c);
    const auto mode = config::execution_mode(c);
    detail::echo_protocol(out.manifest, base);
    out.manifest.set("mode", mode == Execution::full ? "full" : "idealized");
    const auto h = ProtocolHamiltonians::build(base, mode);
    const auto grid = p_theta_grid(c.integer("run.grid", 64));
    const auto sweep = readout_sweep(base, h, grid);
    io::Table t({"p_theta", "P_I_00", "P_I_M0", "P_I_0M", "P_I_MM", "law_half_cos2", "law_half_sin2", "P_II_0",
                 "P_II_M", "law_shifted_sin2", "law_shifted_cos2"});
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double pt = grid[k];
        t.add({num(pt), num(sweep.zero_after_I[2 * k].probability), num(sweep.zero_after_I[2 * k + 1].probability),
               num(sweep.M_after_I[2 * k].probability), num(sweep.M_after_I[2 * k + 1].probability),
               num(readout_law(ReadoutLaw::half_cos2, pt)), num(readout_law(ReadoutLaw::half_sin2, pt)),
               num(sweep.zero_after_II[k].probability), num(sweep.M_after_II[k].probability),
               num(readout_law(ReadoutLaw::shifted_sin2, pt)), num(readout_law(ReadoutLaw::shifted_cos2, pt))});
    }
    io::Table fits({"coefficient", "value"});
    fits.add({"c00", num(sweep.c00())});
    fits.add({"cMM", num(sweep.cMM())});
    fits.add({"c0", num(sweep.c0())});
    fits.add({"cM", num(sweep.cM())});
    out.tables.emplace_back("readout", std::move(t));
    out.tables.emplace_back("fits", std::move(fits));
    return out;
}

inline Output physical(const config::RawConfig& c) {
    Output out;
    detail::echo_config(out.manifest, "physical", c);
    const auto trap = config::trap_parameters(c);
    const double d = c.real("lattice.displacement_um", 0.2) * 1e-6;
    const double J = c.real("lattice.J", config::resolve_model(c).params.J);
    const auto r = lattice::physical_report(trap, J, d, -d, 2 * std::numbers::pi * 1e3 * c.real("lattice.omega_lo_khz", 20.0),
                                            2 * std::numbers::pi * 1e3 * c.real("lattice.omega_hi_khz", 60.0));
    const double two_pi = 2.0 * std::numbers::pi;
    io::Table t({"quantity", "value", "unit"});
    auto add = [&t](const std::string& q, double v, const std::string& u) { t.add({q, num(v), u}); };
    add("scattering_length", trap.scattering_length, "a0");
    add("kappa2", trap.kappa2, "1");
    add("anisotropy_f", r.onsite.anisotropy, "1");
    add("omega_r", r.root.omega_r, "rad/s");
    add("omega_r_over_2pi", r.root.omega_r / two_pi / 1e3, "kHz");
    add("omega_z_over_2pi", r.omega_z / two_pi / 1e3, "kHz");
    add("kappa2_from_beams", r.implied_kappa2, "1");
    add("eta", r.eta, "1/m^2");
    add("delta", r.delta, "1");
    add("recoil_energy", r.recoil, "rad/s");
    add("V0_over_ER", r.lattice_depth_over_recoil, "1");
    add("U0_contact", r.onsite.contact, "rad/s");
    add("U0_dipolar", r.onsite.dipolar, "rad/s");
    add("U0", r.root.U0, "rad/s");
    add("U13", r.root.U13, "rad/s");
    add("U12", r.root.U12, "rad/s");
    add("U", r.U, "rad/s");
    add("J_input", J, "rad/s");
    add("mu", std::abs(r.fields.mu), "rad/s");
    add("nu", std::abs(r.fields.nu), "rad/s");
    add("dipolar_limit_d0", r.dipolar_limit, "rad/s");
    add("dipolar_standard_f", r.dipolar_standard, "rad/s");
    add("root_residual", r.root.residual, "rad/s");
    out.manifest.set("prefactor_reading", trap.reading == lattice::PrefactorReading::square_root ? "square_root" : "literal");
    out.manifest.set("model.U0", r.model.U0);
    out.manifest.set("model.U", r.model.band_coupling());
    out.manifest.set("model.J", r.model.J);
    out.manifest.set("model.mu", std::abs(r.fields.mu));
    out.tables.emplace_back("physical", std::move(t));
    return out;
}

inline Output robustness(const config::RawConfig& c) {
    Output out;
    detail::echo_config(out.manifest, "robustness", c);
    const auto r = config::robustness_config(c);
    detail::echo_protocol(out.manifest, r.base);
    out.manifest.set("p_theta", r.base.p_theta);
    const std::string mode = r.mode == PulseMode::pulsed ? "pulsed" : "static";
    out.manifest.set("source", r.source == ErrorSource::direct ? "direct" : "physical");
    io::Table t({"mode", "cycles", "xi_over_J", "fidelity", "fidelity_M", "t_m", "t_mu"});
    for (const auto& row : run_robustness(r))
        t.add({mode, num(r.mode == PulseMode::pulsed ? r.cycles : 0), num(row.xi_over_j), num(row.fidelity),
               row.fidelity_M ? num(*row.fidelity_M) : "", num(row.t_m), num(row.t_mu)});
    out.tables.emplace_back("robustness", std::move(t));
    return out;
}

inline Output presets(const config::RawConfig& c) {
    Output out;
    detail::echo_config(out.manifest, "presets", c);
    io::Table t({"id", "U", "J", "mu", "nu", "U0", "U_over_J", "note"});
    for (const auto& p : kPresets)
        t.add({std::string(p.id), num(p.U), num(p.J), num(p.mu), num(p.mu), num(p.U0), num(p.U / p.J),
               "\"" + std::string(p.note) + "\""});
    out.tables.emplace_back("presets", std::move(t));
    return out;
}

inline Output run(const std::string& kind, const config::RawConfig& c) {
    if (kind == "spectrum") return spectrum(c);
    if (kind == "evolve") return evolve(c);
    if (kind == "protocol1") return protocol1(c);
    if (kind == "protocol2") return protocol2(c);
    if (kind == "readout") return readout(c);
    if (kind == "physical") return physical(c);
    if (kind == "robustness") return robustness(c);
    if (kind == "presets") return presets(c);
    throw ValidationError("unknown experiment '" + kind + "'");
}

}  // namespace noon::experiments
