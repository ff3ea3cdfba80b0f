#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "noon/errors.hpp"
#include "noon/fock.hpp"
#include "noon/operator.hpp"

namespace noon {

struct EvolutionPlan {
    HermitianOperator hamiltonian;
    double duration;  // seconds

    EvolutionPlan(HermitianOperator h, double t) : hamiltonian(std::move(h)), duration(t) {
        if (!(t >= 0.0)) throw ValidationError("evolution duration must be non-negative");
    }
};

/// exp(-i H t) |psi> via the cached eigendecomposition of H.
inline QuantumState evolve(const QuantumState& state, const HermitianOperator& h, double t) {
    h.check_state(state);
    if (t == 0.0) return state;
    const auto& eig = h.eigen();
    const auto& v = eig.vectors;
    const Eigen::VectorXcd& psi = state.amplitudes();
    // V^T psi, split into real and imaginary parts to stay in real BLAS.
    Eigen::VectorXd re = v.transpose() * psi.real();
    Eigen::VectorXd im = v.transpose() * psi.imag();
    for (Eigen::Index k = 0; k < re.size(); ++k) {
        const std::complex<double> c = std::polar(1.0, -eig.values(k) * t) * std::complex<double>(re(k), im(k));
        re(k) = c.real();
        im(k) = c.imag();
    }
    Eigen::VectorXcd out(psi.size());
    out.real() = v * re;
    out.imag() = v * im;
    return QuantumState(state.basis_ptr(), std::move(out));
}

inline QuantumState evolve(const QuantumState& state, const EvolutionPlan& plan) {
    return evolve(state, plan.hamiltonian, plan.duration);
}

/// exp(-i t sum_k f(state_k)) for a diagonal generator, applied elementwise.
template <class F>
QuantumState apply_diagonal_phase(const QuantumState& state, F&& phase_of) {
    Eigen::VectorXcd out = state.amplitudes();
    for (std::size_t k = 0; k < state.size(); ++k)
        out(static_cast<Eigen::Index>(k)) *= std::polar(1.0, -phase_of(state.basis().state(k)));
    return QuantumState(state.basis_ptr(), std::move(out));
}

struct OutcomeProbability {
    int r;
    double probability;
};

/// Distribution of the occupation of `site`; zero-probability outcomes are omitted.
inline std::vector<OutcomeProbability> measure_distribution(const QuantumState& state, Site site) {
    std::map<int, double> acc;
    const auto& amps = state.amplitudes();
    for (std::size_t k = 0; k < state.size(); ++k) {
        const double p = std::norm(amps(static_cast<Eigen::Index>(k)));
        if (p > 0.0) acc[state.basis().occupation(k, site)] += p;
    }
    std::vector<OutcomeProbability> out;
    out.reserve(acc.size());
    for (const auto& [r, p] : acc) out.push_back({r, p});
    return out;
}

inline double outcome_probability(const QuantumState& state, Site site, int r) {
    double p = 0.0;
    const auto& amps = state.amplitudes();
    for (std::size_t k = 0; k < state.size(); ++k)
        if (state.basis().occupation(k, site) == r) p += std::norm(amps(static_cast<Eigen::Index>(k)));
    return p;
}

struct MeasurementRecord {
    Site site;
    int r;
    double probability;
    QuantumState post_state;
};

/// Ideal projective measurement of N_site with outcome r: zero the amplitudes
/// outside the r-subspace and renormalize.
inline MeasurementRecord project(const QuantumState& state, Site site, int r) {
    Eigen::VectorXcd out = state.amplitudes();
    double p = 0.0;
    for (std::size_t k = 0; k < state.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        if (state.basis().occupation(k, site) == r)
            p += std::norm(out(i));
        else
            out(i) = 0.0;
    }
    if (!(p > 0.0))
        throw ValidationError("impossible outcome: N" + std::to_string(site.label()) + " = " + std::to_string(r) +
                              " has zero probability");
    out /= std::sqrt(p);
    return {site, r, p, QuantumState(state.basis_ptr(), std::move(out))};
}

}  // namespace noon
