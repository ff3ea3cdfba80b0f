#pragma once

// Spectra of the integrable model versus U/J, band bookkeeping and the
// comparison between the full and the effective dynamics.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "noon/dynamics.hpp"
#include "noon/errors.hpp"
#include "noon/fock.hpp"
#include "noon/model.hpp"

namespace noon {

struct SpectrumPoint {
    double u_over_j;
    double mu_over_j;
    Eigen::VectorXd energies;  // (E - C)/J, ascending
};

struct SpectrumSweep {
    int n_total;
    std::vector<SpectrumPoint> points;
};

/// Eigenvalues of the integrable Hamiltonian at each U/J, with the band
/// constant C removed and scaled by J. U0, J and the fields come from the template.
inline SpectrumSweep sweep_spectrum(const ModelParameters& tmpl, std::span<const double> u_over_j,
                                    const BasisPtr& basis) {
    if (!(tmpl.J > 0.0)) throw ValidationError("spectrum sweep requires J > 0");
    SpectrumSweep sweep{basis->particle_number(), {}};
    for (double r : u_over_j) {
        auto p = ModelParameters::integrable(tmpl.U0, r * tmpl.J, tmpl.J).with_fields(tmpl.mu, tmpl.nu);
        const double c = band_constant(p, sweep.n_total);
        Eigen::VectorXd e = build_full_hamiltonian(p, basis).eigenvalues();
        e = (e.array() - c) / tmpl.J;
        sweep.points.push_back({r, tmpl.mu / tmpl.J, std::move(e)});
    }
    return sweep;
}

/// Same, sweeping mu/J at fixed U/J (nu follows the template).
inline SpectrumSweep sweep_spectrum_mu(const ModelParameters& tmpl, double u_over_j,
                                       std::span<const double> mu_over_j, const BasisPtr& basis) {
    if (!(tmpl.J > 0.0)) throw ValidationError("spectrum sweep requires J > 0");
    SpectrumSweep sweep{basis->particle_number(), {}};
    for (double m : mu_over_j) {
        auto p = ModelParameters::integrable(tmpl.U0, u_over_j * tmpl.J, tmpl.J).with_fields(m * tmpl.J, tmpl.nu);
        const double c = band_constant(p, sweep.n_total);
        Eigen::VectorXd e = build_full_hamiltonian(p, basis).eigenvalues();
        e = (e.array() - c) / tmpl.J;
        sweep.points.push_back({u_over_j, m, std::move(e)});
    }
    return sweep;
}

struct BandLabel {
    int M;
    int P;
    friend bool operator==(const BandLabel&, const BandLabel&) = default;
};

inline std::size_t band_size(BandLabel b) {
    if (b.M == b.P) return static_cast<std::size_t>((b.M + 1) * (b.P + 1));
    return static_cast<std::size_t>(2 * (b.M + 1) * (b.P + 1));
}

/// Bands of the N sector in ascending energy order (largest |M - P| lowest).
inline std::vector<BandLabel> predicted_bands(int n_total) {
    std::vector<BandLabel> out;
    for (int m = 0; 2 * m <= n_total; ++m) out.push_back({m, n_total - m});
    return out;
}

struct Band {
    BandLabel label;
    std::size_t first;  // index of the lowest level
    std::size_t count;
    double low;
    double high;
};

struct BandBoundary {
    double gap;
    double spread;  // larger intra-band spread of the two neighbours
    double ratio() const { return spread > 0.0 ? gap / spread : (gap > 0.0 ? std::numeric_limits<double>::infinity() : 0.0); }
    bool resolved() const { return gap > 0.0 && ratio() > 3.0; }
};

struct BandAssignment {
    int n_total;
    std::vector<Band> bands;
    std::vector<BandBoundary> boundaries;  // boundaries[k] separates bands k and k+1

    BandLabel label_of(std::size_t level) const {
        for (const auto& b : bands)
            if (level >= b.first && level < b.first + b.count) return b.label;
        throw ValidationError("level index out of range");
    }
};

/// Partitions the sorted levels into the predicted contiguous bands and
/// measures each boundary; never throws on unresolved gaps.
inline BandAssignment partition_bands(const Eigen::VectorXd& energies, int n_total) {
    const auto labels = predicted_bands(n_total);
    std::size_t total = 0;
    for (auto l : labels) total += band_size(l);
    if (total != static_cast<std::size_t>(energies.size()))
        throw ValidationError("level count " + std::to_string(energies.size()) + " does not match the N=" +
                              std::to_string(n_total) + " sector");
    BandAssignment a{n_total, {}, {}};
    std::size_t first = 0;
    for (auto l : labels) {
        const auto n = band_size(l);
        const auto i0 = static_cast<Eigen::Index>(first);
        const auto i1 = static_cast<Eigen::Index>(first + n - 1);
        a.bands.push_back({l, first, n, energies(i0), energies(i1)});
        first += n;
    }
    for (std::size_t k = 0; k + 1 < a.bands.size(); ++k) {
        const auto& lo = a.bands[k];
        const auto& hi = a.bands[k + 1];
        a.boundaries.push_back({hi.low - lo.high, std::max(lo.high - lo.low, hi.high - hi.low)});
    }
    return a;
}

/// Band assignment requiring every boundary to be resolved.
inline BandAssignment assign_bands(const Eigen::VectorXd& energies, int n_total) {
    auto a = partition_bands(energies, n_total);
    for (std::size_t k = 0; k < a.boundaries.size(); ++k) {
        if (!a.boundaries[k].resolved()) {
            const auto& l = a.bands[k].label;
            const auto& h = a.bands[k + 1].label;
            throw NumericalError("bands unresolved between (" + std::to_string(l.M) + "," + std::to_string(l.P) +
                                 ") and (" + std::to_string(h.M) + "," + std::to_string(h.P) + ")");
        }
    }
    return a;
}

/// Locates one band, requiring only its own boundaries to be resolved.
inline Band locate_band(const Eigen::VectorXd& energies, int n_total, BandLabel target) {
    const auto a = partition_bands(energies, n_total);
    for (std::size_t k = 0; k < a.bands.size(); ++k) {
        if (!(a.bands[k].label == target)) continue;
        const bool below = k == 0 || a.boundaries[k - 1].resolved();
        const bool above = k + 1 == a.bands.size() || a.boundaries[k].resolved();
        if (!below || !above)
            throw NumericalError("bands unresolved around (" + std::to_string(target.M) + "," +
                                 std::to_string(target.P) + ")");
        return a.bands[k];
    }
    throw ValidationError("no band (" + std::to_string(target.M) + "," + std::to_string(target.P) +
                          ") in the N=" + std::to_string(n_total) + " sector");
}

/// Band whose J = 0 energy C - U (M - P)^2 lies closest to the diagonal
/// energy of the Fock state.
inline BandLabel band_of_fock_state(const ModelParameters& p, const FockState& s) {
    const int n = s.total();
    const auto& k = s.n;
    double e = 0.0;
    for (int i = 0; i < kSites; ++i) e += 0.5 * p.U0 * k[i] * (k[i] - 1);
    e += p.U12 * k[0] * k[1] + p.U13 * k[0] * k[2] + p.U14 * k[0] * k[3];
    e += p.U23 * k[1] * k[2] + p.U24 * k[1] * k[3] + p.U34 * k[2] * k[3];
    e += p.mu * (k[1] - k[3]) + p.nu * (k[0] - k[2]);
    BandLabel best{0, n};
    double dist = std::numeric_limits<double>::infinity();
    for (auto l : predicted_bands(n)) {
        const double d = std::abs(e - band_energy(p, l.M, l.P));
        if (d < dist) {
            dist = d;
            best = l;
        }
    }
    return best;
}

struct EffectiveComparison {
    double max_deficit;  // max_t 1 - |<Phi_full(t)|Phi_eff(t)>|
    double at_time;
};

/// Evolves |M, P, 0, 0> under the full integrable H and under H_eff and
/// reports the worst overlap deficit on the time grid.
inline EffectiveComparison compare_effective(const BasisPtr& basis, int M, int P, const ModelParameters& params,
                                             std::span<const double> times) {
    const auto d = derive_scales(params, M, P);
    const auto h_full = build_full_hamiltonian(params, basis);
    const auto h_eff = build_effective_hamiltonian_charges(basis, M + P, d);
    const auto psi0 = QuantumState::fock(basis, FockState{{M, P, 0, 0}});
    EffectiveComparison out{0.0, 0.0};
    for (double t : times) {
        const double deficit = 1.0 - std::abs(inner_product(evolve(psi0, h_full, t), evolve(psi0, h_eff, t)));
        if (deficit > out.max_deficit) out = {deficit, t};
    }
    return out;
}

}  // namespace noon
