#pragma once

// Four-site extended Bose-Hubbard model. All couplings are angular
// frequencies (the value of X/hbar, rad/s) and times are seconds, so hbar = 1
// throughout the dynamics.

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "noon/errors.hpp"
#include "noon/fock.hpp"
#include "noon/operator.hpp"

namespace noon {

struct ModelParameters {
    double U0 = 0.0;
    double U12 = 0.0;
    double U13 = 0.0;
    double U14 = 0.0;
    double U23 = 0.0;
    double U24 = 0.0;
    double U34 = 0.0;
    double J = 0.0;
    double mu = 0.0;  // field on sites 2-4: mu (N2 - N4)
    double nu = 0.0;  // field on sites 1-3: nu (N1 - N3)

    /// Couplings at the integrable point: U13 = U24 = U0 and all nearest
    /// neighbour couplings equal to U0 + 4U.
    static ModelParameters integrable(double U0, double U, double J) {
        ModelParameters p;
        p.U0 = p.U13 = p.U24 = U0;
        p.U12 = p.U14 = p.U23 = p.U34 = U0 + 4.0 * U;
        p.J = J;
        return p;
    }

    bool integrable() const {
        return U13 == U0 && U24 == U0 && U12 == U23 && U23 == U34 && U34 == U14;
    }

    /// U = (U12 - U0) / 4.
    double band_coupling() const { return (U12 - U0) / 4.0; }

    double coupling(Site i, Site j) const {
        int a = std::min(i.label(), j.label());
        int b = std::max(i.label(), j.label());
        if (a == b) return U0;
        switch (a * 10 + b) {
            case 12: return U12;
            case 13: return U13;
            case 14: return U14;
            case 23: return U23;
            case 24: return U24;
            default: return U34;
        }
    }

    ModelParameters with_fields(double mu_value, double nu_value) const {
        ModelParameters p = *this;
        p.mu = mu_value;
        p.nu = nu_value;
        return p;
    }
};

/// Band-scale quantities for the (M, P) initial split.
struct DerivedScales {
    int M = 0;
    int P = 0;
    double U = 0.0;
    double J = 0.0;
    double Omega = 0.0;
    double t_m = 0.0;
    std::optional<int> beta;  // (-1)^((N+1)/2), odd N only
};

inline DerivedScales derive_scales(const ModelParameters& params, int M, int P) {
    if (M < 0 || P < 0) throw ValidationError("occupations must be non-negative");
    const int diff = M - P;
    if (std::abs(diff) < 2)
        throw ValidationError("|M - P| >= 2 is required (the resonant-regime scale diverges otherwise)");
    DerivedScales d;
    d.M = M;
    d.P = P;
    d.U = params.band_coupling();
    d.J = params.J;
    d.Omega = d.J * d.J / (4.0 * d.U * (diff * diff - 1));
    d.t_m = std::numbers::pi / (2.0 * d.Omega);
    const int n = M + P;
    if (n % 2 == 1) d.beta = ((n + 1) / 2) % 2 == 0 ? 1 : -1;
    return d;
}

/// Full Hamiltonian with the integrability-breaking fields:
/// (U0/2) sum N_i(N_i-1) + sum_{i<j} U_ij N_i N_j
///   - (J/2)[(a1^+ + a3^+)(a2 + a4) + h.c.] + mu (N2 - N4) + nu (N1 - N3).
inline HermitianOperator build_full_hamiltonian(const ModelParameters& p, const BasisPtr& basis) {
    auto diag = diagonal_operator(basis, [&p](const FockState& s) {
        // Integer counts first, then one extended-precision sum, so states with
        // equal exact energy get bitwise equal entries.
        const auto& n = s.n;
        int pairs = 0;
        for (int i = 0; i < kSites; ++i) pairs += n[i] * (n[i] - 1) / 2;
        using ld = long double;
        ld e = ld(p.U0) * pairs;
        e += ld(p.U12) * (n[0] * n[1]) + ld(p.U13) * (n[0] * n[2]) + ld(p.U14) * (n[0] * n[3]);
        e += ld(p.U23) * (n[1] * n[2]) + ld(p.U24) * (n[1] * n[3]) + ld(p.U34) * (n[2] * n[3]);
        e += ld(p.mu) * (n[1] - n[3]) + ld(p.nu) * (n[0] - n[2]);
        return static_cast<double>(e);
    });
    Eigen::MatrixXd m = diag.matrix();
    if (p.J != 0.0) {
        for (int a : {1, 3})
            for (int b : {2, 4}) m -= 0.5 * p.J * hop_pair_matrix(*basis, Site(a), Site(b));
    }
    return HermitianOperator(basis, std::move(m));
}

/// Diagonal perturbation N1 N3 + N2 N4 (moves the system off U13 = U24 = U0).
inline HermitianOperator build_diagonal_pair_term(const BasisPtr& basis) {
    return diagonal_operator(basis, [](const FockState& s) {
        return static_cast<double>(s.n[0] * s.n[2] + s.n[1] * s.n[3]);
    });
}

/// mu (N2 - N4) + nu (N1 - N3).
inline HermitianOperator build_field_term(const BasisPtr& basis, double mu, double nu) {
    return diagonal_operator(basis, [mu, nu](const FockState& s) {
        return mu * (s.n[1] - s.n[3]) + nu * (s.n[0] - s.n[2]);
    });
}

enum class Charge { Q1, Q2 };

/// 2 Q1 = N1 + N3 - a1^+ a3 - a1 a3^+ (and Q2 on sites 2, 4).
inline HermitianOperator build_charge(const BasisPtr& basis, Charge which) {
    const Site a(which == Charge::Q1 ? 1 : 2);
    const Site b(which == Charge::Q1 ? 3 : 4);
    auto occ = diagonal_operator(basis, [a, b](const FockState& s) { return 0.5 * (s[a] + s[b]); });
    return HermitianOperator(basis, occ.matrix() - 0.5 * hop_pair_matrix(*basis, a, b));
}

/// Second-order effective Hamiltonian in its second-quantized form, with
/// coefficients J^2 / (16 U (M - P +- 1)).
inline HermitianOperator build_effective_hamiltonian_sq(const BasisPtr& basis, int M, int P,
                                                        const DerivedScales& d) {
    const int diff = M - P;
    if (std::abs(diff) <= 1) throw ValidationError("second-quantized H_eff requires |M - P| >= 2");
    const double base = d.J * d.J / (16.0 * d.U);
    const double cp = base / (diff + 1);
    const double cm = base / (diff - 1);
    auto c = [](int s) { return create(s); };
    auto a = [](int s) { return annihilate(s); };
    const std::vector<LadderTerm> terms = {
        // (a1 a3^+ + a3 a1^+)(N2 + N4)
        {cp, {a(1), c(3), c(2), a(2)}}, {cp, {a(1), c(3), c(4), a(4)}},
        {cp, {a(3), c(1), c(2), a(2)}}, {cp, {a(3), c(1), c(4), a(4)}},
        // (a1 a1^+ + a3 a3^+)(a2^+ a4 + a4^+ a2)
        {cp, {a(1), c(1), c(2), a(4)}}, {cp, {a(1), c(1), c(4), a(2)}},
        {cp, {a(3), c(3), c(2), a(4)}}, {cp, {a(3), c(3), c(4), a(2)}},
        // -(a2 a2^+ + a4 a4^+)(a1^+ a3 + a3^+ a1)
        {-cm, {a(2), c(2), c(1), a(3)}}, {-cm, {a(2), c(2), c(3), a(1)}},
        {-cm, {a(4), c(4), c(1), a(3)}}, {-cm, {a(4), c(4), c(3), a(1)}},
        // -(a2 a4^+ + a4 a2^+)(N1 + N3)
        {-cm, {a(2), c(4), c(1), a(1)}}, {-cm, {a(2), c(4), c(3), a(3)}},
        {-cm, {a(4), c(2), c(1), a(1)}}, {-cm, {a(4), c(2), c(3), a(3)}},
        // correlated pair hopping
        {cp - cm, {c(1), a(2), a(3), c(4)}}, {cp - cm, {c(1), c(2), a(3), a(4)}},
        {cp - cm, {a(1), c(2), c(3), a(4)}}, {cp - cm, {a(1), a(2), c(3), c(4)}},
    };
    return build_operator(basis, terms);
}

/// H_eff = (N + 1) Omega (Q1 + Q2) - 2 Omega Q1 Q2.
inline HermitianOperator build_effective_hamiltonian_charges(const BasisPtr& basis, int n_total,
                                                             const DerivedScales& d) {
    if (!std::isfinite(d.Omega)) throw ValidationError("Omega must be finite");
    const auto q1 = build_charge(basis, Charge::Q1);
    const auto q2 = build_charge(basis, Charge::Q2);
    return ((n_total + 1) * d.Omega) * (q1 + q2) - (2.0 * d.Omega) * symmetric_product(q1, q2);
}

/// Diagonal energy of |M-l, P-k, l, k> at J = mu = nu = 0 on the integrable
/// manifold: C - U (M - P)^2 with C = (U0 + U12) N^2 / 4 - U0 N / 2.
inline double band_energy(const ModelParameters& p, int M, int P) {
    const int n = M + P;
    const double c = (p.U0 + p.U12) * n * n / 4.0 - p.U0 * n / 2.0;
    return c - p.band_coupling() * (M - P) * (M - P);
}

inline double band_constant(const ModelParameters& p, int n_total) {
    return (p.U0 + p.U12) * n_total * n_total / 4.0 - p.U0 * n_total / 2.0;
}

}  // namespace noon
