#pragma once

// Number-conserving Fock basis for four bosonic sites and the second-quantized
// operator actions used to build every matrix in the model.

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "noon/errors.hpp"

namespace noon {

inline constexpr int kSites = 4;

/// One-based lattice site label (1..4).
class Site {
public:
    constexpr explicit Site(int label) : label_(label) {
        if (label < 1 || label > kSites)
            throw ValidationError("site label must be in 1..4, got " + std::to_string(label));
    }
    constexpr int label() const { return label_; }
    constexpr std::size_t index() const { return static_cast<std::size_t>(label_ - 1); }
    friend constexpr bool operator==(Site, Site) = default;

private:
    int label_;
};

struct FockState {
    std::array<int, kSites> n{};

    int total() const { return n[0] + n[1] + n[2] + n[3]; }
    int operator[](Site s) const { return n[s.index()]; }
    int& operator[](Site s) { return n[s.index()]; }

    friend auto operator<=>(const FockState&, const FockState&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const FockState& s) {
    return os << '|' << s.n[0] << ',' << s.n[1] << ',' << s.n[2] << ',' << s.n[3] << '>';
}

/// All four-site occupations with a fixed total N, in ascending lexicographic
/// order. Immutable once built.
class FockBasis {
public:
    explicit FockBasis(int n_total) : n_total_(n_total) {
        if (n_total < 0) throw ValidationError("particle number must be non-negative");
        for (int a = 0; a <= n_total; ++a)
            for (int b = 0; a + b <= n_total; ++b)
                for (int c = 0; a + b + c <= n_total; ++c)
                    states_.push_back(FockState{{a, b, c, n_total - a - b - c}});
    }

    int particle_number() const { return n_total_; }
    std::size_t size() const { return states_.size(); }
    const FockState& state(std::size_t k) const { return states_.at(k); }
    const std::vector<FockState>& states() const { return states_; }

    std::optional<std::size_t> find(const FockState& s) const {
        if (s.total() != n_total_) return std::nullopt;
        auto it = std::lower_bound(states_.begin(), states_.end(), s);
        if (it == states_.end() || *it != s) return std::nullopt;
        return static_cast<std::size_t>(it - states_.begin());
    }

    std::size_t index_of(const FockState& s) const {
        if (auto k = find(s)) return *k;
        std::ostringstream msg;
        msg << "state " << s << " is not in the N=" << n_total_ << " basis";
        throw ValidationError(msg.str());
    }

    int occupation(std::size_t k, Site site) const { return states_[k][site]; }

    friend bool operator==(const FockBasis& a, const FockBasis& b) { return a.n_total_ == b.n_total_; }

private:
    int n_total_;
    std::vector<FockState> states_;
};

using BasisPtr = std::shared_ptr<const FockBasis>;

inline BasisPtr enumerate_basis(int n_total) { return std::make_shared<const FockBasis>(n_total); }

/// Complex amplitudes over a shared basis.
class QuantumState {
public:
    QuantumState(BasisPtr basis, Eigen::VectorXcd amplitudes)
        : basis_(std::move(basis)), amps_(std::move(amplitudes)) {
        if (!basis_) throw ValidationError("state requires a basis");
        if (static_cast<std::size_t>(amps_.size()) != basis_->size())
            throw ValidationError("amplitude vector length does not match basis size");
    }

    static QuantumState fock(BasisPtr basis, const FockState& s) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size()));
        v(static_cast<Eigen::Index>(basis->index_of(s))) = 1.0;
        return QuantumState(std::move(basis), std::move(v));
    }

    /// Normalized superposition sum_k c_k |s_k>.
    static QuantumState superposition(BasisPtr basis,
                                      std::span<const std::pair<std::complex<double>, FockState>> terms) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size()));
        for (const auto& [c, s] : terms) v(static_cast<Eigen::Index>(basis->index_of(s))) += c;
        QuantumState out(std::move(basis), std::move(v));
        out.normalize();
        return out;
    }

    const FockBasis& basis() const { return *basis_; }
    const BasisPtr& basis_ptr() const { return basis_; }
    const Eigen::VectorXcd& amplitudes() const { return amps_; }
    std::size_t size() const { return basis_->size(); }

    std::complex<double> amplitude(const FockState& s) const {
        auto k = basis_->find(s);
        return k ? amps_(static_cast<Eigen::Index>(*k)) : std::complex<double>{};
    }

    double norm() const { return amps_.norm(); }

    void normalize() {
        const double nrm = amps_.norm();
        if (nrm == 0.0) throw ValidationError("cannot normalize the zero vector");
        amps_ /= nrm;
    }

private:
    BasisPtr basis_;
    Eigen::VectorXcd amps_;
};

inline void require_same_basis(const QuantumState& a, const QuantumState& b) {
    if (!(a.basis() == b.basis())) throw ValidationError("states live in different particle-number sectors");
}

/// <a|b>
inline std::complex<double> inner_product(const QuantumState& a, const QuantumState& b) {
    require_same_basis(a, b);
    return a.amplitudes().dot(b.amplitudes());
}

// ---------------------------------------------------------------------------
// Second-quantized actions

struct Ladder {
    Site site;
    bool create;
};

inline Ladder create(int site) { return {Site(site), true}; }
inline Ladder annihilate(int site) { return {Site(site), false}; }

/// Applies a product of ladder operators to a Fock state, rightmost factor
/// first. Returns nullopt when the product annihilates the state.
inline std::optional<std::pair<FockState, double>> apply_ladders(FockState s, std::span<const Ladder> ops) {
    double amp = 1.0;
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        int& n = s[it->site];
        if (it->create) {
            ++n;
            amp *= std::sqrt(static_cast<double>(n));
        } else {
            if (n == 0) return std::nullopt;
            amp *= std::sqrt(static_cast<double>(n));
            --n;
        }
    }
    return std::make_pair(s, amp);
}

struct MatrixEntry {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Nonzero entries of a_to^dagger a_from in the basis: each state with n_f
/// bosons on `from` maps to the state with one boson moved, amplitude
/// sqrt(n_f (n_t + 1)).
inline std::vector<MatrixEntry> matrix_element_hop(const FockBasis& basis, Site from, Site to) {
    if (from == to) throw ValidationError("hopping requires two distinct sites");
    std::vector<MatrixEntry> out;
    for (std::size_t col = 0; col < basis.size(); ++col) {
        FockState s = basis.state(col);
        const int nf = s[from];
        if (nf == 0) continue;
        const int nt = s[to];
        --s[from];
        ++s[to];
        out.push_back({basis.index_of(s), col, std::sqrt(static_cast<double>(nf) * (nt + 1))});
    }
    return out;
}

/// <N_site> for a normalized state.
inline double number_expectation(const QuantumState& state, Site site) {
    double acc = 0.0;
    const auto& amps = state.amplitudes();
    for (std::size_t k = 0; k < state.size(); ++k)
        acc += std::norm(amps(static_cast<Eigen::Index>(k))) * state.basis().occupation(k, site);
    return acc;
}

}  // namespace noon
