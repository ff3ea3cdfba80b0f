#pragma once

#include <cmath>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "noon/errors.hpp"
#include "noon/fock.hpp"

namespace noon {

/// Eigenvalues (ascending) and orthonormal eigenvectors, H = V diag(values) V^T.
struct Eigendecomposition {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

/// Dense Hermitian operator on one particle-number sector. Every operator in
/// this model is real in the Fock basis, so the matrix is stored real
/// symmetric. Immutable; the eigendecomposition is computed at most once and
/// shared between copies.
class HermitianOperator {
public:
    HermitianOperator(BasisPtr basis, Eigen::MatrixXd matrix)
        : basis_(std::move(basis)), matrix_(std::move(matrix)), cache_(std::make_shared<Cache>()) {
        if (!basis_) throw ValidationError("operator requires a basis");
        const auto d = static_cast<Eigen::Index>(basis_->size());
        if (matrix_.rows() != d || matrix_.cols() != d)
            throw ValidationError("operator matrix does not match basis size");
    }

    static HermitianOperator zero(BasisPtr basis) {
        const auto d = static_cast<Eigen::Index>(basis->size());
        return HermitianOperator(std::move(basis), Eigen::MatrixXd::Zero(d, d));
    }

    static HermitianOperator identity(BasisPtr basis) {
        const auto d = static_cast<Eigen::Index>(basis->size());
        return HermitianOperator(std::move(basis), Eigen::MatrixXd::Identity(d, d));
    }

    const FockBasis& basis() const { return *basis_; }
    const BasisPtr& basis_ptr() const { return basis_; }
    const Eigen::MatrixXd& matrix() const { return matrix_; }
    std::size_t dim() const { return basis_->size(); }

    /// max |H - H^dagger| over elements.
    double hermiticity_error() const {
        if (matrix_.size() == 0) return 0.0;
        return (matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff();
    }

    const Eigendecomposition& eigen() const {
        std::call_once(cache_->once, [this] {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix_);
            if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
            cache_->result.values = solver.eigenvalues();
            cache_->result.vectors = solver.eigenvectors();
        });
        return cache_->result;
    }

    const Eigen::VectorXd& eigenvalues() const { return eigen().values; }

    double expectation(const QuantumState& psi) const {
        check_state(psi);
        const auto& a = psi.amplitudes();
        return (a.real().dot(matrix_ * a.real()) + a.imag().dot(matrix_ * a.imag()));
    }

    QuantumState apply(const QuantumState& psi) const {
        check_state(psi);
        Eigen::VectorXcd out(psi.amplitudes().size());
        out.real() = matrix_ * psi.amplitudes().real();
        out.imag() = matrix_ * psi.amplitudes().imag();
        return QuantumState(basis_, std::move(out));
    }

    friend HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
        a.check_operator(b);
        return HermitianOperator(a.basis_, a.matrix_ + b.matrix_);
    }
    friend HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b) {
        a.check_operator(b);
        return HermitianOperator(a.basis_, a.matrix_ - b.matrix_);
    }
    friend HermitianOperator operator*(double c, const HermitianOperator& a) {
        return HermitianOperator(a.basis_, c * a.matrix_);
    }

    /// Symmetrized product (AB + BA)/2; equals AB when the two commute.
    friend HermitianOperator symmetric_product(const HermitianOperator& a, const HermitianOperator& b) {
        a.check_operator(b);
        Eigen::MatrixXd ab = a.matrix_ * b.matrix_;
        return HermitianOperator(a.basis_, 0.5 * (ab + ab.transpose()));
    }

    void check_state(const QuantumState& psi) const {
        if (!(psi.basis() == *basis_)) throw ValidationError("state and operator live in different sectors");
    }

private:
    void check_operator(const HermitianOperator& other) const {
        if (!(other.basis() == *basis_)) throw ValidationError("operators live in different sectors");
    }

    struct Cache {
        std::once_flag once;
        Eigendecomposition result;
    };

    BasisPtr basis_;
    Eigen::MatrixXd matrix_;
    std::shared_ptr<Cache> cache_;
};

/// Frobenius norm of [A, B].
inline double commutator_norm(const HermitianOperator& a, const HermitianOperator& b) {
    const Eigen::MatrixXd ab = a.matrix() * b.matrix();
    return (ab - ab.transpose()).norm();
}

/// One term c * (product of ladder operators) of a second-quantized operator.
struct LadderTerm {
    double coefficient;
    std::vector<Ladder> ops;
};

/// Matrix of sum_t c_t * ops_t in the basis, symmetrized (the caller is
/// responsible for supplying a Hermitian combination of terms).
inline HermitianOperator build_operator(const BasisPtr& basis, std::span<const LadderTerm> terms) {
    const auto d = static_cast<Eigen::Index>(basis->size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t col = 0; col < basis->size(); ++col) {
        for (const auto& term : terms) {
            auto hit = apply_ladders(basis->state(col), term.ops);
            if (!hit) continue;
            const auto row = basis->index_of(hit->first);
            m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += term.coefficient * hit->second;
        }
    }
    return HermitianOperator(basis, 0.5 * (m + m.transpose()));
}

/// a_to^dagger a_from + a_from^dagger a_to.
inline Eigen::MatrixXd hop_pair_matrix(const FockBasis& basis, Site a, Site b) {
    const auto d = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (const auto& e : matrix_element_hop(basis, a, b))
        m(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) += e.value;
    for (const auto& e : matrix_element_hop(basis, b, a))
        m(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) += e.value;
    return m;
}

/// Diagonal operator with entries f(state).
template <class F>
HermitianOperator diagonal_operator(const BasisPtr& basis, F&& f) {
    Eigen::VectorXd diag(static_cast<Eigen::Index>(basis->size()));
    for (std::size_t k = 0; k < basis->size(); ++k) diag(static_cast<Eigen::Index>(k)) = f(basis->state(k));
    return HermitianOperator(basis, diag.asDiagonal().toDenseMatrix());
}

inline HermitianOperator number_operator(const BasisPtr& basis, Site site) {
    return diagonal_operator(basis, [site](const FockState& s) { return static_cast<double>(s[site]); });
}

}  // namespace noon
