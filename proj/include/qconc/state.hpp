#pragma once
// Copyright (c) 2026 the qconc authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qconc/linalg.hpp"
#include "qconc/matrix.hpp"
#include "qconc/random.hpp"

namespace qconc {

enum class Party { Alice, Bob };

inline const char* to_string(Party p) { return p == Party::Alice ? "Alice" : "Bob"; }

/// Pure state on an m x n bipartite space, held as its coefficient matrix:
/// |psi> = sum_ij coeff[i,j] |i>_A |j>_B. A local pair (A on Alice, B on Bob)
/// maps coeff to A * coeff * B^T, which turns every protocol identity in this
/// library into plain matrix algebra. Normalized to unit Frobenius norm.
class PureBipartiteState {
public:
    explicit PureBipartiteState(ComplexMatrix coeff, double tol = tolerance::kEquality)
        : coeff_(std::move(coeff)) {
        const double norm = coeff_.frobenius_norm();
        if (std::abs(norm - 1.0) > tol)
            throw InvalidInputError("state coefficient matrix has norm " + std::to_string(norm)
                                    + ", expected 1");
    }

    /// Rescales an arbitrary nonzero coefficient matrix to a valid state.
    static PureBipartiteState normalized(const ComplexMatrix& coeff) {
        const double norm = coeff.frobenius_norm();
        if (norm < 1e-12) throw AnnihilationError("cannot normalize a (near-)zero state vector");
        return PureBipartiteState(coeff * (1.0 / norm));
    }

    std::size_t dim_a() const { return coeff_.rows(); }
    std::size_t dim_b() const { return coeff_.cols(); }
    const ComplexMatrix& coeff() const { return coeff_; }

private:
    ComplexMatrix coeff_;
};

/// Schmidt data of a bipartite pure state: descending coefficients lambda
/// summing to one and the two local basis changes. The right factor is stored
/// conjugated so the reconstruction reads
///   coeff = left_unitary * diag(sqrt(lambda)) * right_unitary^T
/// and the Schmidt kets of both parties are simply the matrix columns.
struct SchmidtForm {
    std::vector<double> coeffs;
    ComplexMatrix left_unitary;
    ComplexMatrix right_unitary;

    /// Number of coefficients above threshold (relative to the largest).
    std::size_t rank(double rel_tol = tolerance::kEquality) const {
        if (coeffs.empty()) return 0;
        const double cut = coeffs.front() * rel_tol;
        std::size_t r = 0;
        for (double l : coeffs)
            if (l > cut) ++r;
        return r;
    }

    bool full_rank(double abs_tol = tolerance::kEquality) const {
        return !coeffs.empty() && coeffs.back() > abs_tol;
    }
};

/// Hermitian, positive semidefinite, unit-trace operator. Validated on
/// construction (spectrum bounded below by -tol, trace within tol of one).
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix matrix, double tol = tolerance::kEquality)
        : matrix_(std::move(matrix)) {
        if (!matrix_.is_square()) throw InvalidInputError("density matrix must be square");
        if (hermiticity_defect(matrix_) > tol)
            throw InvalidInputError("density matrix is not Hermitian within tolerance");
        if (std::abs(matrix_.trace().real() - 1.0) > tol
            || std::abs(matrix_.trace().imag()) > tol)
            throw InvalidInputError("density matrix trace differs from 1");
        const EighResult e = eigh(matrix_, tol);
        if (e.eigenvalues.back() < -tol)
            throw InvalidInputError("density matrix has a negative eigenvalue: "
                                    + std::to_string(e.eigenvalues.back()));
        eigenvalues_ = e.eigenvalues;
    }

    std::size_t dim() const { return matrix_.rows(); }
    const ComplexMatrix& matrix() const { return matrix_; }

    /// Spectrum, descending (cached from validation).
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }

    std::size_t rank(double tol = tolerance::kEquality) const {
        std::size_t r = 0;
        for (double e : eigenvalues_)
            if (e > tol) ++r;
        return r;
    }

private:
    ComplexMatrix matrix_;
    std::vector<double> eigenvalues_;
};

/// Schmidt decomposition; lambda are the squared singular values of the
/// coefficient matrix. Both basis changes are completed to full unitaries,
/// so rank-deficient states decompose too.
inline SchmidtForm schmidt_decompose(const PureBipartiteState& s) {
    SvdResult f = svd(s.coeff());
    std::vector<double> lambda(f.singular_values.size());
    for (std::size_t i = 0; i < lambda.size(); ++i)
        lambda[i] = f.singular_values[i] * f.singular_values[i];
    ComplexMatrix left = f.u.is_square() ? std::move(f.u) : complete_isometry(f.u);
    ComplexMatrix w = f.v.conjugate(); // coeff = U diag(s) V† = U diag(s) W^T
    ComplexMatrix right = w.is_square() ? std::move(w) : complete_isometry(w);
    return {std::move(lambda), std::move(left), std::move(right)};
}

/// coeff rebuilt from a SchmidtForm (left * rect_diag(sqrt(lambda)) * right^T).
inline ComplexMatrix schmidt_reconstruct(const SchmidtForm& f) {
    std::vector<double> roots(f.coeffs.size());
    for (std::size_t i = 0; i < roots.size(); ++i) roots[i] = std::sqrt(f.coeffs[i]);
    const ComplexMatrix mid = ComplexMatrix::rect_diagonal(f.left_unitary.cols(),
                                                           f.right_unitary.cols(), roots);
    return f.left_unitary * mid * f.right_unitary.transpose();
}

/// Schmidt coefficients only (no basis factors); cheaper than a full
/// decomposition on hot paths.
inline std::vector<double> schmidt_coefficients(const PureBipartiteState& s) {
    const ComplexMatrix& c = s.coeff();
    const bool a_side = c.rows() <= c.cols();
    const ComplexMatrix gram = a_side ? c * c.adjoint() : c.adjoint() * c;
    std::vector<double> lambda = detail::hermitian_eigenvalues(gram);
    for (double& l : lambda) l = std::max(l, 0.0);
    return lambda;
}

/// Reduced state of one party; Alice's is coeff * coeff†, Bob's is the
/// partial trace over Alice. The two share their nonzero spectrum.
inline DensityMatrix marginal(const PureBipartiteState& s, Party party) {
    const ComplexMatrix& c = s.coeff();
    if (party == Party::Alice) return DensityMatrix(c * c.adjoint());
    return DensityMatrix(c.transpose() * c.conjugate());
}

/// |Phi_N> with coefficient matrix I_N / sqrt(N).
inline PureBipartiteState max_entangled(std::size_t n) {
    if (n < 2) throw InvalidInputError("max_entangled: dimension must be at least 2");
    ComplexMatrix c = ComplexMatrix::identity(n);
    return PureBipartiteState(c * (1.0 / std::sqrt(static_cast<double>(n))));
}

/// True iff every Schmidt coefficient equals 1/N within tol. Local-unitary
/// images of |Phi_N> all pass.
inline bool is_maximally_entangled(const PureBipartiteState& s, double tol) {
    if (s.dim_a() != s.dim_b())
        throw InvalidInputError("is_maximally_entangled: state must live on an N x N space");
    const double target = 1.0 / static_cast<double>(s.dim_a());
    for (double l : schmidt_coefficients(s))
        if (std::abs(l - target) > tol) return false;
    return true;
}

/// Local unitary action (U_A ⊗ U_B)|s>; preserves Schmidt coefficients.
inline PureBipartiteState apply_local_unitaries(const PureBipartiteState& s,
                                                const ComplexMatrix& u_a,
                                                const ComplexMatrix& u_b) {
    if (!is_unitary(u_a, tolerance::kEquality) || !is_unitary(u_b, tolerance::kEquality))
        throw InvalidInputError("apply_local_unitaries: factors must be unitary");
    if (u_a.cols() != s.dim_a() || u_b.cols() != s.dim_b())
        throw InvalidInputError("apply_local_unitaries: dimension mismatch");
    return PureBipartiteState::normalized(u_a * s.coeff() * u_b.transpose());
}

/// Normalized Gaussian-ensemble pure state; deterministic per seed.
inline PureBipartiteState random_pure_state(std::size_t dim_a, std::size_t dim_b,
                                            std::uint64_t seed) {
    Rng rng(seed);
    return PureBipartiteState::normalized(random_gaussian_matrix(dim_a, dim_b, rng));
}

inline ComplexMatrix pure_projector(const PureBipartiteState& s) {
    const ComplexMatrix& c = s.coeff();
    const std::size_t d = c.rows() * c.cols();
    ComplexMatrix rho(d, d);
    for (std::size_t i = 0; i < c.rows(); ++i)
        for (std::size_t j = 0; j < c.cols(); ++j)
            for (std::size_t k = 0; k < c.rows(); ++k)
                for (std::size_t l = 0; l < c.cols(); ++l)
                    rho(i * c.cols() + j, k * c.cols() + l) = c(i, j) * std::conj(c(k, l));
    return rho;
}

/// Werner state p |Phi_2><Phi_2| + (1-p) I/4 on two qubits.
inline DensityMatrix werner_state(double p) {
    if (p < 0.0 || p > 1.0) throw InvalidInputError("werner_state: p must lie in [0, 1]");
    ComplexMatrix rho = pure_projector(max_entangled(2)) * p;
    for (std::size_t i = 0; i < 4; ++i) rho(i, i) += (1.0 - p) * 0.25;
    return DensityMatrix(std::move(rho));
}

namespace detail {

/// Magic basis of two qubits, flattened with index (i, j) -> 2 i + j. Real
/// combinations of these four vectors are exactly the maximally entangled
/// states, so the fully entangled fraction of any two-qubit density operator
/// is the top eigenvalue of Re(M), M_kl = <e_k| rho |e_l>.
inline const std::vector<std::vector<Complex>>& magic_basis() {
    static const double h = 1.0 / std::sqrt(2.0);
    static const Complex ih{0.0, 1.0 / std::sqrt(2.0)};
    static const std::vector<std::vector<Complex>> basis = {
        {h, 0, 0, h},    // (|00> + |11>)/sqrt(2)
        {ih, 0, 0, -ih}, // i(|00> - |11>)/sqrt(2)
        {0, ih, ih, 0},  // i(|01> + |10>)/sqrt(2)
        {0, h, -h, 0},   // (|01> - |10>)/sqrt(2)
    };
    return basis;
}

inline double fef_two_qubit_exact(const ComplexMatrix& rho) {
    const auto& basis = magic_basis();
    ComplexMatrix re_m(4, 4);
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t l = 0; l < 4; ++l) {
            Complex m{};
            for (std::size_t i = 0; i < 4; ++i) {
                Complex row{};
                for (std::size_t j = 0; j < 4; ++j) row += rho(i, j) * basis[l][j];
                m += std::conj(basis[k][i]) * row;
            }
            re_m(k, l) = m.real();
        }
    // symmetrize away rounding, then take the top eigenvalue
    const double top = eigh(re_m, 1e-6).eigenvalues.front();
    return std::clamp(top, 0.0, 1.0);
}

/// Sampled lower bound: max over Haar unitaries W of <psi| rho |psi> with
/// |psi> = vec(W)/sqrt(N). The overlap <Phi|(U_A ⊗ U_B) rho (.)†|Phi>
/// depends on the locals only through W = U_A U_B^T, so one unitary suffices.
inline double fef_sampled(const ComplexMatrix& rho, std::size_t n, std::size_t budget,
                          std::uint64_t seed) {
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    double best = 0.0;
    std::vector<Complex> psi(n * n);
    for (std::size_t trial = 0; trial < std::max<std::size_t>(budget, 1); ++trial) {
        Rng rng(derive_stream(seed, trial));
        const ComplexMatrix w = random_haar_unitary(n, rng);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) psi[i * n + j] = w(i, j) * inv_sqrt_n;
        Complex val{};
        for (std::size_t i = 0; i < psi.size(); ++i) {
            Complex row{};
            for (std::size_t j = 0; j < psi.size(); ++j) row += rho(i, j) * psi[j];
            val += std::conj(psi[i]) * row;
        }
        best = std::max(best, val.real());
    }
    return std::clamp(best, 0.0, 1.0);
}

inline std::size_t bipartite_side_dim(std::size_t dim, const char* who) {
    const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(dim))));
    if (n < 2 || n * n != dim)
        throw InvalidInputError(std::string(who) + ": dimension " + std::to_string(dim)
                                + " is not a perfect bipartite square");
    return n;
}

} // namespace detail

/// Largest overlap of rho with a maximally entangled state. Exact for two
/// qubits via the magic basis; for N >= 3 a sampled lower bound over
/// sample_budget Haar-random local frames (deterministic per seed).
inline double fully_entangled_fraction(const DensityMatrix& rho, std::size_t sample_budget,
                                       std::uint64_t seed) {
    const std::size_t n = detail::bipartite_side_dim(rho.dim(), "fully_entangled_fraction");
    if (n == 2) return detail::fef_two_qubit_exact(rho.matrix());
    return detail::fef_sampled(rho.matrix(), n, sample_budget, seed);
}

/// Entanglement entropy -sum lambda log2 lambda of the Schmidt spectrum, in bits.
inline double entanglement_entropy(const std::vector<double>& lambda) {
    double h = 0.0;
    for (double l : lambda)
        if (l > 0.0) h -= l * std::log2(l);
    return h;
}

} // namespace qconc
