#pragma once
// Copyright (c) 2026 the qconc authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qconc/linalg.hpp"
#include "qconc/matrix.hpp"
#include "qconc/random.hpp"
#include "qconc/state.hpp"

namespace qconc {

/// One branch of a generalized measurement on a single party: a square Kraus
/// operator K with K†K <= I (largest eigenvalue of K†K at most 1 + tol).
class LocalOperation {
public:
    LocalOperation(Party party, ComplexMatrix kraus, double tol = tolerance::kEquality)
        : party_(party), kraus_(std::move(kraus)) {
        if (!kraus_.is_square())
            throw InvalidInputError("local operation: Kraus operator must be square");
        const double top = detail::hermitian_eigenvalues(kraus_.adjoint() * kraus_).front();
        if (top > 1.0 + tol)
            throw InvalidInputError("local operation violates the contraction bound: "
                                    "largest eigenvalue of K†K is " + std::to_string(top));
    }

    static LocalOperation identity(Party party, std::size_t dim) {
        return LocalOperation(party, ComplexMatrix::identity(dim));
    }

    Party party() const { return party_; }
    std::size_t dim() const { return kraus_.rows(); }
    const ComplexMatrix& kraus() const { return kraus_; }

private:
    Party party_;
    ComplexMatrix kraus_;
};

/// True iff sum_k K_k† K_k <= I within tol (a physical measurement family).
inline bool is_valid_instrument(std::span<const LocalOperation> ops,
                                double tol = tolerance::kEquality) {
    if (ops.empty()) return false;
    const std::size_t d = ops.front().dim();
    ComplexMatrix total(d, d);
    for (const LocalOperation& op : ops) {
        if (op.dim() != d) throw InvalidInputError("instrument: mixed dimensions");
        total += op.kraus().adjoint() * op.kraus();
    }
    return eigh(total).eigenvalues.front() <= 1.0 + tol;
}

/// True iff sum_k K_k† K_k = I within tol (measurement with no discarded branch).
inline bool is_complete_instrument(std::span<const LocalOperation> ops,
                                   double tol = tolerance::kEquality) {
    if (ops.empty()) return false;
    const std::size_t d = ops.front().dim();
    ComplexMatrix total(d, d);
    for (const LocalOperation& op : ops) {
        if (op.dim() != d) throw InvalidInputError("instrument: mixed dimensions");
        total += op.kraus().adjoint() * op.kraus();
    }
    return frobenius_distance(total, ComplexMatrix::identity(d)) <= tol;
}

struct ApplyResult {
    PureBipartiteState state; // renormalized branch
    double probability;      // squared norm of the unnormalized image
};

namespace detail {
inline ApplyResult renormalize_branch(const ComplexMatrix& image) {
    const double p = image.frobenius_norm();
    if (p * p < 1e-12)
        throw AnnihilationError("operation annihilates the state (branch probability "
                                + std::to_string(p * p) + ")");
    return {PureBipartiteState(image * (1.0 / p)), p * p};
}
} // namespace detail

/// Applies one Kraus branch on each side: coeff -> A coeff B^T, returning the
/// renormalized branch and its probability |A ⊗ B |s>|^2.
inline ApplyResult apply_pair(const PureBipartiteState& s, const LocalOperation& alice,
                              const LocalOperation& bob) {
    if (alice.party() != Party::Alice || bob.party() != Party::Bob)
        throw InvalidInputError("apply_pair: operations must be tagged (Alice, Bob)");
    if (alice.dim() != s.dim_a() || bob.dim() != s.dim_b())
        throw InvalidInputError("apply_pair: operator dimensions do not match the state");
    return detail::renormalize_branch(alice.kraus() * s.coeff() * bob.kraus().transpose());
}

/// Single-sided convenience: the other party acts with the identity.
inline ApplyResult apply_local(const PureBipartiteState& s, const LocalOperation& op) {
    if (op.party() == Party::Alice) {
        if (op.dim() != s.dim_a()) throw InvalidInputError("apply_local: dimension mismatch");
        return detail::renormalize_branch(op.kraus() * s.coeff());
    }
    if (op.dim() != s.dim_b()) throw InvalidInputError("apply_local: dimension mismatch");
    return detail::renormalize_branch(s.coeff() * op.kraus().transpose());
}

/// Unitary realization of a Kraus operator on system ⊗ probe. With the probe
/// prepared in |P_0>,
///   U (|psi>|P_0>) = (K|psi>)|P_1> + (sqrt(I - K†K)|psi>)|P_0>,
/// so measuring the probe and keeping outcome 1 applies K with the Born
/// probability. Composite index convention: |i>_sys |P_p> -> i * probe_dim + p.
class ProbeDilation {
public:
    ProbeDilation(std::size_t system_dim, std::size_t probe_dim, ComplexMatrix unitary,
                  std::size_t success_outcome)
        : system_dim_(system_dim), probe_dim_(probe_dim), unitary_(std::move(unitary)),
          success_outcome_(success_outcome) {
        if (probe_dim_ < 2) throw InvalidInputError("probe dimension must be at least 2");
        if (success_outcome_ >= probe_dim_)
            throw InvalidInputError("success outcome must be a valid probe index");
        if (unitary_.rows() != system_dim_ * probe_dim_ || !unitary_.is_square())
            throw InvalidInputError("dilation unitary has wrong dimensions");
        if (unitarity_defect(unitary_) > tolerance::kEquality)
            throw InvalidInputError("dilation matrix is not unitary within tolerance");
    }

    std::size_t system_dim() const { return system_dim_; }
    std::size_t probe_dim() const { return probe_dim_; }
    std::size_t success_outcome() const { return success_outcome_; }
    const ComplexMatrix& unitary() const { return unitary_; }

    /// System-space block mapping a probe-|P_0> input to probe outcome j:
    /// (M_j)_{ki} = U[(k, j), (i, 0)]. M_{success} is the dilated Kraus
    /// operator, M_0 its defect branch.
    ComplexMatrix branch_operator(std::size_t outcome) const {
        if (outcome >= probe_dim_) throw InvalidInputError("branch_operator: bad outcome");
        ComplexMatrix m(system_dim_, system_dim_);
        for (std::size_t k = 0; k < system_dim_; ++k)
            for (std::size_t i = 0; i < system_dim_; ++i)
                m(k, i) = unitary_(k * probe_dim_ + outcome, i * probe_dim_);
        return m;
    }

private:
    std::size_t system_dim_;
    std::size_t probe_dim_;
    ComplexMatrix unitary_;
    std::size_t success_outcome_;
};

/// Builds the probe dilation of a Kraus operator. The defect square root
/// sqrt(I - K†K) comes from eigh with eigenvalues in [-1e-9, 0) clamped to
/// zero; the isometry on the probe-|P_0> input block is completed to a full
/// unitary, and the success branch is tagged as probe outcome 1.
inline ProbeDilation dilate(const LocalOperation& op, std::size_t probe_dim = 2) {
    if (probe_dim < 2) throw InvalidInputError("dilate: probe dimension must be at least 2");
    ComplexMatrix k = op.kraus();
    const std::size_t n = k.rows();
    // a top singular value a rounding error above 1 would leave I - K†K
    // indefinite; shave it back inside the physical cone
    const double top = detail::hermitian_eigenvalues(k.adjoint() * k).front();
    if (top > 1.0) k *= 1.0 / std::sqrt(top);
    ComplexMatrix defect = ComplexMatrix::identity(n) - k.adjoint() * k;
    const ComplexMatrix d = psd_sqrt(defect, tolerance::kEquality);

    ComplexMatrix w(n * probe_dim, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            w(i * probe_dim + 0, j) = d(i, j);
            w(i * probe_dim + 1, j) = k(i, j);
        }
    const ComplexMatrix base = complete_isometry(w);

    // Route inputs: (i, P_0) columns carry the isometry, the completion fills
    // the remaining probe sectors in order.
    const std::size_t total = n * probe_dim;
    ComplexMatrix u(total, total);
    std::size_t spare = n;
    for (std::size_t col = 0; col < total; ++col) {
        const std::size_t src = (col % probe_dim == 0) ? col / probe_dim : spare++;
        for (std::size_t row = 0; row < total; ++row) u(row, col) = base(row, src);
    }
    return ProbeDilation(n, probe_dim, std::move(u), 1);
}

/// Analytic probe-outcome weights of a dilation applied to (Alice side of) a
/// state prepared with the probe in |P_0>.
inline std::vector<double> branch_weights(const ProbeDilation& d, const PureBipartiteState& s) {
    if (d.system_dim() != s.dim_a())
        throw InvalidInputError("branch_weights: dilation does not match the state");
    std::vector<double> w(d.probe_dim());
    for (std::size_t j = 0; j < d.probe_dim(); ++j) {
        const double norm = (d.branch_operator(j) * s.coeff()).frobenius_norm();
        w[j] = norm * norm;
    }
    return w;
}

struct MeasurementOutcome {
    std::size_t outcome;
    PureBipartiteState post_state;
};

/// Runs the dilation on Alice's side of the state and measures the probe.
/// The outcome is sampled from the Born weights of the probe branches;
/// deterministic per seed.
inline MeasurementOutcome simulate_measurement(const ProbeDilation& d,
                                               const PureBipartiteState& s,
                                               std::uint64_t seed) {
    std::vector<double> weights = branch_weights(d, s);
    for (double& w : weights)
        if (w < 1e-14) w = 0.0; // a branch this faint has no renormalizable state
    Rng rng(seed);
    const std::size_t outcome = rng.sample_discrete(weights);
    const ComplexMatrix image = d.branch_operator(outcome) * s.coeff();
    return {outcome, PureBipartiteState::normalized(image)};
}

struct SideTransfer {
    LocalOperation alice_equivalent; // contraction acting on Alice's side
    ComplexMatrix bob_unitary_fix;   // unitary Bob applies afterwards
    double scale;                    // subnormalization: result = (image of b) / scale
};

/// Moves a Bob-side operation across a full-Schmidt-rank state: returns an
/// Alice-side contraction A and a Bob unitary V with
///   (I ⊗ V)(A ⊗ I)|s> = (1/scale) (I ⊗ b)|s>.
/// A is rescaled to respect the contraction bound whenever the raw transfer
/// would exceed it; the factor is reported through `scale`. For a unitary b
/// on |Phi_N> this reduces to A = b^T with V = I and scale 1.
inline SideTransfer transfer_to_alice_side(const PureBipartiteState& s,
                                           const LocalOperation& b) {
    if (b.party() != Party::Bob)
        throw InvalidInputError("transfer_to_alice_side: operation must act on Bob's side");
    if (s.dim_a() != s.dim_b())
        throw InvalidInputError("transfer_to_alice_side: state must live on an N x N space");
    if (b.dim() != s.dim_b()) throw InvalidInputError("transfer_to_alice_side: dimension mismatch");

    const SvdResult base = svd(s.coeff());
    if (base.singular_values.back() * base.singular_values.back() <= tolerance::kEquality)
        throw RankDeficiencyError("transfer_to_alice_side: state is not full Schmidt rank");

    const ComplexMatrix image = s.coeff() * b.kraus().transpose();
    const double image_norm = image.frobenius_norm();
    if (image_norm * image_norm < 1e-12)
        throw AnnihilationError("transfer_to_alice_side: operation annihilates the state");
    SvdResult moved = svd(image);

    const std::size_t n = s.dim_a();
    // Degenerate singular values leave the svd factors a free rotation per
    // block; align the moved right factor with the base one (Procrustes per
    // block) so the construction is canonical. A unitary b on a maximally
    // entangled state then comes out as exactly b^T with an identity fix.
    const double block_tol = 1e-10 * moved.singular_values.front();
    std::size_t start = 0;
    while (start < n) {
        std::size_t stop = start + 1;
        while (stop < n
               && moved.singular_values[stop - 1] - moved.singular_values[stop] <= block_tol)
            ++stop;
        const std::size_t width = stop - start;
        if (width > 1) {
            ComplexMatrix overlap(width, width);
            for (std::size_t i = 0; i < width; ++i)
                for (std::size_t j = 0; j < width; ++j) {
                    Complex dot{};
                    for (std::size_t r = 0; r < n; ++r)
                        dot += std::conj(moved.v(r, start + i)) * base.v(r, start + j);
                    overlap(i, j) = dot;
                }
            const ComplexMatrix q = polar_unitary(overlap);
            auto rotate_block = [&](ComplexMatrix& m) {
                ComplexMatrix rotated(m.rows(), width);
                for (std::size_t r = 0; r < m.rows(); ++r)
                    for (std::size_t j = 0; j < width; ++j) {
                        Complex acc{};
                        for (std::size_t i = 0; i < width; ++i)
                            acc += m(r, start + i) * q(i, j);
                        rotated(r, j) = acc;
                    }
                for (std::size_t r = 0; r < m.rows(); ++r)
                    for (std::size_t j = 0; j < width; ++j) m(r, start + j) = rotated(r, j);
            };
            rotate_block(moved.u);
            rotate_block(moved.v);
        }
        start = stop;
    }

    // A U Sigma = U' Sigma'  =>  A = U' diag(sigma'_i / sigma_i) U†
    ComplexMatrix ratio(n, n);
    double top_ratio = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = moved.singular_values[i] / base.singular_values[i];
        ratio(i, i) = r;
        top_ratio = std::max(top_ratio, r);
    }
    const double scale = std::max(top_ratio, 1.0);
    const ComplexMatrix a = moved.u * ratio * base.u.adjoint() * (1.0 / scale);
    // W^T V^T = W'^T with W = conj(V_svd): V = W' W† (unitary)
    const ComplexMatrix fix = moved.v.conjugate() * base.v.transpose();
    return {LocalOperation(Party::Alice, a), fix, scale};
}

/// Gaussian Kraus operator rescaled so its top singular value is exactly 1:
/// as aggressive as the contraction bound allows.
inline LocalOperation random_kraus(Party party, std::size_t dim, Rng& rng) {
    const ComplexMatrix g = random_gaussian_matrix(dim, dim, rng);
    const double top = detail::hermitian_eigenvalues(g.adjoint() * g).front();
    if (top <= 0.0) return LocalOperation::identity(party, dim);
    return LocalOperation(party, g * (1.0 / std::sqrt(top)));
}

} // namespace qconc
