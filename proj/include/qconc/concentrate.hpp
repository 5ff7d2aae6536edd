#pragma once
// Copyright (c) 2026 the qconc authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qconc/kraus.hpp"
#include "qconc/linalg.hpp"
#include "qconc/matrix.hpp"
#include "qconc/state.hpp"

namespace qconc {

/// Best single-shot probability of concentrating s to a maximally entangled
/// state: N times the smallest Schmidt coefficient. Zero iff rank-deficient.
inline double gamma_max(const PureBipartiteState& s) {
    if (s.dim_a() != s.dim_b())
        throw InvalidInputError("gamma_max: state must live on an N x N space");
    const std::vector<double> lambda = schmidt_coefficients(s);
    return static_cast<double>(s.dim_a()) * lambda.back();
}

/// Filter body K = sqrt(e_min) rho^{-1/2} for a full-rank marginal rho on the
/// given side. Its top singular value is exactly 1, the success probability
/// on any state with marginal rho is N e_min, and the surviving branch is
/// maximally entangled. Depending only on the marginal is what lets one
/// filter serve every state that shares it.
inline LocalOperation filter_from_marginal(const DensityMatrix& rho, Party side) {
    const double e_min = rho.eigenvalues().back();
    if (e_min <= tolerance::kEquality)
        throw RankDeficiencyError("filter requires a strictly positive smallest marginal "
                                  "eigenvalue; got " + std::to_string(e_min));
    const ComplexMatrix k = psd_inv_sqrt(rho.matrix(), 0.5 * e_min) * std::sqrt(e_min);
    return LocalOperation(side, k);
}

/// Optimal Alice-side concentration filter of s. Requires full Schmidt rank.
inline LocalOperation build_filter(const PureBipartiteState& s) {
    if (s.dim_a() != s.dim_b())
        throw InvalidInputError("build_filter: state must live on an N x N space");
    return filter_from_marginal(marginal(s, Party::Alice), Party::Alice);
}

struct ConcentrationResult {
    double success_probability;
    PureBipartiteState output_state; // maximally entangled whenever probability > 0
    LocalOperation filter;
};

/// Builds and applies the optimal filter in one step.
inline ConcentrationResult concentrate(const PureBipartiteState& s) {
    LocalOperation filter = build_filter(s);
    ApplyResult r = apply_local(s, filter);
    return {r.probability, std::move(r.state), std::move(filter)};
}

/// Cyclic shift T_k |j> = |(j + k) mod d>.
inline ComplexMatrix shift_operator(std::size_t d, std::size_t k) {
    if (d == 0 || k >= d) throw InvalidInputError("shift_operator: index out of range");
    ComplexMatrix t(d, d);
    for (std::size_t j = 0; j < d; ++j) t((j + k) % d, j) = 1.0;
    return t;
}

/// Selective sign flip S^i |j> = (-1)^{delta_ij} |j>.
inline ComplexMatrix flip_operator(std::size_t d, std::size_t i) {
    if (d == 0 || i >= d) throw InvalidInputError("flip_operator: index out of range");
    ComplexMatrix s = ComplexMatrix::identity(d);
    s(i, i) = -1.0;
    return s;
}

/// A state vector that is allowed to carry norm other than one; produced only
/// by proof-machinery operations that track the subnormalization explicitly.
struct SubnormalizedState {
    ComplexMatrix coeff;
    double norm; // Frobenius norm of coeff
};

/// Applies I ⊗ (I - S^n) T_{(n-k) mod d} to a Schmidt-diagonal state
/// sum_i sqrt(lambda_i) |i>|i>. Exactly one term survives the sign
/// cancellation, leaving amplitude 2 sqrt(lambda_k) on |k>_A |n>_B; the
/// output keeps that subnormalization.
inline SubnormalizedState shift_flip_extract(const PureBipartiteState& s, std::size_t k,
                                             std::size_t n) {
    if (s.dim_a() != s.dim_b())
        throw InvalidInputError("shift_flip_extract: state must live on an N x N space");
    const std::size_t d = s.dim_a();
    if (k >= d || n >= d) throw InvalidInputError("shift_flip_extract: index out of range");
    const ComplexMatrix& c = s.coeff();
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            if (i == j) {
                if (std::abs(c(i, i).imag()) > tolerance::kEquality
                    || c(i, i).real() < -tolerance::kEquality)
                    throw InvalidInputError(
                        "shift_flip_extract: state is not in Schmidt-diagonal form");
            } else if (std::abs(c(i, j)) > tolerance::kEquality) {
                throw InvalidInputError(
                    "shift_flip_extract: state is not in Schmidt-diagonal form");
            }
        }

    const std::size_t m = (n + d - k) % d; // (n - k) mod d
    const ComplexMatrix bob_op =
        (ComplexMatrix::identity(d) - flip_operator(d, n)) * shift_operator(d, m);
    const ComplexMatrix image = c * bob_op.transpose();
    return {image, image.frobenius_norm()};
}

} // namespace qconc
