#pragma once
// Copyright (c) 2026 the qconc authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "qconc/matrix.hpp"

namespace qconc {

namespace detail {

// Two-sided complex Jacobi rotation parameters for the Hermitian 2x2 block
// [[app, g],[conj(g), aqq]] with g = |g| e^{i phi}. The rotation
// R = [[c, s],[-s e^{-i phi}, c e^{-i phi}]] diagonalizes the block.
struct JacobiRotation {
    double c;
    double s;
    Complex phase; // e^{i phi}
};

inline JacobiRotation make_rotation(double app, double aqq, Complex g) {
    const double absg = std::abs(g);
    const Complex phase = g / absg;
    const double tau = (aqq - app) / (2.0 * absg);
    const double t = std::copysign(1.0, tau) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    return {c, t * c, phase};
}

inline std::vector<std::size_t> descending_order(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
    return idx;
}

/// Eigenvalues only (descending) of a Hermitian matrix; same Jacobi core as
/// eigh but skips the basis accumulation, with a closed form for n <= 2.
/// Hot-path helper: callers pass Gram matrices, so hermiticity is assumed,
/// not checked.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h) {
    const std::size_t n = h.rows();
    if (n == 1) return {h(0, 0).real()};
    if (n == 2) {
        const double a = h(0, 0).real();
        const double c = h(1, 1).real();
        const double mid = 0.5 * (a + c);
        const double r = std::hypot(0.5 * (a - c), std::abs(h(0, 1)));
        return {mid + r, mid - r};
    }
    ComplexMatrix m(n, n);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            m(i, j) = 0.5 * (h(i, j) + std::conj(h(j, i)));
            scale += std::norm(m(i, j));
        }
    scale = std::sqrt(scale);
    std::vector<double> evals(n, 0.0);
    if (scale == 0.0) return evals;
    const double off_tol = 1e-15 * scale;
    const std::size_t max_sweeps = 100 * n;
    bool converged = false;
    for (std::size_t sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t r = p + 1; r < n; ++r) {
                const Complex mpr = m(p, r);
                if (std::abs(mpr) <= off_tol) continue;
                rotated = true;
                const auto rot = make_rotation(m(p, p).real(), m(r, r).real(), mpr);
                const Complex pc = std::conj(rot.phase);
                for (std::size_t j = 0; j < n; ++j) {
                    const Complex xp = m(p, j), xr = m(r, j);
                    m(p, j) = rot.c * xp - rot.s * rot.phase * xr;
                    m(r, j) = rot.s * xp + rot.c * rot.phase * xr;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const Complex xp = m(i, p), xr = m(i, r);
                    m(i, p) = rot.c * xp - rot.s * pc * xr;
                    m(i, r) = rot.s * xp + rot.c * pc * xr;
                }
                m(p, r) = m(r, p) = 0.0;
            }
        if (!rotated) converged = true;
    }
    if (!converged)
        throw NumericalFailureError("hermitian_eigenvalues: Jacobi sweeps did not converge");
    for (std::size_t i = 0; i < n; ++i) evals[i] = m(i, i).real();
    std::sort(evals.rbegin(), evals.rend());
    return evals;
}

} // namespace detail

struct EighResult {
    std::vector<double> eigenvalues; // descending; ties keep original order
    ComplexMatrix eigenvectors;      // unitary; H = Q diag(e) Q†
};

/// Spectral decomposition of a Hermitian matrix by cyclic complex Jacobi
/// sweeps. Rejects inputs whose hermiticity defect exceeds hermiticity_tol
/// (relative to max(1, ||H||_F)) and works on the Hermitian average, so tiny
/// asymmetries from upstream arithmetic never leak into the result.
inline EighResult eigh(const ComplexMatrix& h, double hermiticity_tol = tolerance::kEquality) {
    if (!h.is_square()) throw InvalidInputError("eigh: matrix must be square");
    const std::size_t n = h.rows();
    const double scale = h.frobenius_norm();
    if (hermiticity_defect(h) > hermiticity_tol * std::max(1.0, scale))
        throw InvalidInputError("eigh: matrix is not Hermitian within tolerance");

    ComplexMatrix q = ComplexMatrix::identity(n);
    if (scale == 0.0) return {std::vector<double>(n, 0.0), std::move(q)};

    ComplexMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a(i, j) = 0.5 * (h(i, j) + std::conj(h(j, i)));

    const double off_tol = 1e-15 * scale;
    const std::size_t max_sweeps = 100 * n;
    bool converged = (n == 1);
    for (std::size_t sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t r = p + 1; r < n; ++r) {
                const Complex apr = a(p, r);
                if (std::abs(apr) <= off_tol) continue;
                rotated = true;
                const auto rot =
                    detail::make_rotation(a(p, p).real(), a(r, r).real(), apr);
                const Complex pc = std::conj(rot.phase); // e^{-i phi}
                // rows p, r of A  (A <- R† A)
                for (std::size_t j = 0; j < n; ++j) {
                    const Complex xp = a(p, j), xr = a(r, j);
                    a(p, j) = rot.c * xp - rot.s * rot.phase * xr;
                    a(r, j) = rot.s * xp + rot.c * rot.phase * xr;
                }
                // columns p, r of A  (A <- A R)
                for (std::size_t i = 0; i < n; ++i) {
                    const Complex xp = a(i, p), xr = a(i, r);
                    a(i, p) = rot.c * xp - rot.s * pc * xr;
                    a(i, r) = rot.s * xp + rot.c * pc * xr;
                }
                a(p, r) = a(r, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(r, r) = a(r, r).real();
                // accumulate Q <- Q R
                for (std::size_t i = 0; i < n; ++i) {
                    const Complex xp = q(i, p), xr = q(i, r);
                    q(i, p) = rot.c * xp - rot.s * pc * xr;
                    q(i, r) = rot.s * xp + rot.c * pc * xr;
                }
            }
        }
        if (!rotated) converged = true;
    }
    if (!converged)
        throw NumericalFailureError("eigh: Jacobi sweeps did not converge within "
                                    + std::to_string(max_sweeps) + " sweeps");

    std::vector<double> evals(n);
    for (std::size_t i = 0; i < n; ++i) evals[i] = a(i, i).real();
    const auto order = detail::descending_order(evals);
    std::vector<double> sorted(n);
    ComplexMatrix qs(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        sorted[j] = evals[order[j]];
        for (std::size_t i = 0; i < n; ++i) qs(i, j) = q(i, order[j]);
    }
    return {std::move(sorted), std::move(qs)};
}

/// Unitary n x n extension of an isometry: the first k columns of the result
/// equal v exactly, the rest are filled greedily from the canonical basis by
/// twice-reorthogonalized Gram-Schmidt.
inline ComplexMatrix complete_isometry(const ComplexMatrix& v) {
    const std::size_t n = v.rows();
    const std::size_t k = v.cols();
    if (k > n) throw InvalidInputError("complete_isometry: more columns than rows");
    // orthonormality of the input, entrywise on V†V - I
    for (std::size_t p = 0; p < k; ++p)
        for (std::size_t r = p; r < k; ++r) {
            Complex dot{};
            for (std::size_t i = 0; i < n; ++i) dot += std::conj(v(i, p)) * v(i, r);
            if (p == r) dot -= 1.0;
            if (std::abs(dot) > 1e-10)
                throw InvalidInputError("complete_isometry: columns are not orthonormal");
        }

    ComplexMatrix u(n, n);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < n; ++i) u(i, j) = v(i, j);

    std::vector<Complex> work(n);
    for (std::size_t filled = k; filled < n; ++filled) {
        double best_norm = -1.0;
        std::vector<Complex> best(n);
        for (std::size_t cand = 0; cand < n; ++cand) {
            std::fill(work.begin(), work.end(), Complex{});
            work[cand] = 1.0;
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t j = 0; j < filled; ++j) {
                    Complex dot{};
                    for (std::size_t i = 0; i < n; ++i) dot += std::conj(u(i, j)) * work[i];
                    for (std::size_t i = 0; i < n; ++i) work[i] -= dot * u(i, j);
                }
            }
            double norm2 = 0.0;
            for (const Complex& z : work) norm2 += std::norm(z);
            if (norm2 > best_norm) {
                best_norm = norm2;
                best = work;
            }
        }
        if (best_norm <= 1e-12)
            throw NumericalFailureError("complete_isometry: no independent direction found");
        const double inv = 1.0 / std::sqrt(best_norm);
        for (std::size_t i = 0; i < n; ++i) u(i, filled) = best[i] * inv;
    }
    return u;
}

struct SvdResult {
    ComplexMatrix u;                    // rows x k, orthonormal columns
    std::vector<double> singular_values; // length k = min(rows, cols), descending
    ComplexMatrix v;                    // cols x k, orthonormal columns; M = U diag(S) V†
};

/// Singular value decomposition by one-sided complex Jacobi: column pairs of
/// the working copy are rotated until mutually orthogonal, the accumulated
/// rotations give V and the normalized columns give U. Singular values are
/// nonnegative with all phases absorbed into U. Columns whose singular value
/// underflows (rank deficiency) are replaced by an orthonormal completion, so
/// U always has orthonormal columns.
inline SvdResult svd(const ComplexMatrix& m) {
    if (m.frobenius_norm() == 0.0) throw InvalidInputError("svd: zero matrix");
    if (m.rows() < m.cols()) {
        SvdResult r = svd(m.adjoint());
        return {std::move(r.v), std::move(r.singular_values), std::move(r.u)};
    }
    const std::size_t rows = m.rows();
    const std::size_t n = m.cols();
    ComplexMatrix a = m;
    ComplexMatrix v = ComplexMatrix::identity(n);

    const double conv = 1e-14; // relative column-orthogonality target
    const std::size_t max_sweeps = 100 * n;
    bool converged = (n == 1);
    for (std::size_t sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t r = p + 1; r < n; ++r) {
                double alpha = 0.0, beta = 0.0;
                Complex gamma{};
                for (std::size_t i = 0; i < rows; ++i) {
                    alpha += std::norm(a(i, p));
                    beta += std::norm(a(i, r));
                    gamma += std::conj(a(i, p)) * a(i, r);
                }
                if (alpha == 0.0 || beta == 0.0) continue;
                if (std::norm(gamma) <= conv * conv * alpha * beta) continue;
                rotated = true;
                const auto rot = detail::make_rotation(alpha, beta, gamma);
                const Complex pc = std::conj(rot.phase);
                for (std::size_t i = 0; i < rows; ++i) {
                    const Complex xp = a(i, p), xr = a(i, r);
                    a(i, p) = rot.c * xp - rot.s * pc * xr;
                    a(i, r) = rot.s * xp + rot.c * pc * xr;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const Complex xp = v(i, p), xr = v(i, r);
                    v(i, p) = rot.c * xp - rot.s * pc * xr;
                    v(i, r) = rot.s * xp + rot.c * pc * xr;
                }
            }
        }
        if (!rotated) converged = true;
    }
    if (!converged)
        throw NumericalFailureError("svd: Jacobi sweeps did not converge within "
                                    + std::to_string(max_sweeps) + " sweeps");

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) {
        double norm2 = 0.0;
        for (std::size_t i = 0; i < rows; ++i) norm2 += std::norm(a(i, j));
        sigma[j] = std::sqrt(norm2);
    }
    const auto order = detail::descending_order(sigma);
    std::vector<double> s(n);
    ComplexMatrix u(rows, n);
    ComplexMatrix vs(n, n);
    const double sigma_floor = sigma[order[0]] * 1e-13;
    std::size_t good = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        s[j] = sigma[src];
        for (std::size_t i = 0; i < n; ++i) vs(i, j) = v(i, src);
        if (s[j] > sigma_floor) {
            const double inv = 1.0 / s[j];
            for (std::size_t i = 0; i < rows; ++i) u(i, j) = a(i, src) * inv;
            ++good;
        }
    }
    if (good < n) {
        // fill the rank-deficient tail with an orthonormal completion
        ComplexMatrix head(rows, std::max<std::size_t>(good, 1));
        if (good == 0) throw NumericalFailureError("svd: lost all column norms");
        for (std::size_t j = 0; j < good; ++j)
            for (std::size_t i = 0; i < rows; ++i) head(i, j) = u(i, j);
        const ComplexMatrix full = complete_isometry(head);
        for (std::size_t j = good; j < n; ++j)
            for (std::size_t i = 0; i < rows; ++i) u(i, j) = full(i, j);
    }
    return {std::move(u), std::move(s), std::move(vs)};
}

/// Unitary factor of the polar decomposition M = Q H (H PSD). For a
/// rank-deficient M the completion inside svd fixes the free directions.
inline ComplexMatrix polar_unitary(const ComplexMatrix& m) {
    const SvdResult f = svd(m);
    return f.u * f.v.adjoint();
}

/// Hermitian PSD square root via eigh. Eigenvalues in [-clamp_tol, 0) are
/// clamped to zero; anything more negative is an error.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& h, double clamp_tol = tolerance::kEquality) {
    EighResult e = eigh(h);
    const std::size_t n = h.rows();
    std::vector<double> root(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (e.eigenvalues[i] < -clamp_tol)
            throw InvalidInputError("psd_sqrt: matrix has a negative eigenvalue beyond tolerance");
        root[i] = std::sqrt(std::max(e.eigenvalues[i], 0.0));
    }
    return e.eigenvectors * ComplexMatrix::diagonal(root) * e.eigenvectors.adjoint();
}

/// Hermitian inverse square root; eigenvalues must exceed min_eigenvalue.
inline ComplexMatrix psd_inv_sqrt(const ComplexMatrix& h, double min_eigenvalue = 1e-12) {
    EighResult e = eigh(h);
    const std::size_t n = h.rows();
    std::vector<double> root(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (e.eigenvalues[i] <= min_eigenvalue)
            throw RankDeficiencyError("psd_inv_sqrt: eigenvalue at or below "
                                      + std::to_string(min_eigenvalue));
        root[i] = 1.0 / std::sqrt(e.eigenvalues[i]);
    }
    return e.eigenvectors * ComplexMatrix::diagonal(root) * e.eigenvectors.adjoint();
}

} // namespace qconc
