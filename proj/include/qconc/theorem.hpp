#pragma once
// Copyright (c) 2026 the qconc authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qconc/concentrate.hpp"
#include "qconc/kraus.hpp"
#include "qconc/linalg.hpp"
#include "qconc/matrix.hpp"
#include "qconc/random.hpp"
#include "qconc/state.hpp"

namespace qconc {

/// Output states count as maximally entangled at this tolerance in post-hoc
/// verification of successful concentrations.
inline constexpr double kMaximalityTol = 1e-8;

/// A falsifier trial's first-state image must be maximally entangled within
/// this gate before its overlap with the second image is scored.
inline constexpr double kFalsifierGate = 1e-4;

inline double marginal_distance(const PureBipartiteState& s1, const PureBipartiteState& s2,
                                Party side) {
    return frobenius_distance(marginal(s1, side).matrix(), marginal(s2, side).matrix());
}

/// True iff the two states' same-side marginals coincide within tol
/// (Frobenius distance).
inline bool marginals_equal(const PureBipartiteState& s1, const PureBipartiteState& s2,
                            Party side, double tol) {
    if (s1.dim_a() != s2.dim_a() || s1.dim_b() != s2.dim_b())
        throw InvalidInputError("marginals_equal: states have different dimensions");
    return marginal_distance(s1, s2, side) <= tol;
}

/// Decision plus evidence for a shared-filter concentration attempt.
struct SharedConcentratorVerdict {
    bool concentratable;
    Party side;
    double marginal_distance; // witness when impossible
    std::optional<LocalOperation> filter;

    // post-hoc verification, filled when concentratable
    double probability_1 = 0.0;
    double probability_2 = 0.0;
    bool output_1_maximal = false;
    bool output_2_maximal = false;

    // necessity demonstration, filled when impossible: the first state's own
    // filter applied to the second leaves this spectral deviation from 1/N
    double cross_output_deviation = 0.0;
};

/// Decides whether one local filter on the given side concentrates both
/// states: possible exactly when their marginals on that side coincide. When
/// they do, the returned filter is built from the shared marginal and the
/// verdict carries the verified equal success probabilities; when they do
/// not, the verdict carries the marginal-distance witness plus a
/// demonstration that the first state's filter fails on the second.
inline SharedConcentratorVerdict shared_concentrator(const PureBipartiteState& s1,
                                                     const PureBipartiteState& s2, Party side,
                                                     double tol) {
    if (s1.dim_a() != s1.dim_b() || s2.dim_a() != s2.dim_b())
        throw InvalidInputError("shared_concentrator: states must live on N x N spaces");
    if (s1.dim_a() != s2.dim_a())
        throw InvalidInputError("shared_concentrator: states have different dimensions");
    const std::vector<double> lambda1 = schmidt_coefficients(s1);
    const std::vector<double> lambda2 = schmidt_coefficients(s2);
    if (lambda1.back() <= tolerance::kEquality || lambda2.back() <= tolerance::kEquality)
        throw RankDeficiencyError("shared_concentrator: smallest Schmidt coefficient must be "
                                  "greater than zero");

    SharedConcentratorVerdict v{false, side, marginal_distance(s1, s2, side), std::nullopt};
    if (v.marginal_distance <= tol) {
        LocalOperation filter = filter_from_marginal(marginal(s1, side), side);
        const ApplyResult r1 = apply_local(s1, filter);
        const ApplyResult r2 = apply_local(s2, filter);
        v.concentratable = true;
        v.probability_1 = r1.probability;
        v.probability_2 = r2.probability;
        v.output_1_maximal = is_maximally_entangled(r1.state, kMaximalityTol);
        v.output_2_maximal = is_maximally_entangled(r2.state, kMaximalityTol);
        v.filter = std::move(filter);
        return v;
    }

    // the first state's own optimal filter demonstrably fails on the second
    const LocalOperation own = filter_from_marginal(marginal(s1, side), side);
    const ApplyResult cross = apply_local(s2, own);
    const double target = 1.0 / static_cast<double>(s2.dim_a());
    double dev = 0.0;
    for (double l : schmidt_coefficients(cross.state)) dev = std::max(dev, std::abs(l - target));
    v.cross_output_deviation = dev;
    return v;
}

/// True iff C diag(lambda) = uA diag(mu) uA† holds for some constant C within
/// tol. Unit traces force C = 1, so a true answer also certifies that the two
/// sequences agree elementwise; both consequences are checked rather than
/// assumed.
inline bool check_matrix_condition(const ComplexMatrix& u_a, const std::vector<double>& lambda,
                                   const std::vector<double>& mu, double tol) {
    if (!is_unitary(u_a, tolerance::kEquality))
        throw InvalidInputError("check_matrix_condition: matrix is not unitary");
    const std::size_t n = u_a.rows();
    if (lambda.size() != n || mu.size() != n)
        throw InvalidInputError("check_matrix_condition: sequence length mismatch");
    for (const std::vector<double>* v : {&lambda, &mu}) {
        double sum = 0.0;
        for (double x : *v) {
            if (x < -tolerance::kEquality)
                throw InvalidInputError("check_matrix_condition: negative probability entry");
            sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            throw InvalidInputError("check_matrix_condition: sequence is not a probability "
                                    "vector (sum " + std::to_string(sum) + ")");
    }

    const ComplexMatrix x = u_a * ComplexMatrix::diagonal(mu) * u_a.adjoint();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += lambda[i] * x(i, i).real();
        den += lambda[i] * lambda[i];
    }
    if (den == 0.0) return false;
    const double c_fit = num / den;
    const double residual = frobenius_distance(x, ComplexMatrix::diagonal(lambda) * c_fit);
    if (residual > tol) return false;
    if (std::abs(c_fit - 1.0) > tol) return false;
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(lambda[i] - mu[i]) > tol) return false;
    return true;
}

/// Outcome of the Bob-side reduction consistency check: the two transferred
/// images must share their post-operation Schmidt spectrum, their success
/// weights must agree, and the input spectra must already coincide.
struct BobReductionReport {
    bool ok;
    bool spectra_match;       // post-operation spectra kappa agree
    bool weights_match;       // success weights agree
    bool input_spectra_match; // input spectra lambda = mu agree
    double weight_1;
    double weight_2;
    std::vector<double> kappa_1;
    std::vector<double> kappa_2;

    std::vector<std::string> failed_clauses() const {
        std::vector<std::string> f;
        if (!spectra_match) f.emplace_back("post-operation spectra differ");
        if (!weights_match) f.emplace_back("success weights differ");
        if (!input_spectra_match) f.emplace_back("input spectra differ");
        return f;
    }
};

/// Evaluates the matrix form of the Bob-side reduction: with lambda, mu the
/// Schmidt spectra of the two states, forms M1 = B sqrt(lambda) and
/// M2 = B uB sqrt(mu), reads off success weights (squared Frobenius norms)
/// and normalized post-operation spectra, and reports which clauses hold.
inline BobReductionReport check_bob_side_reduction(const PureBipartiteState& s1,
                                                   const PureBipartiteState& s2,
                                                   const LocalOperation& b_op,
                                                   const ComplexMatrix& u_b, double tol) {
    if (b_op.party() != Party::Bob)
        throw InvalidInputError("check_bob_side_reduction: operation must act on Bob's side");
    if (s1.dim_a() != s1.dim_b() || s2.dim_a() != s2.dim_b() || s1.dim_a() != s2.dim_a())
        throw InvalidInputError("check_bob_side_reduction: states must share an N x N space");
    const std::size_t n = s1.dim_a();
    if (b_op.dim() != n || u_b.rows() != n || !is_unitary(u_b, tolerance::kEquality))
        throw InvalidInputError("check_bob_side_reduction: operator dimensions or unitarity");

    const std::vector<double> lambda = schmidt_coefficients(s1);
    const std::vector<double> mu = schmidt_coefficients(s2);
    if (lambda.back() <= tolerance::kEquality || mu.back() <= tolerance::kEquality)
        throw RankDeficiencyError("check_bob_side_reduction: states must have full Schmidt rank");

    std::vector<double> root_l(n), root_m(n);
    for (std::size_t i = 0; i < n; ++i) {
        root_l[i] = std::sqrt(lambda[i]);
        root_m[i] = std::sqrt(mu[i]);
    }
    const ComplexMatrix m1 = b_op.kraus() * ComplexMatrix::diagonal(root_l);
    const ComplexMatrix m2 = b_op.kraus() * u_b * ComplexMatrix::diagonal(root_m);
    const double w1 = m1.frobenius_norm() * m1.frobenius_norm();
    const double w2 = m2.frobenius_norm() * m2.frobenius_norm();
    if (w1 < 1e-12 || w2 < 1e-12)
        throw AnnihilationError("check_bob_side_reduction: operation annihilates an input");

    auto normalized_spectrum = [](const ComplexMatrix& m, double weight) {
        std::vector<double> k = detail::hermitian_eigenvalues(m * m.adjoint());
        for (double& x : k) x = std::max(x, 0.0) / weight;
        return k;
    };
    BobReductionReport r{};
    r.weight_1 = w1;
    r.weight_2 = w2;
    r.kappa_1 = normalized_spectrum(m1, w1);
    r.kappa_2 = normalized_spectrum(m2, w2);
    double spectra_gap = 0.0;
    double input_gap = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        spectra_gap = std::max(spectra_gap, std::abs(r.kappa_1[i] - r.kappa_2[i]));
        input_gap = std::max(input_gap, std::abs(lambda[i] - mu[i]));
    }
    r.spectra_match = spectra_gap <= tol;
    r.weights_match = std::abs(w1 - w2) <= tol;
    r.input_spectra_match = input_gap <= tol;
    r.ok = r.spectra_match && r.weights_match && r.input_spectra_match;
    return r;
}

/// Result of a randomized search for a forbidden transformation. Score
/// ceilings quoted by callers are engineering margins for finite search,
/// never theorem constants; the clauses record that.
struct FalsifierReport {
    std::size_t trials;
    double best_score;
    std::uint64_t seed;
    LocalOperation best_alice;
    LocalOperation best_bob;
    std::vector<std::string> clauses;
};

namespace detail {

/// Gaussian matrix rescaled so its top singular value is exactly 1; the raw
/// form of random_kraus used on falsifier hot paths.
inline ComplexMatrix random_kraus_matrix(std::size_t dim, Rng& rng) {
    ComplexMatrix g = random_gaussian_matrix(dim, dim, rng);
    const double top = hermitian_eigenvalues(g.adjoint() * g).front();
    if (top <= 0.0) return ComplexMatrix::identity(dim);
    g *= 1.0 / std::sqrt(top);
    return g;
}

inline std::vector<double> spectrum_of_image(const ComplexMatrix& image, double weight) {
    std::vector<double> l = hermitian_eigenvalues(image * image.adjoint());
    for (double& x : l) x = std::max(x, 0.0) / weight;
    return l;
}

} // namespace detail

/// Randomized corroboration that two different states cannot be sent to one
/// common maximally entangled state by a single local operation pair.
///
/// Each trial applies one Kraus pair to both states; if the first image is
/// maximally entangled (within the gate tolerance) the trial scores the
/// squared overlap of the second image with it, otherwise zero. The first
/// four trials use the analytically optimal filters of either state on
/// either side, so the search always probes the strongest known candidates;
/// the rest are Gaussian Kraus pairs with top singular value 1. Trials draw
/// independent streams from (seed, index), so reports are reproducible
/// regardless of evaluation order.
inline FalsifierReport proposition_falsifier(const PureBipartiteState& s1,
                                             const PureBipartiteState& s2, std::size_t budget,
                                             std::uint64_t seed) {
    if (s1.dim_a() != s2.dim_a() || s1.dim_b() != s2.dim_b())
        throw InvalidInputError("proposition_falsifier: states have different dimensions");
    if (s1.dim_a() != s1.dim_b())
        throw InvalidInputError("proposition_falsifier: states must live on N x N spaces");
    if (frobenius_distance(s1.coeff(), s2.coeff()) <= 1e-6)
        throw InvalidInputError("proposition_falsifier: states must differ "
                                "(coefficient distance above 1e-6)");
    if (budget == 0) throw InvalidInputError("proposition_falsifier: budget must be positive");

    const std::size_t n = s1.dim_a();
    const ComplexMatrix& c1 = s1.coeff();
    const ComplexMatrix& c2 = s2.coeff();
    const ComplexMatrix id = ComplexMatrix::identity(n);
    const double target = 1.0 / static_cast<double>(n);

    // analytically optimal openers: each state's filter on each side
    std::vector<std::pair<ComplexMatrix, ComplexMatrix>> openers;
    for (const PureBipartiteState* s : {&s1, &s2}) {
        for (Party side : {Party::Alice, Party::Bob}) {
            try {
                const LocalOperation f = filter_from_marginal(marginal(*s, side), side);
                if (side == Party::Alice)
                    openers.emplace_back(f.kraus(), id);
                else
                    openers.emplace_back(id, f.kraus());
            } catch (const RankDeficiencyError&) {
                // rank-deficient side has no filter; the slot falls back to random
            }
        }
    }

    double best = -1.0;
    std::size_t best_trial = 0;
    ComplexMatrix best_a = id, best_b = id;
    for (std::size_t t = 0; t < budget; ++t) {
        ComplexMatrix a = id, b = id;
        if (t < openers.size()) {
            a = openers[t].first;
            b = openers[t].second;
        } else {
            Rng rng(derive_stream(seed, t));
            a = detail::random_kraus_matrix(n, rng);
            b = detail::random_kraus_matrix(n, rng);
        }
        const ComplexMatrix bt = b.transpose();
        const ComplexMatrix img1 = a * c1 * bt;
        const double p1 = img1.frobenius_norm() * img1.frobenius_norm();
        if (p1 < 1e-12) continue;
        const ComplexMatrix img2 = a * c2 * bt;
        const double p2 = img2.frobenius_norm() * img2.frobenius_norm();
        if (p2 < 1e-12) continue;

        double gate_dev = 0.0;
        for (double l : detail::spectrum_of_image(img1, p1))
            gate_dev = std::max(gate_dev, std::abs(l - target));
        if (gate_dev > kFalsifierGate) continue;

        const double overlap = std::norm(frobenius_inner(img2, img1)) / (p1 * p2);
        if (overlap > best) {
            best = overlap;
            best_trial = t;
            best_a = a;
            best_b = b;
        }
    }
    (void)best_trial;

    FalsifierReport report{budget,
                           std::clamp(best, 0.0, 1.0),
                           seed,
                           LocalOperation(Party::Alice, std::move(best_a)),
                           LocalOperation(Party::Bob, std::move(best_b)),
                           {}};
    report.clauses = {
        "score: squared overlap of the second image with the first, gated on the first "
        "image being maximally entangled within " + std::to_string(kFalsifierGate),
        "first trials probe the analytically optimal filters of both states on both sides",
        "score ceilings are engineering margins for finite search, not theorem constants",
    };
    return report;
}

/// Randomized corroboration that no single-pair local operation purifies a
/// mixed state to a maximally entangled one: samples Kraus pairs (the first
/// trial is the identity pair), scores each surviving output by its fully
/// entangled fraction, and reports the best value found.
inline FalsifierReport purification_falsifier(const DensityMatrix& rho, std::size_t budget,
                                              std::uint64_t seed) {
    const std::size_t n = detail::bipartite_side_dim(rho.dim(), "purification_falsifier");
    if (rho.rank(tolerance::kEquality) < 2)
        throw InvalidInputError("purification_falsifier: input is pure (rank 1); pure "
                                "full-rank states concentrate instead");
    if (budget == 0) throw InvalidInputError("purification_falsifier: budget must be positive");

    constexpr std::size_t kInnerFefBudget = 128; // sampled lower bound, N >= 3 only
    const ComplexMatrix id = ComplexMatrix::identity(n);
    double best = -1.0;
    ComplexMatrix best_a = id, best_b = id;
    for (std::size_t t = 0; t < budget; ++t) {
        ComplexMatrix a = id, b = id;
        if (t > 0) {
            Rng rng(derive_stream(seed, t));
            a = detail::random_kraus_matrix(n, rng);
            b = detail::random_kraus_matrix(n, rng);
        }
        const ComplexMatrix m = kron(a, b);
        ComplexMatrix out = m * rho.matrix() * m.adjoint();
        const double p = out.trace().real();
        if (p < 1e-12) continue;
        out *= 1.0 / p;
        const double score = (n == 2)
                                 ? detail::fef_two_qubit_exact(out)
                                 : detail::fef_sampled(out, n, kInnerFefBudget,
                                                       derive_stream(seed, budget + t));
        if (score > best) {
            best = score;
            best_a = a;
            best_b = b;
        }
    }

    FalsifierReport report{budget,
                           std::clamp(best, 0.0, 1.0),
                           seed,
                           LocalOperation(Party::Alice, std::move(best_a)),
                           LocalOperation(Party::Bob, std::move(best_b)),
                           {}};
    report.clauses = {
        "score: fully entangled fraction of the normalized output density operator",
        "trial 0 is the identity pair, so the input's own fraction is the floor",
        "score ceilings are engineering margins for finite search, not theorem constants",
    };
    return report;
}

/// Haar-random unitary commuting with diag(spectrum): block-Haar on each
/// degeneracy block (consecutive equal values of the descending spectrum),
/// nontrivial phases on singleton blocks.
inline ComplexMatrix commutant_unitary_for_spectrum(const std::vector<double>& spectrum,
                                                    Rng& rng,
                                                    double degeneracy_tol = tolerance::kEquality) {
    const std::size_t n = spectrum.size();
    if (n == 0) throw InvalidInputError("commutant_unitary_for_spectrum: empty spectrum");
    ComplexMatrix w(n, n);
    std::size_t start = 0;
    while (start < n) {
        std::size_t stop = start + 1;
        while (stop < n && std::abs(spectrum[stop] - spectrum[stop - 1]) <= degeneracy_tol)
            ++stop;
        const std::size_t b = stop - start;
        const ComplexMatrix block = random_haar_unitary(b, rng);
        for (std::size_t i = 0; i < b; ++i)
            for (std::size_t j = 0; j < b; ++j) w(start + i, start + j) = block(i, j);
        start = stop;
    }
    return w;
}

/// Haar-random unitary commuting with rho, built block-diagonally on the
/// eigenvalue-degeneracy blocks of its spectral basis.
inline ComplexMatrix commutant_unitary(const DensityMatrix& rho, Rng& rng,
                                       double degeneracy_tol = tolerance::kEquality) {
    const EighResult e = eigh(rho.matrix());
    const ComplexMatrix w = commutant_unitary_for_spectrum(e.eigenvalues, rng, degeneracy_tol);
    return e.eigenvectors * w * e.eigenvectors.adjoint();
}

} // namespace qconc
