#pragma once
// Copyright (c) 2026 the qconc authors.
// SPDX-License-Identifier: Apache-2.0
//
// Named invariant checks over every module, runnable as a batch (the CLI
// `verify` command) or individually from tests. Full mode uses the
// documented sample counts; quick mode shrinks them for smoke runs.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qconc/concentrate.hpp"
#include "qconc/kraus.hpp"
#include "qconc/linalg.hpp"
#include "qconc/matrix.hpp"
#include "qconc/random.hpp"
#include "qconc/state.hpp"
#include "qconc/superdense.hpp"
#include "qconc/theorem.hpp"

namespace qconc::selfcheck {

struct CheckOptions {
    std::uint64_t seed = 42;
    bool quick = false;

    std::size_t count(std::size_t full, std::size_t reduced) const {
        return quick ? reduced : full;
    }
};

struct CheckResult {
    std::string name;
    bool pass;
    std::string detail;
    double seconds;
};

namespace detail {

inline std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", x);
    return buf;
}

template <typename Fn>
CheckResult timed(const std::string& name, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        pass = fn(detail);
    } catch (const std::exception& e) {
        pass = false;
        detail = std::string("exception: ") + e.what();
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    return {name, pass, std::move(detail), elapsed.count()};
}

} // namespace detail

/// Gaussian-ensemble N x N state resampled until its smallest Schmidt
/// coefficient clears min_lambda; keeps inverse-marginal conditioning sane.
inline PureBipartiteState random_full_rank_state(std::size_t n, std::uint64_t seed,
                                                 double min_lambda = 1e-3) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        PureBipartiteState s = random_pure_state(n, n, derive_stream(seed, attempt));
        if (schmidt_coefficients(s).back() >= min_lambda) return s;
    }
}

/// Descending spectrum with deliberate repeats: `blocks` distinct values,
/// each duplicated to fill n slots, separated well enough that degeneracy
/// detection is unambiguous.
inline std::vector<double> degenerate_spectrum(std::size_t n, std::size_t blocks, Rng& rng) {
    if (blocks == 0 || blocks > n) throw InvalidInputError("degenerate_spectrum: bad block count");
    for (;;) {
        std::vector<double> values(blocks);
        for (double& v : values) v = 0.2 + 0.8 * rng.uniform();
        std::vector<double> lambda;
        for (std::size_t i = 0; i < n; ++i) lambda.push_back(values[i % blocks]);
        double sum = 0.0;
        for (double l : lambda) sum += l;
        for (double& l : lambda) l /= sum;
        std::sort(lambda.rbegin(), lambda.rend());
        bool ok = lambda.back() > 1e-2;
        for (std::size_t i = 0; i + 1 < n && ok; ++i) {
            const double gap = lambda[i] - lambda[i + 1];
            if (gap > 0.0 && gap < 1e-3) ok = false; // distinct values must stay separated
        }
        if (ok) return lambda;
    }
}

struct StatePair {
    PureBipartiteState s1;
    PureBipartiteState s2;
};

/// Builds s1 and s2 = (W ⊗ U) s1 sharing the marginal on `side`, where W
/// commutes with that marginal (block-Haar on degeneracy blocks when the
/// spectrum is degenerate) and U is Haar on the other side.
inline StatePair shared_marginal_pair(std::size_t n, std::uint64_t seed, bool degenerate,
                                      Party side) {
    Rng rng(seed);
    PureBipartiteState s1 = [&] {
        if (!degenerate) return random_full_rank_state(n, rng.next_u64(), 1e-2);
        const std::vector<double> lambda = degenerate_spectrum(n, n > 2 ? n - 1 : 1, rng);
        std::vector<double> roots(n);
        for (std::size_t i = 0; i < n; ++i) roots[i] = std::sqrt(lambda[i]);
        const PureBipartiteState diag{ComplexMatrix::diagonal(roots)};
        return apply_local_unitaries(diag, random_haar_unitary(n, rng),
                                     random_haar_unitary(n, rng));
    }();
    const ComplexMatrix w = commutant_unitary(marginal(s1, side), rng, 1e-7);
    const ComplexMatrix u = random_haar_unitary(n, rng);
    PureBipartiteState s2 = side == Party::Alice ? apply_local_unitaries(s1, w, u)
                                                 : apply_local_unitaries(s1, u, w);
    return {std::move(s1), std::move(s2)};
}

/// Independent full-rank pair resampled until the same-side marginals are at
/// least min_distance apart.
inline StatePair distinct_marginal_pair(std::size_t n, std::uint64_t seed, Party side,
                                        double min_distance = 0.05) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        PureBipartiteState s1 = random_full_rank_state(n, derive_stream(seed, 2 * attempt));
        PureBipartiteState s2 = random_full_rank_state(n, derive_stream(seed, 2 * attempt + 1));
        if (marginal_distance(s1, s2, side) >= min_distance) return {std::move(s1), std::move(s2)};
    }
}

// ---------------------------------------------------------------------------
// numerics

inline CheckResult check_svd_roundtrip(const CheckOptions& o) {
    return detail::timed("svd reconstructs its input with orthonormal factors", [&](std::string& d) {
        const std::size_t reps = o.count(3, 1);
        double worst = 0.0;
        std::size_t cases = 0;
        for (std::size_t r = 1; r <= 8; ++r)
            for (std::size_t c = 1; c <= 8; ++c)
                for (std::size_t rep = 0; rep < reps; ++rep) {
                    Rng rng(derive_stream(o.seed, 811 + 97 * r + 13 * c + rep));
                    ComplexMatrix m = random_gaussian_matrix(r, c, rng);
                    if (rep == 1 && r > 1 && c > 1) // rank-one fixture
                        m = m.column(0) * random_gaussian_matrix(1, c, rng);
                    const SvdResult f = svd(m);
                    const ComplexMatrix rebuilt =
                        f.u
                        * ComplexMatrix::rect_diagonal(f.u.cols(), f.v.cols(),
                                                       f.singular_values)
                        * f.v.adjoint();
                    worst = std::max(worst, frobenius_distance(m, rebuilt) / m.frobenius_norm());
                    worst = std::max(worst, unitarity_defect(f.u));
                    worst = std::max(worst, unitarity_defect(f.v));
                    for (std::size_t i = 0; i + 1 < f.singular_values.size(); ++i)
                        if (f.singular_values[i] < f.singular_values[i + 1]) worst = 1.0;
                    ++cases;
                }
        d = "worst residual/defect " + detail::fmt(worst) + " over " + std::to_string(cases)
            + " matrices";
        return worst <= 1e-10;
    });
}

inline CheckResult check_eigh_reconstruction(const CheckOptions& o) {
    return detail::timed("eigh reconstructs Hermitian inputs with a unitary basis", [&](std::string& d) {
        const std::size_t reps = o.count(4, 1);
        double worst = 0.0;
        for (std::size_t n = 1; n <= 8; ++n)
            for (std::size_t rep = 0; rep < reps; ++rep) {
                Rng rng(derive_stream(o.seed, 911 + 31 * n + rep));
                const ComplexMatrix g = random_gaussian_matrix(n, n, rng);
                const ComplexMatrix h = g + g.adjoint();
                const EighResult e = eigh(h);
                const ComplexMatrix rebuilt = e.eigenvectors
                                              * ComplexMatrix::diagonal(e.eigenvalues)
                                              * e.eigenvectors.adjoint();
                worst = std::max(worst,
                                 frobenius_distance(h, rebuilt) / std::max(1.0, h.frobenius_norm()));
                worst = std::max(worst, unitarity_defect(e.eigenvectors));
                for (std::size_t i = 0; i + 1 < n; ++i)
                    if (e.eigenvalues[i] < e.eigenvalues[i + 1]) worst = 1.0;
            }
        d = "worst residual/defect " + detail::fmt(worst);
        return worst <= 1e-10;
    });
}

inline CheckResult check_isometry_completion(const CheckOptions& o) {
    return detail::timed("isometry completion is unitary and extends its input exactly",
                         [&](std::string& d) {
        const std::size_t reps = o.count(4, 1);
        double worst = 0.0;
        bool exact = true;
        for (std::size_t n = 2; n <= 8; ++n)
            for (std::size_t k = 1; k <= n; ++k)
                for (std::size_t rep = 0; rep < reps; ++rep) {
                    const ComplexMatrix u =
                        random_haar_unitary(n, derive_stream(o.seed, 1200 + 59 * n + 7 * k + rep));
                    ComplexMatrix v(n, k);
                    for (std::size_t i = 0; i < n; ++i)
                        for (std::size_t j = 0; j < k; ++j) v(i, j) = u(i, j);
                    const ComplexMatrix full = complete_isometry(v);
                    worst = std::max(worst, unitarity_defect(full));
                    for (std::size_t i = 0; i < n; ++i)
                        for (std::size_t j = 0; j < k; ++j)
                            if (full(i, j) != v(i, j)) exact = false;
                }
        d = "worst unitarity defect " + detail::fmt(worst)
            + (exact ? ", prefixes exact" : ", prefix modified");
        return exact && worst <= 1e-10;
    });
}

inline CheckResult check_kron_mixed_product(const CheckOptions& o) {
    return detail::timed("kron satisfies the mixed-product identity", [&](std::string& d) {
        const std::size_t reps = o.count(40, 8);
        double worst = 0.0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            Rng rng(derive_stream(o.seed, 1300 + rep));
            const ComplexMatrix a = random_gaussian_matrix(2, 3, rng);
            const ComplexMatrix c = random_gaussian_matrix(3, 2, rng);
            const ComplexMatrix b = random_gaussian_matrix(3, 2, rng);
            const ComplexMatrix e = random_gaussian_matrix(2, 3, rng);
            const ComplexMatrix lhs = kron(a, b) * kron(c, e);
            const ComplexMatrix rhs = kron(a * c, b * e);
            worst = std::max(worst, frobenius_distance(lhs, rhs) / rhs.frobenius_norm());
        }
        d = "worst relative deviation " + detail::fmt(worst);
        return worst <= 1e-12;
    });
}

inline CheckResult check_haar_sampling(const CheckOptions& o) {
    return detail::timed("Haar sampling is unitary and seed-deterministic", [&](std::string& d) {
        double worst = 0.0;
        bool deterministic = true;
        for (std::size_t n = 1; n <= 8; ++n) {
            const ComplexMatrix u1 = random_haar_unitary(n, derive_stream(o.seed, 1400 + n));
            const ComplexMatrix u2 = random_haar_unitary(n, derive_stream(o.seed, 1400 + n));
            worst = std::max(worst, unitarity_defect(u1));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (u1(i, j) != u2(i, j)) deterministic = false;
        }
        d = "worst unitarity defect " + detail::fmt(worst)
            + (deterministic ? ", streams reproducible" : ", streams diverged");
        return deterministic && worst <= 1e-10;
    });
}

// ---------------------------------------------------------------------------
// states

inline CheckResult check_schmidt_roundtrip(const CheckOptions& o) {
    return detail::timed("Schmidt decomposition reconstructs the state", [&](std::string& d) {
        const std::size_t reps = o.count(3, 1);
        double worst = 0.0;
        for (std::size_t a = 1; a <= 8; ++a)
            for (std::size_t b = 1; b <= 8; ++b)
                for (std::size_t rep = 0; rep < reps; ++rep) {
                    const PureBipartiteState s =
                        random_pure_state(a, b, derive_stream(o.seed, 2100 + 89 * a + 11 * b + rep));
                    const SchmidtForm f = schmidt_decompose(s);
                    worst = std::max(worst,
                                     frobenius_distance(s.coeff(), schmidt_reconstruct(f)));
                    double sum = 0.0;
                    for (double l : f.coeffs) sum += l;
                    worst = std::max(worst, std::abs(sum - 1.0));
                }
        d = "worst reconstruction distance " + detail::fmt(worst);
        return worst <= 1e-9;
    });
}

inline CheckResult check_marginal_spectra(const CheckOptions& o) {
    return detail::timed("both marginals share their nonzero spectrum", [&](std::string& d) {
        const std::size_t reps = o.count(30, 6);
        double worst = 0.0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const std::size_t a = 2 + rep % 4;
            const std::size_t b = 2 + (rep / 2) % 5;
            const PureBipartiteState s = random_pure_state(a, b, derive_stream(o.seed, 2200 + rep));
            const std::vector<double> ea = marginal(s, Party::Alice).eigenvalues();
            const std::vector<double> eb = marginal(s, Party::Bob).eigenvalues();
            const std::size_t k = std::min(ea.size(), eb.size());
            for (std::size_t i = 0; i < k; ++i) worst = std::max(worst, std::abs(ea[i] - eb[i]));
            for (std::size_t i = k; i < ea.size(); ++i) worst = std::max(worst, std::abs(ea[i]));
            for (std::size_t i = k; i < eb.size(); ++i) worst = std::max(worst, std::abs(eb[i]));
        }
        d = "worst spectral gap " + detail::fmt(worst);
        return worst <= 1e-9;
    });
}

inline CheckResult check_schmidt_local_unitary_invariance(const CheckOptions& o) {
    return detail::timed("local unitaries preserve Schmidt coefficients", [&](std::string& d) {
        const std::size_t reps = o.count(40, 8);
        double worst = 0.0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const std::size_t n = 2 + rep % 5;
            Rng rng(derive_stream(o.seed, 2300 + rep));
            const PureBipartiteState s = random_pure_state(n, n, rng.next_u64());
            const PureBipartiteState t = apply_local_unitaries(s, random_haar_unitary(n, rng),
                                                               random_haar_unitary(n, rng));
            const std::vector<double> l1 = schmidt_coefficients(s);
            const std::vector<double> l2 = schmidt_coefficients(t);
            for (std::size_t i = 0; i < l1.size(); ++i)
                worst = std::max(worst, std::abs(l1[i] - l2[i]));
        }
        d = "worst coefficient drift " + detail::fmt(worst);
        return worst <= 1e-9;
    });
}

inline CheckResult check_marginal_bob_invariance(const CheckOptions& o) {
    return detail::timed("Bob-side unitaries leave Alice's marginal alone", [&](std::string& d) {
        const std::size_t reps = o.count(40, 8);
        double worst = 0.0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const std::size_t n = 2 + rep % 5;
            Rng rng(derive_stream(o.seed, 2400 + rep));
            const PureBipartiteState s = random_pure_state(n, n, rng.next_u64());
            const PureBipartiteState t =
                apply_local_unitaries(s, ComplexMatrix::identity(n), random_haar_unitary(n, rng));
            worst = std::max(worst, frobenius_distance(marginal(s, Party::Alice).matrix(),
                                                       marginal(t, Party::Alice).matrix()));
        }
        d = "worst marginal drift " + detail::fmt(worst);
        return worst <= 1e-9;
    });
}

// ---------------------------------------------------------------------------
// lqcc

inline CheckResult check_dilation_commutation(const CheckOptions& o) {
    return detail::timed("probe dilation commutes with Bob-side unitaries", [&](std::string& d) {
        const std::size_t reps = o.count(40, 8);
        double worst = 0.0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const std::size_t n = 2 + rep % 4;
            Rng rng(derive_stream(o.seed, 3100 + rep));
            const PureBipartiteState s = random_pure_state(n, n, rng.next_u64());
            const LocalOperation k = random_kraus(Party::Alice, n, rng);
            const ProbeDilation dil = dilate(k);
            const ComplexMatrix u_b = random_haar_unitary(n, rng);
            // joint (system ⊗ probe) x Bob coefficient matrix, probe at |P_0>
            ComplexMatrix joint(n * dil.probe_dim(), n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t l = 0; l < n; ++l)
                    joint(i * dil.probe_dim(), l) = s.coeff()(i, l);
            const ComplexMatrix first = dil.unitary() * (joint * u_b.transpose());
            const ComplexMatrix second = (dil.unitary() * joint) * u_b.transpose();
            worst = std::max(worst, frobenius_distance(first, second));
        }
        d = "worst order mismatch " + detail::fmt(worst);
        return worst <= 1e-10;
    });
}

inline CheckResult check_dilation_probability(const CheckOptions& o) {
    return detail::timed("dilated filters fire with the analytic probability", [&](std::string& d) {
        const std::size_t trials = o.count(10000, 500);
        // analytic agreement between branch weights and direct application
        double worst = 0.0;
        for (std::size_t rep = 0; rep < o.count(30, 6); ++rep) {
            const std::size_t n = 2 + rep % 4;
            Rng rng(derive_stream(o.seed, 3200 + rep));
            const PureBipartiteState s = random_pure_state(n, n, rng.next_u64());
            const LocalOperation k = random_kraus(Party::Alice, n, rng);
            const ProbeDilation dil = dilate(k);
            const std::vector<double> w = branch_weights(dil, s);
            double direct = 0.0;
            try {
                direct = apply_local(s, k).probability;
            } catch (const AnnihilationError&) {
                direct = 0.0;
            }
            worst = std::max(worst, std::abs(w[dil.success_outcome()] - direct));
            double sum = 0.0;
            for (double x : w) sum += x;
            worst = std::max(worst, std::abs(sum - 1.0));
        }
        // Monte Carlo frequency against the Born weight
        const PureBipartiteState s = state_from_lambda2(0.25);
        const ProbeDilation dil = dilate(build_filter(s));
        std::size_t fired = 0;
        for (std::size_t t = 0; t < trials; ++t)
            if (simulate_measurement(dil, s, derive_stream(o.seed, 40000 + t)).outcome
                == dil.success_outcome())
                ++fired;
        const double freq = static_cast<double>(fired) / static_cast<double>(trials);
        const double sigma = std::sqrt(0.5 * 0.5 / static_cast<double>(trials));
        const double gap = std::abs(freq - 0.5);
        d = "worst analytic gap " + detail::fmt(worst) + ", MC gap " + detail::fmt(gap) + " ("
            + detail::fmt(5.0 * sigma) + " allowed)";
        return worst <= 1e-10 && gap < 5.0 * sigma;
    });
}

inline CheckResult check_transfer_roundtrip(const CheckOptions& o) {
    return detail::timed("Bob operations transfer to Alice's side", [&](std::string& d) {
        const std::size_t reps = o.count(100, 20);
        double worst = 0.0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const std::size_t n = 2 + rep % 4;
            Rng rng(derive_stream(o.seed, 3300 + rep));
            const PureBipartiteState s = random_full_rank_state(n, rng.next_u64());
            const LocalOperation b = random_kraus(Party::Bob, n, rng);
            const SideTransfer tr = transfer_to_alice_side(s, b);
            const ComplexMatrix lhs = tr.alice_equivalent.kraus() * s.coeff()
                                      * tr.bob_unitary_fix.transpose() * tr.scale;
            const ComplexMatrix rhs = s.coeff() * b.kraus().transpose();
            worst = std::max(worst, frobenius_distance(lhs, rhs));
            worst = std::max(worst, unitarity_defect(tr.bob_unitary_fix));
        }
        d = "worst defining-equality gap " + detail::fmt(worst);
        return worst <= 1e-9;
    });
}

inline CheckResult check_composition_multiplicativity(const CheckOptions& o) {
    return detail::timed("Alice-side probabilities multiply under composition", [&](std::string& d) {
        const std::size_t reps = o.count(60, 12);
        double worst = 0.0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const std::size_t n = 2 + rep % 4;
            Rng rng(derive_stream(o.seed, 3400 + rep));
            const PureBipartiteState s = random_pure_state(n, n, rng.next_u64());
            const LocalOperation a1 = random_kraus(Party::Alice, n, rng);
            const LocalOperation a2 = random_kraus(Party::Alice, n, rng);
            try {
                const ApplyResult first = apply_local(s, a1);
                const ApplyResult second = apply_local(first.state, a2);
                const ApplyResult composed =
                    apply_local(s, LocalOperation(Party::Alice, a2.kraus() * a1.kraus()));
                worst = std::max(worst, std::abs(first.probability * second.probability
                                                 - composed.probability));
                worst = std::max(worst, frobenius_distance(second.state.coeff(),
                                                           composed.state.coeff()));
            } catch (const AnnihilationError&) {
                // vanishing branch; nothing to compare
            }
        }
        d = "worst probability/state gap " + detail::fmt(worst);
        return worst <= 1e-10;
    });
}

// ---------------------------------------------------------------------------
// concentrate

inline CheckResult check_filter_optimality(const CheckOptions& o) {
    return detail::timed("optimal filters reach N*lambda_min with maximal output",
                         [&](std::string& d) {
        const std::size_t total = o.count(1000, 80);
        double worst_p = 0.0;
        bool all_maximal = true;
        for (std::size_t i = 0; i < total; ++i) {
            const std::size_t n = 2 + i % 4;
            const PureBipartiteState s =
                random_full_rank_state(n, derive_stream(o.seed, 4100 + i));
            const ConcentrationResult r = concentrate(s);
            worst_p = std::max(worst_p, std::abs(r.success_probability - gamma_max(s)));
            if (!is_maximally_entangled(r.output_state, 1e-8)) all_maximal = false;
        }
        d = "worst probability gap " + detail::fmt(worst_p) + " over " + std::to_string(total)
            + " states" + (all_maximal ? "" : "; non-maximal output seen");
        return worst_p <= 1e-9 && all_maximal;
    });
}

inline CheckResult check_extraction_amplitude(const CheckOptions& o) {
    return detail::timed("shift/flip extraction isolates amplitude 2 sqrt(lambda_k)",
                         [&](std::string& d) {
        const std::size_t spectra = o.count(20, 2);
        double worst = 0.0;
        std::size_t cases = 0;
        for (std::size_t dim = 2; dim <= 6; ++dim)
            for (std::size_t rep = 0; rep < spectra; ++rep) {
                Rng rng(derive_stream(o.seed, 4200 + 31 * dim + rep));
                std::vector<double> lambda(dim);
                double sum = 0.0;
                for (double& l : lambda) {
                    l = rng.uniform();
                    sum += l;
                }
                for (double& l : lambda) l /= sum;
                std::sort(lambda.rbegin(), lambda.rend());
                std::vector<double> roots(dim);
                for (std::size_t i = 0; i < dim; ++i) roots[i] = std::sqrt(lambda[i]);
                const PureBipartiteState s{ComplexMatrix::diagonal(roots)};
                for (std::size_t k = 0; k < dim; ++k)
                    for (std::size_t nn = 0; nn < dim; ++nn) {
                        const SubnormalizedState out = shift_flip_extract(s, k, nn);
                        const double expected = 2.0 * std::sqrt(lambda[k]);
                        for (std::size_t i = 0; i < dim; ++i)
                            for (std::size_t j = 0; j < dim; ++j) {
                                const double want =
                                    (i == k && j == nn) ? expected : 0.0;
                                worst = std::max(worst,
                                                 std::abs(out.coeff(i, j) - Complex(want)));
                            }
                        worst = std::max(worst, std::abs(out.norm - expected));
                        ++cases;
                    }
            }
        d = "worst amplitude gap " + detail::fmt(worst) + " over " + std::to_string(cases)
            + " extractions";
        return worst <= 1e-12;
    });
}

inline CheckResult check_extraction_through_dilation(const CheckOptions& o) {
    return detail::timed("extraction pushed through the filter dilation keeps sqrt(4 gamma/N)",
                         [&](std::string& d) {
        const std::size_t reps = o.count(30, 6);
        double worst = 0.0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const std::size_t dim = 2 + rep % 5;
            Rng rng(derive_stream(o.seed, 4300 + rep));
            std::vector<double> lambda(dim);
            double sum = 0.0;
            for (double& l : lambda) {
                l = 0.05 + rng.uniform();
                sum += l;
            }
            for (double& l : lambda) l /= sum;
            std::sort(lambda.rbegin(), lambda.rend());
            std::vector<double> roots(dim);
            for (std::size_t i = 0; i < dim; ++i) roots[i] = std::sqrt(lambda[i]);
            const PureBipartiteState s{ComplexMatrix::diagonal(roots)};
            const double gamma = gamma_max(s);
            const ProbeDilation dil = dilate(build_filter(s));
            const ComplexMatrix success = dil.branch_operator(dil.success_outcome());
            const std::size_t k = rng.next_u64() % dim;
            const std::size_t nn = rng.next_u64() % dim;
            const ComplexMatrix pushed = success * shift_flip_extract(s, k, nn).coeff;
            const double expected = std::sqrt(4.0 * gamma / static_cast<double>(dim));
            for (std::size_t i = 0; i < dim; ++i)
                for (std::size_t j = 0; j < dim; ++j) {
                    const double want = (i == k && j == nn) ? expected : 0.0;
                    worst = std::max(worst, std::abs(pushed(i, j) - Complex(want)));
                }
        }
        d = "worst amplitude gap " + detail::fmt(worst);
        return worst <= 1e-9;
    });
}

inline CheckResult check_filter_covariance(const CheckOptions& o) {
    return detail::timed("filtering is covariant under local basis changes", [&](std::string& d) {
        const std::size_t reps = o.count(50, 10);
        double worst = 0.0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const std::size_t n = 2 + rep % 4;
            Rng rng(derive_stream(o.seed, 4400 + rep));
            const PureBipartiteState s = random_full_rank_state(n, rng.next_u64());
            const LocalOperation k = build_filter(s);
            const ComplexMatrix u_a = random_haar_unitary(n, rng);
            const ComplexMatrix u_b = random_haar_unitary(n, rng);
            const PureBipartiteState rotated = apply_local_unitaries(s, u_a, u_b);
            const LocalOperation conjugated{Party::Alice, u_a * k.kraus() * u_a.adjoint()};
            const double p0 = apply_local(s, k).probability;
            const double p1 = apply_local(rotated, conjugated).probability;
            worst = std::max(worst, std::abs(p0 - p1));
        }
        d = "worst probability drift " + detail::fmt(worst);
        return worst <= 1e-10;
    });
}

// ---------------------------------------------------------------------------
// theorem

inline CheckResult check_theorem_sufficiency(const CheckOptions& o) {
    return detail::timed("shared-marginal pairs concentrate under one filter", [&](std::string& d) {
        const std::size_t pairs = o.count(200, 30);
        double worst = 0.0;
        bool all_ok = true;
        for (std::size_t i = 0; i < pairs; ++i) {
            const std::size_t n = 2 + i % 4;
            const Party side = (i % 2 == 0) ? Party::Alice : Party::Bob;
            const StatePair pair =
                shared_marginal_pair(n, derive_stream(o.seed, 5100 + i), i % 3 == 0, side);
            const SharedConcentratorVerdict v = shared_concentrator(pair.s1, pair.s2, side, 1e-7);
            if (!v.concentratable || !v.output_1_maximal || !v.output_2_maximal) all_ok = false;
            worst = std::max(worst, std::abs(v.probability_1 - v.probability_2));
        }
        d = "worst probability gap " + detail::fmt(worst) + " over " + std::to_string(pairs)
            + " pairs" + (all_ok ? "" : "; unexpected verdict seen");
        return all_ok && worst <= 1e-10;
    });
}

inline CheckResult check_theorem_necessity(const CheckOptions& o) {
    return detail::timed("distinct-marginal pairs are refused and resist search", [&](std::string& d) {
        const std::size_t pairs = o.count(200, 12);
        const std::size_t budget = o.count(100000, 2000);
        bool all_ok = true;
        double best_seen = 0.0;
        double least_deviation = 1.0;
        for (std::size_t i = 0; i < pairs; ++i) {
            const std::size_t n = 2 + i % 2;
            const Party side = (i % 2 == 0) ? Party::Alice : Party::Bob;
            const StatePair pair = distinct_marginal_pair(n, derive_stream(o.seed, 5200 + i), side);
            const SharedConcentratorVerdict v = shared_concentrator(pair.s1, pair.s2, side, 1e-7);
            if (v.concentratable || v.marginal_distance <= 0.01) all_ok = false;
            least_deviation = std::min(least_deviation, v.cross_output_deviation);
            const FalsifierReport r =
                proposition_falsifier(pair.s1, pair.s2, budget, derive_stream(o.seed, 5400 + i));
            best_seen = std::max(best_seen, r.best_score);
        }
        d = "best falsifier score " + detail::fmt(best_seen) + ", least cross deviation "
            + detail::fmt(least_deviation) + " over " + std::to_string(pairs) + " pairs";
        return all_ok && best_seen < 1.0 - 1e-4 && least_deviation > 1e-3;
    });
}

inline CheckResult check_matrix_condition_coincidence(const CheckOptions& o) {
    return detail::timed("matrix condition holds exactly when spectra agree", [&](std::string& d) {
        const std::size_t reps = o.count(1000, 150);
        bool all_ok = true;
        for (std::size_t rep = 0; rep < reps && all_ok; ++rep) {
            const std::size_t n = 2 + rep % 4;
            Rng rng(derive_stream(o.seed, 5500 + rep));
            auto draw_simplex = [&] {
                std::vector<double> v(n);
                double sum = 0.0;
                for (double& x : v) {
                    x = -std::log(1.0 - rng.uniform());
                    sum += x;
                }
                for (double& x : v) x /= sum;
                std::sort(v.rbegin(), v.rend());
                return v;
            };
            const std::vector<double> lambda = draw_simplex();
            const ComplexMatrix u = random_haar_unitary(n, rng);
            // agreeing spectra with a commuting unitary: must pass
            const ComplexMatrix w = commutant_unitary_for_spectrum(lambda, rng);
            if (!check_matrix_condition(w, lambda, lambda, 1e-9)) all_ok = false;
            // independently drawn spectra with a Haar unitary: must coincide
            // with elementwise agreement (which fails almost surely)
            const std::vector<double> mu = draw_simplex();
            double gap = 0.0;
            for (std::size_t i = 0; i < n; ++i) gap = std::max(gap, std::abs(lambda[i] - mu[i]));
            const bool verdict = check_matrix_condition(u, lambda, mu, 1e-9);
            if (verdict != (gap <= 1e-9)) all_ok = false;
        }
        d = all_ok ? "verdicts coincide over " + std::to_string(reps) + " draws"
                   : "verdict disagreed with spectral agreement";
        return all_ok;
    });
}

inline CheckResult check_falsifier_determinism(const CheckOptions& o) {
    return detail::timed("falsifier reports are reproducible per (seed, budget)", [&](std::string& d) {
        const std::size_t budget = o.count(2000, 300);
        const PureBipartiteState s1 = random_full_rank_state(2, derive_stream(o.seed, 5600));
        const PureBipartiteState s2 = random_full_rank_state(2, derive_stream(o.seed, 5601));
        const FalsifierReport a = proposition_falsifier(s1, s2, budget, o.seed);
        const FalsifierReport b = proposition_falsifier(s1, s2, budget, o.seed);
        const FalsifierReport p = purification_falsifier(werner_state(0.4), budget, o.seed);
        const FalsifierReport q = purification_falsifier(werner_state(0.4), budget, o.seed);
        const bool same = a.best_score == b.best_score && p.best_score == q.best_score
                          && approx_equal(a.best_alice.kraus(), b.best_alice.kraus(), 0.0)
                          && approx_equal(p.best_bob.kraus(), q.best_bob.kraus(), 0.0);
        d = same ? "identical reports across reruns" : "reports diverged";
        return same;
    });
}

// ---------------------------------------------------------------------------
// superdense

inline CheckResult check_superdense_zero_error(const CheckOptions& o) {
    return detail::timed("superdense decoding never errs given success", [&](std::string& d) {
        const std::size_t states = o.count(100, 10);
        std::size_t successes = 0;
        for (std::size_t i = 0; i < states; ++i) {
            const PureBipartiteState s =
                random_full_rank_state(2, derive_stream(o.seed, 6100 + i), 0.1);
            for (int msg = 0; msg < 4; ++msg) {
                bool seen = false;
                for (std::size_t t = 0; t < 200 && !seen; ++t) {
                    const TrialOutcome out =
                        decode_run(s, msg, derive_stream(o.seed, 6200 + 1000 * i + 4 * t
                                                                     + static_cast<std::size_t>(msg)));
                    if (out.success) {
                        seen = true;
                        ++successes;
                        if (out.decoded != msg) {
                            d = "wrong decode observed";
                            return false;
                        }
                    }
                }
                if (!seen) {
                    d = "no success within the trial cap";
                    return false;
                }
            }
        }
        d = std::to_string(successes) + " successes, all decoded correctly";
        return true;
    });
}

inline CheckResult check_superdense_rate(const CheckOptions& o) {
    return detail::timed("superdense success rate matches 2 lambda_2", [&](std::string& d) {
        const std::size_t trials = o.count(10000, 500);
        double worst_sigmas = 0.0;
        for (double lambda2 : {0.05, 0.15, 0.25, 0.4, 0.5}) {
            const PureBipartiteState s = state_from_lambda2(lambda2);
            const BatchResult r = run_batch(s, trials,
                                            derive_stream(o.seed, 6300
                                                                  + static_cast<std::uint64_t>(
                                                                      lambda2 * 1000)));
            if (r.errors_given_success != 0) {
                d = "decode errors among successes";
                return false;
            }
            const double p = 2.0 * lambda2;
            const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
            const double sigmas =
                sigma == 0.0 ? (r.success_rate == p ? 0.0 : 1e9)
                             : std::abs(r.success_rate - p) / sigma;
            worst_sigmas = std::max(worst_sigmas, sigmas);
        }
        d = "worst deviation " + detail::fmt(worst_sigmas) + " sigma";
        return worst_sigmas < 5.0;
    });
}

inline CheckResult check_encode_preserves_marginal(const CheckOptions& o) {
    return detail::timed("encoding leaves Alice's marginal untouched", [&](std::string& d) {
        const std::size_t reps = o.count(50, 10);
        double worst = 0.0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const PureBipartiteState s = random_pure_state(2, 2, derive_stream(o.seed, 6400 + rep));
            const ComplexMatrix base = marginal(s, Party::Alice).matrix();
            for (int msg = 0; msg < 4; ++msg)
                worst = std::max(worst, frobenius_distance(
                                            base, marginal(encode(s, msg), Party::Alice).matrix()));
        }
        d = "worst marginal drift " + detail::fmt(worst);
        return worst <= 1e-12;
    });
}

/// Every module's invariants in declaration order.
inline std::vector<CheckResult> run_all_checks(const CheckOptions& o) {
    return {
        check_svd_roundtrip(o),
        check_eigh_reconstruction(o),
        check_isometry_completion(o),
        check_kron_mixed_product(o),
        check_haar_sampling(o),
        check_schmidt_roundtrip(o),
        check_marginal_spectra(o),
        check_schmidt_local_unitary_invariance(o),
        check_marginal_bob_invariance(o),
        check_dilation_commutation(o),
        check_dilation_probability(o),
        check_transfer_roundtrip(o),
        check_composition_multiplicativity(o),
        check_filter_optimality(o),
        check_extraction_amplitude(o),
        check_extraction_through_dilation(o),
        check_filter_covariance(o),
        check_theorem_sufficiency(o),
        check_theorem_necessity(o),
        check_matrix_condition_coincidence(o),
        check_falsifier_determinism(o),
        check_superdense_zero_error(o),
        check_superdense_rate(o),
        check_encode_preserves_marginal(o),
    };
}

} // namespace qconc::selfcheck
