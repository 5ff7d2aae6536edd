#include <catch2/catch.hpp>

#include <cmath>

#include "qconc/selfcheck.hpp"
#include "qconc/theorem.hpp"

using namespace qconc;

namespace {
PureBipartiteState diag_state(std::initializer_list<double> lambda) {
    std::vector<double> roots;
    for (double l : lambda) roots.push_back(std::sqrt(l));
    return PureBipartiteState(ComplexMatrix::diagonal(roots));
}
} // namespace

TEST_CASE("marginals_equal on local-unitary images and distinct spectra") {
    Rng rng(14);
    const PureBipartiteState s = selfcheck::random_full_rank_state(3, 100);
    const PureBipartiteState bob_rotated =
        apply_local_unitaries(s, ComplexMatrix::identity(3), random_haar_unitary(3, rng));
    CHECK(marginals_equal(s, bob_rotated, Party::Alice, 1e-9));

    CHECK_FALSE(marginals_equal(diag_state({0.75, 0.25}), diag_state({0.5, 0.5}),
                                Party::Alice, 1e-7));
    CHECK_FALSE(marginals_equal(diag_state({0.75, 0.25}), diag_state({0.5, 0.5}),
                                Party::Bob, 1e-7));

    // flat spectrum: any Alice unitary preserves rho_A = I/2
    const PureBipartiteState flat = max_entangled(2);
    const PureBipartiteState alice_rotated =
        apply_local_unitaries(flat, random_haar_unitary(2, rng), ComplexMatrix::identity(2));
    CHECK(marginals_equal(flat, alice_rotated, Party::Alice, 1e-9));
}

TEST_CASE("shared_concentrator accepts a Bob-rotated partner") {
    Rng rng(15);
    const PureBipartiteState s1 = selfcheck::random_full_rank_state(3, 200);
    const PureBipartiteState s2 =
        apply_local_unitaries(s1, ComplexMatrix::identity(3), random_haar_unitary(3, rng));
    const SharedConcentratorVerdict v = shared_concentrator(s1, s2, Party::Alice, 1e-7);
    REQUIRE(v.concentratable);
    REQUIRE(v.filter.has_value());
    CHECK(v.output_1_maximal);
    CHECK(v.output_2_maximal);
    CHECK(std::abs(v.probability_1 - v.probability_2) < 1e-10);
    CHECK(v.probability_1 == Approx(gamma_max(s1)).margin(1e-9));
}

TEST_CASE("shared_concentrator rejects distinct spectra with a witness") {
    const SharedConcentratorVerdict v =
        shared_concentrator(diag_state({0.75, 0.25}), max_entangled(2), Party::Alice, 1e-7);
    CHECK_FALSE(v.concentratable);
    CHECK(v.marginal_distance > 0.01);
    CHECK(v.cross_output_deviation > 1e-3); // own filter of s1 fails on s2
    CHECK_FALSE(v.filter.has_value());
}

TEST_CASE("shared_concentrator of a state with itself reduces to build_filter") {
    const PureBipartiteState s = diag_state({0.7, 0.3});
    const SharedConcentratorVerdict v = shared_concentrator(s, s, Party::Alice, 1e-9);
    REQUIRE(v.concentratable);
    CHECK(approx_equal(v.filter->kraus(), build_filter(s).kraus(), 1e-12));
    CHECK(v.probability_1 == Approx(0.6).margin(1e-12));
}

TEST_CASE("shared_concentrator works on Bob's side too") {
    Rng rng(16);
    const PureBipartiteState s1 = selfcheck::random_full_rank_state(2, 300);
    const PureBipartiteState s2 =
        apply_local_unitaries(s1, random_haar_unitary(2, rng), ComplexMatrix::identity(2));
    const SharedConcentratorVerdict v = shared_concentrator(s1, s2, Party::Bob, 1e-7);
    REQUIRE(v.concentratable);
    CHECK(v.output_1_maximal);
    CHECK(v.output_2_maximal);
    CHECK(std::abs(v.probability_1 - v.probability_2) < 1e-10);
}

TEST_CASE("shared_concentrator refuses rank-deficient inputs") {
    CHECK_THROWS_AS(
        shared_concentrator(diag_state({1.0, 0.0}), max_entangled(2), Party::Alice, 1e-7),
        RankDeficiencyError);
}

TEST_CASE("check_matrix_condition fixtures") {
    const std::vector<double> flat = {0.5, 0.5};
    const std::vector<double> tilted = {0.75, 0.25};

    CHECK(check_matrix_condition(ComplexMatrix::identity(2), tilted, tilted, 1e-9));
    // degenerate spectrum: any unitary works
    Rng rng(17);
    CHECK(check_matrix_condition(random_haar_unitary(2, rng), flat, flat, 1e-9));
    // distinct spectra: no unitary can relate them
    for (std::size_t i = 0; i < 100; ++i)
        CHECK_FALSE(check_matrix_condition(random_haar_unitary(2, derive_stream(18, i)),
                                           tilted, flat, 1e-7));
    CHECK_THROWS_AS(
        check_matrix_condition(ComplexMatrix::identity(2) * 2.0, tilted, tilted, 1e-9),
        InvalidInputError);
    CHECK_THROWS_AS(
        check_matrix_condition(ComplexMatrix::identity(2), {0.9, 0.3}, flat, 1e-9),
        InvalidInputError);
}

TEST_CASE("bob-side reduction accepts the trivial instance") {
    const PureBipartiteState s = diag_state({0.6, 0.4});
    const BobReductionReport r = check_bob_side_reduction(
        s, s, LocalOperation::identity(Party::Bob, 2), ComplexMatrix::identity(2), 1e-9);
    CHECK(r.ok);
    CHECK(r.spectra_match);
    CHECK(r.weights_match);
    CHECK(r.input_spectra_match);
    CHECK(r.failed_clauses().empty());
}

TEST_CASE("bob-side reduction accepts commutant-rotated full-rank instances") {
    Rng rng(19);
    const std::vector<double> lambda = {0.4, 0.4, 0.2};
    const PureBipartiteState s = diag_state({0.4, 0.4, 0.2});
    const ComplexMatrix u_b = commutant_unitary_for_spectrum(lambda, rng);
    const LocalOperation b = random_kraus(Party::Bob, 3, rng);
    const BobReductionReport r = check_bob_side_reduction(s, s, b, u_b, 1e-8);
    INFO("weights " << r.weight_1 << " vs " << r.weight_2);
    CHECK(r.ok);
}

TEST_CASE("bob-side reduction reports the failing clause on distinct spectra") {
    const PureBipartiteState s1 = diag_state({0.75, 0.25});
    const PureBipartiteState s2 = diag_state({0.5, 0.5});
    const BobReductionReport r = check_bob_side_reduction(
        s1, s2, LocalOperation::identity(Party::Bob, 2), ComplexMatrix::identity(2), 1e-8);
    CHECK_FALSE(r.ok);
    CHECK_FALSE(r.input_spectra_match);
    bool named = false;
    for (const std::string& clause : r.failed_clauses())
        if (clause.find("input spectra") != std::string::npos) named = true;
    CHECK(named);
}

TEST_CASE("bob-side reduction rejects annihilating operations") {
    const PureBipartiteState s = diag_state({0.6, 0.4});
    CHECK_THROWS_AS(check_bob_side_reduction(s, s, LocalOperation(Party::Bob, ComplexMatrix(2, 2)),
                                             ComplexMatrix::identity(2), 1e-9),
                    AnnihilationError);
}

TEST_CASE("proposition_falsifier rejects coincident inputs") {
    const PureBipartiteState s = diag_state({0.6, 0.4});
    CHECK_THROWS_AS(proposition_falsifier(s, s, 10, 1), InvalidInputError);
}

TEST_CASE("proposition_falsifier on a concentratable pair scores below one") {
    Rng rng(20);
    const PureBipartiteState s1 = selfcheck::random_full_rank_state(2, 400);
    const PureBipartiteState s2 =
        apply_local_unitaries(s1, ComplexMatrix::identity(2), random_haar_unitary(2, rng));
    const FalsifierReport r = proposition_falsifier(s1, s2, 3000, 12);
    CHECK(r.best_score > 0.0); // the seeded filter trials fire
    CHECK(r.best_score < 1.0 - 1e-4);
    CHECK(r.trials == 3000);
}

TEST_CASE("proposition_falsifier never reaches one on distinct-marginal pairs") {
    const FalsifierReport r =
        proposition_falsifier(diag_state({0.75, 0.25}), max_entangled(2), 10000, 7);
    CHECK(r.best_score < 1.0 - 1e-4);
    CHECK(r.best_score > 0.0);
}

TEST_CASE("purification_falsifier on Werner noise stays below the ceiling") {
    const FalsifierReport r = purification_falsifier(werner_state(0.5), 10000, 77);
    CHECK(r.best_score < 0.999);
    // identity opener guarantees at least the input's own fraction
    CHECK(r.best_score >= 0.625 - 1e-9);
}

TEST_CASE("purification_falsifier identity opener reproduces the input fraction") {
    const FalsifierReport r =
        purification_falsifier(DensityMatrix(ComplexMatrix::identity(4) * 0.25), 1, 3);
    CHECK(r.best_score == Approx(0.25).margin(1e-9));
}

TEST_CASE("purification_falsifier rejects pure inputs") {
    const DensityMatrix pure{pure_projector(selfcheck::random_full_rank_state(2, 500))};
    CHECK_THROWS_AS(purification_falsifier(pure, 10, 1), InvalidInputError);
}

TEST_CASE("dilated filter action on a rotated partner matches the ratio formula") {
    // with the filter built for a Schmidt-diagonal state of spectrum lambda,
    // the success branch applied to (U_A ⊗ I) diag(sqrt(mu)) must come out as
    // sqrt(gamma/N) * [ u_a(i,k) sqrt(mu_k / lambda_i) ] entrywise
    for (std::size_t n : {2, 3, 4}) {
        Rng rng(derive_stream(33, n));
        auto spectrum = [&] {
            std::vector<double> v(n);
            double sum = 0.0;
            for (double& x : v) {
                x = 0.1 + rng.uniform();
                sum += x;
            }
            for (double& x : v) x /= sum;
            std::sort(v.rbegin(), v.rend());
            return v;
        };
        const std::vector<double> lambda = spectrum();
        const std::vector<double> mu = spectrum();
        std::vector<double> roots(n), mu_roots(n);
        for (std::size_t i = 0; i < n; ++i) {
            roots[i] = std::sqrt(lambda[i]);
            mu_roots[i] = std::sqrt(mu[i]);
        }
        const PureBipartiteState s{ComplexMatrix::diagonal(roots)};
        const ComplexMatrix u_a = random_haar_unitary(n, rng);
        const PureBipartiteState partner{u_a * ComplexMatrix::diagonal(mu_roots)};

        const ProbeDilation dil = dilate(build_filter(s));
        const ComplexMatrix branch =
            dil.branch_operator(dil.success_outcome()) * partner.coeff();

        const double gamma = gamma_max(s);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) {
                const Complex expected = std::sqrt(gamma / static_cast<double>(n))
                                         * u_a(i, k) * std::sqrt(mu[k] / lambda[i]);
                worst = std::max(worst, std::abs(branch(i, k) - expected));
            }
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("commutant unitaries commute with their density matrix") {
    Rng rng(21);
    const DensityMatrix rho = marginal(selfcheck::shared_marginal_pair(4, 600, true,
                                                                       Party::Alice)
                                           .s1,
                                       Party::Alice);
    const ComplexMatrix w = commutant_unitary(rho, rng, 1e-7);
    CHECK(unitarity_defect(w) < 1e-9);
    CHECK(frobenius_distance(w * rho.matrix(), rho.matrix() * w) < 1e-8);
}

TEST_CASE("theorem invariants over random ensembles") {
    for (const auto& check :
         {selfcheck::check_theorem_sufficiency({.seed = 61, .quick = true}),
          selfcheck::check_theorem_necessity({.seed = 62, .quick = true}),
          selfcheck::check_matrix_condition_coincidence({.seed = 63, .quick = true}),
          selfcheck::check_falsifier_determinism({.seed = 64, .quick = true})}) {
        INFO(check.name << ": " << check.detail);
        CHECK(check.pass);
    }
}
