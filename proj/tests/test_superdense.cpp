#include <catch2/catch.hpp>

#include <cmath>

#include "qconc/selfcheck.hpp"
#include "qconc/superdense.hpp"

using namespace qconc;

TEST_CASE("message operators are unitary and trace-orthogonal") {
    for (int m = 0; m < 4; ++m) {
        const ComplexMatrix op = message_operator(m);
        CHECK(unitarity_defect(op) < 1e-12);
        for (int k = 0; k < 4; ++k) {
            const Complex inner = frobenius_inner(message_operator(k), op);
            if (k == m)
                CHECK(std::abs(inner - Complex(2.0)) < 1e-12);
            else
                CHECK(std::abs(inner) < 1e-12);
        }
    }
    CHECK_THROWS_AS(message_operator(4), InvalidInputError);
    CHECK_THROWS_AS(message_operator(-1), InvalidInputError);
}

TEST_CASE("encoding fixtures") {
    const PureBipartiteState phi2 = max_entangled(2);
    CHECK(approx_equal(encode(phi2, 0).coeff(), phi2.coeff(), 1e-12));

    const PureBipartiteState flipped = encode(phi2, 1);
    const double h = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(flipped.coeff()(0, 1) - Complex(h)) < 1e-12);
    CHECK(std::abs(flipped.coeff()(1, 0) - Complex(h)) < 1e-12);
    CHECK(std::abs(flipped.coeff()(0, 0)) < 1e-12);

    // the four encodings of |Phi_2> are pairwise orthogonal (Bell basis)
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
            CHECK(std::abs(frobenius_inner(encode(phi2, a).coeff(), encode(phi2, b).coeff()))
                  < 1e-12);
}

TEST_CASE("deterministic dense coding on the maximally entangled pair") {
    for (int msg = 0; msg < 4; ++msg) {
        const TrialOutcome out = decode_run(max_entangled(2), msg, derive_stream(1000, msg));
        REQUIRE(out.success);
        CHECK(out.filter_fired);
        CHECK(out.decoded == msg);
    }
}

TEST_CASE("success_probability fixtures") {
    CHECK(success_probability(max_entangled(2)) == Approx(1.0).margin(1e-12));
    CHECK(success_probability(state_from_lambda2(0.25)) == Approx(0.5).margin(1e-12));
    CHECK(success_probability(state_from_lambda2(0.0)) == Approx(0.0).margin(1e-12));
}

TEST_CASE("decode_run refuses rank-deficient pairs") {
    CHECK_THROWS_AS(decode_run(state_from_lambda2(0.0), 0, 1), RankDeficiencyError);
}

TEST_CASE("monte carlo success rate tracks 2 lambda_2") {
    const std::size_t trials = 10000;
    const BatchResult r = run_batch(state_from_lambda2(0.25), trials, 4242);
    CHECK(r.errors_given_success == 0);
    const double sigma = std::sqrt(0.25 / static_cast<double>(trials));
    CHECK(std::abs(r.success_rate - 0.5) < 5.0 * sigma);
    CHECK(r.trials == trials);
    CHECK(r.successes == static_cast<std::size_t>(r.success_rate * trials + 0.5));
}

TEST_CASE("every success decodes correctly on random states and all messages") {
    for (std::size_t i = 0; i < 20; ++i) {
        const PureBipartiteState s =
            selfcheck::random_full_rank_state(2, derive_stream(7100, i), 0.1);
        for (int msg = 0; msg < 4; ++msg) {
            std::size_t seen = 0;
            for (std::size_t t = 0; t < 60; ++t) {
                const TrialOutcome out =
                    decode_run(s, msg, derive_stream(7200 + i, 4 * t + static_cast<std::size_t>(msg)));
                if (out.success) {
                    ++seen;
                    CHECK(out.decoded == msg);
                }
            }
            CHECK(seen > 0);
        }
    }
}

TEST_CASE("state_from_lambda2 validates its range") {
    CHECK_THROWS_AS(state_from_lambda2(0.6), InvalidInputError);
    CHECK_THROWS_AS(state_from_lambda2(-0.1), InvalidInputError);
}

TEST_CASE("superdense invariants over random ensembles") {
    for (const auto& check :
         {selfcheck::check_superdense_zero_error({.seed = 71, .quick = true}),
          selfcheck::check_superdense_rate({.seed = 72, .quick = true}),
          selfcheck::check_encode_preserves_marginal({.seed = 73, .quick = true})}) {
        INFO(check.name << ": " << check.detail);
        CHECK(check.pass);
    }
}
