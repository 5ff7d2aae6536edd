#include <catch2/catch.hpp>

#include "qconc/json_io.hpp"
#include "qconc/selfcheck.hpp"

using namespace qconc;

TEST_CASE("state round-trips through its JSON schema") {
    for (std::size_t i = 0; i < 12; ++i) {
        const std::size_t a = 2 + i % 3;
        const std::size_t b = 2 + (i / 3) % 3;
        const PureBipartiteState s = random_pure_state(a, b, derive_stream(9000, i));
        const Json j = state_to_json(s);
        CHECK(j["dimA"] == a);
        CHECK(j["dimB"] == b);
        const PureBipartiteState back = state_from_json(j);
        CHECK(approx_equal(s.coeff(), back.coeff(), 0.0)); // exact: doubles survive JSON
    }
}

TEST_CASE("operation round-trips through its JSON schema") {
    Rng rng(3);
    const LocalOperation op = random_kraus(Party::Bob, 3, rng);
    const Json j = operation_to_json(op);
    CHECK(j["party"] == "Bob");
    const LocalOperation back = operation_from_json(j);
    CHECK(back.party() == Party::Bob);
    CHECK(approx_equal(op.kraus(), back.kraus(), 0.0));
}

TEST_CASE("density round-trips through its JSON schema") {
    const DensityMatrix rho = werner_state(0.3);
    const DensityMatrix back = density_from_json(density_to_json(rho));
    CHECK(approx_equal(rho.matrix(), back.matrix(), 0.0));
}

TEST_CASE("malformed state documents are rejected with diagnostics") {
    CHECK_THROWS_AS(state_from_json(Json::array()), InvalidInputError);
    CHECK_THROWS_AS(state_from_json(Json{{"dimA", 2}, {"dimB", 2}}), InvalidInputError);
    CHECK_THROWS_AS(state_from_json(Json{{"dimA", 0},
                                         {"dimB", 2},
                                         {"re", Json::array()},
                                         {"im", Json::array()}}),
                    InvalidInputError);

    Json wrong_shape = state_to_json(max_entangled(2));
    wrong_shape["re"][0] = Json::array({1.0}); // row too short
    CHECK_THROWS_AS(state_from_json(wrong_shape), InvalidInputError);

    Json bad_norm = state_to_json(max_entangled(2));
    bad_norm["re"][0][0] = 0.9; // breaks normalization
    CHECK_THROWS_AS(state_from_json(bad_norm), InvalidInputError);
}

TEST_CASE("operation documents validate party and contraction") {
    Json j = operation_to_json(LocalOperation::identity(Party::Alice, 2));
    j["party"] = "Eve";
    CHECK_THROWS_AS(operation_from_json(j), InvalidInputError);

    Json big = operation_to_json(LocalOperation::identity(Party::Alice, 2));
    big["re"][0][0] = 2.0; // violates the contraction bound
    CHECK_THROWS_AS(operation_from_json(big), InvalidInputError);
}

TEST_CASE("falsifier reports serialize with their operation pair") {
    const PureBipartiteState s1 = selfcheck::random_full_rank_state(2, 1);
    const PureBipartiteState s2 = selfcheck::random_full_rank_state(2, 2);
    const FalsifierReport r = proposition_falsifier(s1, s2, 50, 5);
    const Json j = falsifier_report_to_json(r);
    CHECK(j["trials" ] == 50);
    CHECK(j["seed"] == 5);
    CHECK(j["bestScore"].get<double>() == r.best_score);
    CHECK(j["bestOperation"].contains("A"));
    CHECK(j["bestOperation"].contains("B"));
    CHECK(j["clauses"].is_array());
    CHECK_FALSE(j["clauses"].empty());
}
