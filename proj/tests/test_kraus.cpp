#include <catch2/catch.hpp>

#include <cmath>

#include "qconc/kraus.hpp"
#include "qconc/selfcheck.hpp"

using namespace qconc;

namespace {
ComplexMatrix filter_third() { // diag(sqrt(1/3), 1)
    ComplexMatrix k(2, 2);
    k(0, 0) = std::sqrt(1.0 / 3.0);
    k(1, 1) = 1.0;
    return k;
}

PureBipartiteState tilted() { // coeff diag(sqrt(0.75), sqrt(0.25))
    ComplexMatrix c(2, 2);
    c(0, 0) = std::sqrt(0.75);
    c(1, 1) = std::sqrt(0.25);
    return PureBipartiteState(c);
}
} // namespace

TEST_CASE("local operations enforce the contraction bound") {
    CHECK_THROWS_AS(LocalOperation(Party::Alice, ComplexMatrix::identity(2) * 2.0),
                    InvalidInputError);
    CHECK_NOTHROW(LocalOperation(Party::Alice, ComplexMatrix::identity(2)));
    CHECK_NOTHROW(LocalOperation(Party::Bob, ComplexMatrix(2, 2))); // zero operator is fine
}

TEST_CASE("apply_pair on fixtures") {
    const PureBipartiteState phi2 = max_entangled(2);
    const LocalOperation ia = LocalOperation::identity(Party::Alice, 2);
    const LocalOperation ib = LocalOperation::identity(Party::Bob, 2);

    const ApplyResult same = apply_pair(phi2, ia, ib);
    CHECK(same.probability == Approx(1.0).margin(1e-12));
    CHECK(approx_equal(same.state.coeff(), phi2.coeff(), 1e-12));

    ComplexMatrix proj(2, 2);
    proj(0, 0) = 1.0;
    const ApplyResult collapsed = apply_pair(phi2, LocalOperation(Party::Alice, proj), ib);
    CHECK(collapsed.probability == Approx(0.5).margin(1e-12));
    CHECK(std::abs(collapsed.state.coeff()(0, 0) - Complex(1.0)) < 1e-12);

    const ApplyResult filtered =
        apply_pair(tilted(), LocalOperation(Party::Alice, filter_third()), ib);
    CHECK(filtered.probability == Approx(0.5).margin(1e-12)); // = 2 * lambda_min
    CHECK(is_maximally_entangled(filtered.state, 1e-10));
}

TEST_CASE("apply_pair annihilation") {
    ComplexMatrix proj(2, 2);
    proj(0, 0) = 1.0; // projects onto |0>
    ComplexMatrix c(2, 2);
    c(1, 1) = 1.0; // state |1>|1>
    CHECK_THROWS_AS(apply_pair(PureBipartiteState(c), LocalOperation(Party::Alice, proj),
                               LocalOperation::identity(Party::Bob, 2)),
                    AnnihilationError);
}

TEST_CASE("dilation of the identity always fires") {
    const ProbeDilation d = dilate(LocalOperation::identity(Party::Alice, 2));
    CHECK(unitarity_defect(d.unitary()) < 1e-9);
    const auto w = branch_weights(d, max_entangled(2));
    CHECK(w[d.success_outcome()] == Approx(1.0).margin(1e-12));
    const MeasurementOutcome m = simulate_measurement(d, max_entangled(2), 5);
    CHECK(m.outcome == d.success_outcome());
}

TEST_CASE("dilation of the zero operator never fires") {
    const ProbeDilation d = dilate(LocalOperation(Party::Alice, ComplexMatrix(2, 2)));
    const auto w = branch_weights(d, tilted());
    CHECK(w[d.success_outcome()] == Approx(0.0).margin(1e-12));
    CHECK(w[0] == Approx(1.0).margin(1e-12));
}

TEST_CASE("dilation realizes the filter with weight gamma") {
    const LocalOperation k{Party::Alice, filter_third()};
    const ProbeDilation d = dilate(k);
    // success block of the unitary equals the Kraus operator
    CHECK(approx_equal(d.branch_operator(d.success_outcome()), filter_third(), 1e-9));
    const auto w = branch_weights(d, tilted());
    CHECK(w[d.success_outcome()] == Approx(0.5).margin(1e-12));
    // branch weight coincides with direct application
    CHECK(w[d.success_outcome()]
          == Approx(apply_local(tilted(), k).probability).margin(1e-10));
}

TEST_CASE("dilation validates probe dimension and supports larger probes") {
    CHECK_THROWS_AS(dilate(LocalOperation::identity(Party::Alice, 2), 1), InvalidInputError);
    const ProbeDilation d = dilate(LocalOperation{Party::Alice, filter_third()}, 3);
    CHECK(d.probe_dim() == 3);
    CHECK(unitarity_defect(d.unitary()) < 1e-9);
    const auto w = branch_weights(d, tilted());
    CHECK(w[d.success_outcome()] == Approx(0.5).margin(1e-12));
}

TEST_CASE("measurement statistics follow the Born weight") {
    const PureBipartiteState s = tilted();
    const ProbeDilation d = dilate(LocalOperation{Party::Alice, filter_third()});
    const std::size_t trials = 10000;
    std::size_t fired = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const MeasurementOutcome m = simulate_measurement(d, s, derive_stream(321, t));
        if (m.outcome == d.success_outcome()) {
            ++fired;
            CHECK(is_maximally_entangled(m.post_state, 1e-9));
        }
    }
    const double freq = static_cast<double>(fired) / static_cast<double>(trials);
    const double sigma = std::sqrt(0.25 / static_cast<double>(trials));
    CHECK(std::abs(freq - 0.5) < 5.0 * sigma);

    // determinism: same seed, same outcome and state
    const MeasurementOutcome a = simulate_measurement(d, s, 99);
    const MeasurementOutcome b = simulate_measurement(d, s, 99);
    CHECK(a.outcome == b.outcome);
    CHECK(approx_equal(a.post_state.coeff(), b.post_state.coeff(), 0.0));
}

TEST_CASE("transfer of a Bob unitary across a maximally entangled state") {
    Rng rng(8);
    const ComplexMatrix v = random_haar_unitary(3, rng);
    const SideTransfer tr =
        transfer_to_alice_side(max_entangled(3), LocalOperation(Party::Bob, v));
    CHECK(tr.scale == Approx(1.0).margin(1e-9));
    // alice_equivalent is v^T up to a global phase: X = A (v^T)^{-1} = phase * I
    const ComplexMatrix x = tr.alice_equivalent.kraus() * v.conjugate();
    CHECK(std::abs(std::abs(x(0, 0)) - 1.0) < 1e-9);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            if (i != j) CHECK(std::abs(x(i, j)) < 1e-9);
}

TEST_CASE("transfer of the identity is the identity") {
    const PureBipartiteState s = selfcheck::random_full_rank_state(3, 4);
    const SideTransfer tr = transfer_to_alice_side(s, LocalOperation::identity(Party::Bob, 3));
    CHECK(approx_equal(tr.alice_equivalent.kraus(), ComplexMatrix::identity(3), 1e-9));
    CHECK(approx_equal(tr.bob_unitary_fix, ComplexMatrix::identity(3), 1e-9));
    CHECK(tr.scale == Approx(1.0).margin(1e-12));
}

TEST_CASE("transfer of a projector verified against the defining equality") {
    ComplexMatrix proj(2, 2);
    proj(0, 0) = 1.0;
    const PureBipartiteState s = tilted();
    const SideTransfer tr = transfer_to_alice_side(s, LocalOperation(Party::Bob, proj));
    const ComplexMatrix lhs = tr.alice_equivalent.kraus() * s.coeff()
                              * tr.bob_unitary_fix.transpose() * tr.scale;
    const ComplexMatrix rhs = s.coeff() * proj.transpose();
    CHECK(frobenius_distance(lhs, rhs) < 1e-9);
}

TEST_CASE("transfer refuses rank-deficient states") {
    ComplexMatrix c(2, 2);
    c(0, 0) = 1.0;
    CHECK_THROWS_AS(
        transfer_to_alice_side(PureBipartiteState(c), LocalOperation::identity(Party::Bob, 2)),
        RankDeficiencyError);
}

TEST_CASE("instrument utilities") {
    ComplexMatrix up(2, 2), down(2, 2);
    up(0, 0) = 1.0;
    down(1, 1) = 1.0;
    const std::vector<LocalOperation> complete = {LocalOperation(Party::Alice, up),
                                                  LocalOperation(Party::Alice, down)};
    CHECK(is_valid_instrument(complete));
    CHECK(is_complete_instrument(complete));
    const std::vector<LocalOperation> partial = {LocalOperation(Party::Alice, up)};
    CHECK(is_valid_instrument(partial));
    CHECK_FALSE(is_complete_instrument(partial));
}

TEST_CASE("lqcc invariants over random ensembles") {
    for (const auto& check :
         {selfcheck::check_dilation_commutation({.seed = 41, .quick = true}),
          selfcheck::check_dilation_probability({.seed = 42, .quick = true}),
          selfcheck::check_transfer_roundtrip({.seed = 43, .quick = true}),
          selfcheck::check_composition_multiplicativity({.seed = 44, .quick = true})}) {
        INFO(check.name << ": " << check.detail);
        CHECK(check.pass);
    }
}
