#pragma once
// Copyright (c) 2026 the qconc authors.
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qconc/concentrate.hpp"
#include "qconc/kraus.hpp"
#include "qconc/matrix.hpp"
#include "qconc/random.hpp"
#include "qconc/state.hpp"

namespace qconc {

/// Bob's four message encodings, all unitary and pairwise orthogonal under
/// the trace inner product: 0 -> I, 1 -> sigma_x, 2 -> i sigma_y, 3 -> sigma_z.
inline ComplexMatrix message_operator(int msg) {
    switch (msg) {
    case 0:
        return ComplexMatrix::identity(2);
    case 1:
        return ComplexMatrix(2, 2, {0.0, 1.0, 1.0, 0.0});
    case 2:
        return ComplexMatrix(2, 2, {0.0, 1.0, -1.0, 0.0});
    case 3:
        return ComplexMatrix(2, 2, {1.0, 0.0, 0.0, -1.0});
    default:
        throw InvalidInputError("message must lie in {0, 1, 2, 3}");
    }
}

/// Bob applies his message unitary to his qubit of the shared pair.
inline PureBipartiteState encode(const PureBipartiteState& s, int msg) {
    if (s.dim_a() != 2 || s.dim_b() != 2)
        throw InvalidInputError("encode: state must be a qubit pair");
    const ComplexMatrix op = message_operator(msg);
    return PureBipartiteState::normalized(s.coeff() * op.transpose());
}

struct TrialOutcome {
    bool success;      // filter fired and a message was read out
    int decoded;       // valid in {0..3} when success
    bool filter_fired; // probe measurement hit the success branch
};

/// Success probability of the concentrate-then-decode protocol: 2 lambda_2
/// (the optimal concentration efficiency for a qubit pair, which also equals
/// the unambiguous-discrimination optimum 1 - (lambda_1 - lambda_2) for this
/// message ensemble).
inline double success_probability(const PureBipartiteState& s) {
    if (s.dim_a() != 2 || s.dim_b() != 2)
        throw InvalidInputError("success_probability: state must be a qubit pair");
    return 2.0 * schmidt_coefficients(s).back();
}

/// One round of probabilistic superdense coding over the shared pair s:
/// Bob encodes msg and sends his qubit over; Alice runs the probe dilation of
/// the unencoded state's optimal filter and, when it fires, measures in the
/// Bell basis of the filtered frame. Conditioned on success the decoded
/// message always equals msg, because the filter acts on Alice's side only
/// and commutes with Bob's already-applied encoding.
inline TrialOutcome decode_run(const PureBipartiteState& s, int msg, std::uint64_t seed) {
    if (s.dim_a() != 2 || s.dim_b() != 2)
        throw InvalidInputError("decode_run: state must be a qubit pair");
    const PureBipartiteState encoded = encode(s, msg);

    const ConcentrationResult base = concentrate(s); // throws if rank-deficient
    const ProbeDilation dilation = dilate(base.filter);
    const MeasurementOutcome probe = simulate_measurement(dilation, encoded,
                                                          derive_stream(seed, 0));
    if (probe.outcome != dilation.success_outcome()) return {false, -1, false};

    // Bell basis of the filtered frame: the four encodings of the filtered
    // unencoded state are exactly orthonormal
    std::array<ComplexMatrix, 4> basis = {
        base.output_state.coeff() * message_operator(0).transpose(),
        base.output_state.coeff() * message_operator(1).transpose(),
        base.output_state.coeff() * message_operator(2).transpose(),
        base.output_state.coeff() * message_operator(3).transpose(),
    };
    std::array<double, 4> weights{};
    for (int m = 0; m < 4; ++m)
        weights[static_cast<std::size_t>(m)] =
            std::norm(frobenius_inner(basis[static_cast<std::size_t>(m)],
                                      probe.post_state.coeff()));
    Rng rng(derive_stream(seed, 1));
    const int decoded = static_cast<int>(rng.sample_discrete(weights));
    return {true, decoded, true};
}

struct BatchResult {
    std::size_t trials;
    std::size_t successes;
    double success_rate;
    std::size_t errors_given_success;
};

/// Runs `trials` decode rounds with per-trial derived seeds and uniformly
/// random messages; reports the success rate and the decoding errors among
/// successful rounds (always zero for a correct decoder).
inline BatchResult run_batch(const PureBipartiteState& s, std::size_t trials,
                             std::uint64_t seed) {
    if (trials == 0) throw InvalidInputError("run_batch: trials must be positive");
    std::size_t successes = 0;
    std::size_t errors = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng msg_rng(derive_stream(seed, 2 * t));
        const int msg = static_cast<int>(msg_rng.next_u64() % 4);
        const TrialOutcome out = decode_run(s, msg, derive_stream(seed, 2 * t + 1));
        if (out.success) {
            ++successes;
            if (out.decoded != msg) ++errors;
        }
    }
    return {trials, successes,
            static_cast<double>(successes) / static_cast<double>(trials), errors};
}

/// Schmidt-diagonal qubit pair diag(sqrt(1 - lambda2), sqrt(lambda2)).
inline PureBipartiteState state_from_lambda2(double lambda2) {
    if (lambda2 < 0.0 || lambda2 > 0.5)
        throw InvalidInputError("state_from_lambda2: lambda2 must lie in [0, 0.5]");
    ComplexMatrix c(2, 2);
    c(0, 0) = std::sqrt(1.0 - lambda2);
    c(1, 1) = std::sqrt(lambda2);
    return PureBipartiteState(std::move(c));
}

} // namespace qconc
