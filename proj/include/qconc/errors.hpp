#pragma once
// Copyright (c) 2026 the qconc authors.
// SPDX-License-Identifier: Apache-2.0

#include <stdexcept>
#include <string>

namespace qconc {

/// Base class of every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (bad dimensions, bad ranges,
/// non-unitary or non-Hermitian matrices, malformed serialized data).
struct InvalidInputError : Error {
    using Error::Error;
};

/// An iterative factorization exceeded its sweep cap. Never silent: callers
/// get this instead of an unconverged answer.
struct NumericalFailureError : Error {
    using Error::Error;
};

/// The operation needs full Schmidt rank and the state does not have it.
struct RankDeficiencyError : Error {
    using Error::Error;
};

/// A selected measurement branch carries (numerically) zero probability,
/// so there is no post-operation state to return.
struct AnnihilationError : Error {
    using Error::Error;
};

} // namespace qconc
